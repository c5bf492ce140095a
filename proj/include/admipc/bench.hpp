#ifndef ADMIPC_BENCH_HPP
#define ADMIPC_BENCH_HPP

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <tuple>
#include <utility>
#include <vector>

#include "admipc/errors.hpp"
#include "admipc/evaluate.hpp"
#include "admipc/io.hpp"
#include "admipc/louvain.hpp"
#include "admipc/netgen.hpp"
#include "admipc/rpca.hpp"
#include "admipc/solver.hpp"

namespace admipc {

enum class Method { Admipc, Mialm, Rpcab, Louvain };

inline constexpr Method kAllMethods[] = {Method::Admipc, Method::Mialm, Method::Rpcab, Method::Louvain};

inline const char* toString(Method m) {
  switch (m) {
    case Method::Admipc: return "admipc";
    case Method::Mialm: return "mialm";
    case Method::Rpcab: return "rpcab";
    case Method::Louvain: return "louvain";
  }
  return "?";
}

inline std::optional<Method> parseMethod(const std::string& s) {
  for (Method m : kAllMethods)
    if (s == toString(m)) return m;
  return std::nullopt;
}

/// Knobs shared by every method in a run.
struct MethodParams {
  std::optional<double> rho;
  double kappa = 1.2;
  double muBar = 1e7;
  double epsR = 5e-4;
  int maxIter = 500;
  SpectralBackend backend;
  int outerCap = 20;
  bool warmStart = false;
  int louvainOrders = 20;

  SolverConfig admipc() const { return {rho, std::nullopt, kappa, muBar, epsR, maxIter, backend}; }
  MialmConfig mialm() const { return {rho, std::nullopt, kappa, muBar, epsR, maxIter, backend}; }
  RpcabOptions rpcab() const { return {outerCap, 0.01, warmStart}; }
};

/// One method on one instance. Solvers yield L (and S); Louvain yields one
/// partition per ordering.
struct MethodOutput {
  std::optional<DenseSymMatrix> L, S;
  std::vector<Partition> partitions;
  int iterations = 0;
  int eigCalls = 0;
  int outerIterations = 0;
  std::vector<RhoStep> rhoTrace;
  std::string status{};
  double seconds = 0.0;
};

/// `louvainSeed` feeds only the Louvain orderings.
inline MethodOutput runMethod(Method m, const ObservedGraph& g, const MethodParams& p, std::uint64_t louvainSeed) {
  MethodOutput out;
  const auto t0 = std::chrono::steady_clock::now();
  switch (m) {
    case Method::Admipc: {
      SolveResult r = solve(g, p.admipc());
      out.iterations = r.iterations;
      out.eigCalls = r.eigCalls;
      out.status = toString(r.status);
      out.L = std::move(r.L);
      out.S = std::move(r.S);
      break;
    }
    case Method::Mialm: {
      MialmResult r = mialmSolve(g, p.mialm());
      out.iterations = r.iterations;
      out.eigCalls = r.eigCalls;
      out.status = toString(r.status);
      out.L = std::move(r.L);
      out.S = std::move(r.S);
      break;
    }
    case Method::Rpcab: {
      RpcabResult r = rpcabSolve(g, p.mialm(), p.rpcab());
      out.eigCalls = r.eigCalls;
      out.outerIterations = r.outerIterations;
      out.rhoTrace = r.rhoTrace;
      out.status = toString(r.status);
      out.L = std::move(r.L);
      out.S = std::move(r.S);
      break;
    }
    case Method::Louvain: {
      out.partitions = louvainBest(SimpleGraph::fromObserved(g), p.louvainOrders, louvainSeed);
      out.status = "ok";
      break;
    }
  }
  out.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

/// Scores of one method output against the truth. Louvain scores are means
/// over its orderings, with block statistics taken on each partition's BDO.
/// A solver whose L fails the diagonal check scores 0 on all similarity
/// measures and is flagged.
struct Scores {
  BlockStats block;
  SimilarityScores similarity;
  bool diagonalFailure = false;
};

inline Scores score(const MethodOutput& out, const Partition& truth) {
  Scores s;
  if (out.L) {
    s.block = recoveryStats(*out.L, truth);
    const Extraction ex = extractClusters(*out.L);
    if (const auto* p = std::get_if<Partition>(&ex)) {
      s.similarity = similarity(truth, *p);
    } else {
      s.diagonalFailure = true;
    }
    return s;
  }
  const double k = static_cast<double>(out.partitions.size());
  for (const Partition& p : out.partitions) {
    const BlockStats b = recoveryStats(p.toBdo(), truth);
    const SimilarityScores q = similarity(truth, p);
    s.block.sMax += b.sMax / k;
    s.block.sMin += b.sMin / k;
    s.block.sAv += b.sAv / k;
    s.block.sOff += b.sOff / k;
    s.block.sF += b.sF / k;
    s.similarity.jaccard += q.jaccard / k;
    s.similarity.nmiSg += q.nmiSg / k;
    s.similarity.perc += q.perc / k;
  }
  return s;
}

/// Instance seed: a pure function of the cell key and seed index.
inline std::uint64_t deriveSeed(std::uint64_t masterSeed, Index n, double alpha, double p0, int seedIndex) {
  std::uint64_t s = mixSeed(masterSeed, static_cast<std::uint64_t>(n));
  s = mixSeed(s, std::bit_cast<std::uint64_t>(alpha));
  s = mixSeed(s, std::bit_cast<std::uint64_t>(p0));
  return mixSeed(s, static_cast<std::uint64_t>(seedIndex));
}

inline constexpr std::uint64_t kLouvainStreamKey = 0x10BA1;

struct Instance {
  ObservedGraph graph;
  Partition truth;
};

/// Generates the instance for a cell and seed: fully observed network, then
/// a mask sample over its actual node count.
inline Instance makeInstance(Index n, double alpha, double p0, double flip, std::uint64_t seed) {
  GeneratorConfig cfg{n, alpha, flip, p0, seed};
  GeneratedNetwork net = generateNetwork(cfg);
  const Index actual = net.truth.n();
  ObservedGraph g = p0 >= 1.0 ? net.graph : restrictToMask(net.graph, sampleMask(actual, p0, seed));
  return {std::move(g), std::move(net.truth)};
}

struct ExperimentSpec {
  std::vector<Index> nList;
  std::vector<double> alphaList;
  std::vector<double> p0List;
  int seedsPerCell = 10;
  std::vector<Method> methods;
  std::uint64_t masterSeed = 1;
  double flip = 0.05;
  MethodParams params;
  /// Off: cpu_s is written as "-" so repeated runs give identical bytes.
  bool timing = true;

  void validate() const {
    if (nList.empty() || alphaList.empty() || p0List.empty() || methods.empty())
      throw ValidationError("spec: n, alpha, p0 and methods must be non-empty");
    if (seedsPerCell < 1) throw ValidationError("spec: seeds must be >= 1");
    if (params.louvainOrders < 1) throw ValidationError("spec: louvain_orders must be >= 1");
    for (Index n : nList)
      if (n < 1) throw ValidationError("spec: n must be positive");
    for (double a : alphaList)
      if (!(a > 0.0 && a <= 1.0)) throw ValidationError("spec: alpha must lie in (0, 1]");
    for (double p : p0List)
      if (!(p > 0.0 && p <= 1.0)) throw ValidationError("spec: p0 must lie in (0, 1]");
  }
};

namespace detail {

inline std::vector<std::string> splitList(const std::string& v) {
  std::vector<std::string> out;
  if (!v.empty() && v.back() == ',') throw ValidationError("spec: empty list item in '" + v + "'");
  std::string item;
  std::istringstream ss(v);
  while (std::getline(ss, item, ',')) {
    const auto b = item.find_first_not_of(" \t");
    const auto e = item.find_last_not_of(" \t");
    if (b == std::string::npos) throw ValidationError("spec: empty list item in '" + v + "'");
    out.push_back(item.substr(b, e - b + 1));
  }
  return out;
}

inline bool parseBool(const std::string& v, std::size_t line) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ParseError(line, "expected boolean, got '" + v + "'");
}

}  // namespace detail

/// Key-value text, one `key = value` per line, '#' comments. Lists are
/// comma-separated. Keys: n, alpha, p0, seeds, methods, louvain_orders,
/// master_seed, flip, rho, eps_r, kappa, mu_bar, max_iter, outer_cap,
/// warm_start, backend (dense|thresholded), timing.
inline ExperimentSpec parseExperimentSpec(std::istream& in) {
  ExperimentSpec spec;
  std::string line;
  std::size_t lineNo = 0;
  std::map<std::string, std::size_t> seen;
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos || line[first] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineNo, "expected 'key = value'");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t");
      const auto e = s.find_last_not_of(" \t");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (value.empty()) throw ParseError(lineNo, "missing value for '" + key + "'");
    if (!seen.emplace(key, lineNo).second) throw ParseError(lineNo, "duplicate key '" + key + "'");

    auto real = [&](const std::string& t) { return detail::parseReal(t, lineNo); };
    auto integer = [&](const std::string& t) { return detail::parseInteger(t, lineNo); };
    if (key == "n") {
      for (const auto& t : detail::splitList(value)) spec.nList.push_back(static_cast<Index>(integer(t)));
    } else if (key == "alpha") {
      for (const auto& t : detail::splitList(value)) spec.alphaList.push_back(real(t));
    } else if (key == "p0") {
      for (const auto& t : detail::splitList(value)) spec.p0List.push_back(real(t));
    } else if (key == "methods") {
      for (const auto& t : detail::splitList(value)) {
        const auto m = parseMethod(t);
        if (!m) throw ParseError(lineNo, "unknown method '" + t + "'");
        if (std::find(spec.methods.begin(), spec.methods.end(), *m) == spec.methods.end()) spec.methods.push_back(*m);
      }
    } else if (key == "seeds") {
      spec.seedsPerCell = static_cast<int>(integer(value));
    } else if (key == "louvain_orders") {
      spec.params.louvainOrders = static_cast<int>(integer(value));
    } else if (key == "master_seed") {
      spec.masterSeed = static_cast<std::uint64_t>(integer(value));
    } else if (key == "flip") {
      spec.flip = real(value);
    } else if (key == "rho") {
      spec.params.rho = real(value);
    } else if (key == "eps_r") {
      spec.params.epsR = real(value);
    } else if (key == "kappa") {
      spec.params.kappa = real(value);
    } else if (key == "mu_bar") {
      spec.params.muBar = real(value);
    } else if (key == "max_iter") {
      spec.params.maxIter = static_cast<int>(integer(value));
    } else if (key == "outer_cap") {
      spec.params.outerCap = static_cast<int>(integer(value));
    } else if (key == "warm_start") {
      spec.params.warmStart = detail::parseBool(value, lineNo);
    } else if (key == "timing") {
      spec.timing = detail::parseBool(value, lineNo);
    } else if (key == "backend") {
      if (value == "dense") {
        spec.params.backend = SpectralBackend::fullDense();
      } else if (value == "thresholded") {
        spec.params.backend = SpectralBackend::thresholdedIterative();
      } else {
        throw ParseError(lineNo, "backend must be 'dense' or 'thresholded'");
      }
    } else {
      throw ParseError(lineNo, "unknown key '" + key + "'");
    }
  }
  spec.validate();
  return spec;
}

/// One (instance, method) run.
struct RunRecord {
  Index n = 0;
  double alpha = 0, p0 = 0;
  Method method = Method::Admipc;
  int seedIndex = 0;
  std::optional<Scores> scores{};  // empty when the run threw
  double seconds = 0.0;
  int eigCalls = 0;
  int outerIterations = 0;
  std::string status{};
};

/// Per-(n, alpha, p0, method) means over seeds.
struct CellSummary {
  Index n = 0;
  double alpha = 0, p0 = 0;
  Method method = Method::Admipc;
  int runs = 0;  // runs that produced scores
  double sMax = 0, sMin = 0, sAv = 0, sOff = 0, sF = 0;
  double jaccard = 0, nmiSg = 0, perc = 0;
  double seconds = 0, eigCalls = 0, outerIterations = 0;
  std::string status{};  // "ok", or "name=count" entries joined by ';'
};

inline int methodRank(Method m) { return static_cast<int>(m); }

inline bool isOkStatus(const std::string& s) { return s == "converged" || s == "ok" || s == "trace_matched"; }

/// Runs the grid. Instances are generated once per (cell, seed) and shared by
/// the methods. Work is spread over `jobs` threads; results are independent
/// of scheduling.
inline std::vector<RunRecord> runBenchRecords(const ExperimentSpec& spec, int jobs = 1) {
  spec.validate();
  struct Task {
    Index n;
    double alpha, p0;
    int seedIndex;
  };
  std::vector<Task> tasks;
  for (Index n : spec.nList)
    for (double a : spec.alphaList)
      for (double p : spec.p0List)
        for (int s = 0; s < spec.seedsPerCell; ++s) tasks.push_back({n, a, p, s});

  std::vector<std::vector<RunRecord>> slots(tasks.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t t; (t = next.fetch_add(1)) < tasks.size();) {
      const Task& task = tasks[t];
      const std::uint64_t seed = deriveSeed(spec.masterSeed, task.n, task.alpha, task.p0, task.seedIndex);
      std::optional<Instance> inst;
      std::string genError;
      try {
        inst = makeInstance(task.n, task.alpha, task.p0, spec.flip, seed);
      } catch (const std::exception& e) {
        genError = std::string("error:") + e.what();
      }
      for (Method m : spec.methods) {
        RunRecord rec{.n = task.n, .alpha = task.alpha, .p0 = task.p0, .method = m, .seedIndex = task.seedIndex};
        if (!inst) {
          rec.status = genError;
          slots[t].push_back(std::move(rec));
          continue;
        }
        try {
          MethodOutput out = runMethod(m, inst->graph, spec.params, Rng(seed).split(kLouvainStreamKey).next());
          rec.scores = score(out, inst->truth);
          rec.seconds = out.seconds;
          rec.eigCalls = out.eigCalls;
          rec.outerIterations = out.outerIterations;
          rec.status = out.status;
          if (rec.scores->diagonalFailure)
            rec.status = isOkStatus(out.status) ? "diag_fail" : out.status + "+diag_fail";
        } catch (const std::exception& e) {
          rec.status = "error";
        }
        slots[t].push_back(std::move(rec));
      }
    }
  };
  const int threads = std::max(1, std::min<int>(jobs, static_cast<int>(tasks.size())));
  std::vector<std::thread> pool;
  for (int i = 1; i < threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<RunRecord> records;
  for (auto& s : slots)
    for (auto& r : s) records.push_back(std::move(r));
  std::stable_sort(records.begin(), records.end(), [](const RunRecord& a, const RunRecord& b) {
    return std::tie(a.n, a.alpha, a.p0) < std::tie(b.n, b.alpha, b.p0) ||
           (std::tie(a.n, a.alpha, a.p0) == std::tie(b.n, b.alpha, b.p0) &&
            std::make_pair(methodRank(a.method), a.seedIndex) < std::make_pair(methodRank(b.method), b.seedIndex));
  });
  return records;
}

inline std::vector<CellSummary> summarize(const std::vector<RunRecord>& records) {
  std::vector<CellSummary> cells;
  std::map<std::string, int> counts;
  auto flush = [&](CellSummary& c) {
    if (c.runs > 0) {
      const double k = c.runs;
      for (double* v : {&c.sMax, &c.sMin, &c.sAv, &c.sOff, &c.sF, &c.jaccard, &c.nmiSg, &c.perc, &c.seconds,
                        &c.eigCalls, &c.outerIterations})
        *v /= k;
    }
    std::string status;
    for (const auto& [name, count] : counts) {
      if (isOkStatus(name)) continue;
      if (!status.empty()) status += ';';
      status += name + "=" + std::to_string(count);
    }
    c.status = status.empty() ? "ok" : status;
    counts.clear();
    cells.push_back(c);
  };
  CellSummary cur;
  bool open = false;
  for (const RunRecord& r : records) {
    if (!open || r.n != cur.n || r.alpha != cur.alpha || r.p0 != cur.p0 || r.method != cur.method) {
      if (open) flush(cur);
      cur = CellSummary{.n = r.n, .alpha = r.alpha, .p0 = r.p0, .method = r.method};
      open = true;
    }
    ++counts[r.status];
    if (!r.scores) continue;
    ++cur.runs;
    const Scores& s = *r.scores;
    cur.sMax += s.block.sMax;
    cur.sMin += s.block.sMin;
    cur.sAv += s.block.sAv;
    cur.sOff += s.block.sOff;
    cur.sF += s.block.sF;
    cur.jaccard += s.similarity.jaccard;
    cur.nmiSg += s.similarity.nmiSg;
    cur.perc += s.similarity.perc;
    cur.seconds += r.seconds;
    cur.eigCalls += r.eigCalls;
    cur.outerIterations += r.outerIterations;
  }
  if (open) flush(cur);
  return cells;
}

inline std::vector<CellSummary> runBench(const ExperimentSpec& spec, int jobs = 1) {
  return summarize(runBenchRecords(spec, jobs));
}

inline constexpr const char* kCsvHeader =
    "n,alpha,p0,method,s_max,s_min,s_av,s_off,s_f,jaccard,nmi_sg,perc,cpu_s,eig_calls,status";

namespace detail {
inline std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}
}  // namespace detail

inline void writeCsv(std::ostream& out, const std::vector<CellSummary>& cells, bool timing = true) {
  out << kCsvHeader << '\n';
  for (const CellSummary& c : cells) {
    out << c.n << ',' << detail::fmt("%g", c.alpha) << ',' << detail::fmt("%g", c.p0) << ',' << toString(c.method);
    if (c.runs == 0) {
      out << ",,,,,,,,,,," << c.status << '\n';
      continue;
    }
    for (double v : {c.sMax, c.sMin, c.sAv, c.sOff, c.sF, c.jaccard, c.nmiSg, c.perc}) out << ',' << detail::fmt("%.4f", v);
    out << ',' << (timing ? detail::fmt("%.3f", c.seconds) : std::string("-"));
    out << ',' << detail::fmt("%.1f", c.eigCalls) << ',' << c.status << '\n';
  }
}

/// One parsed CSV row, fields by header name.
using CsvRow = std::map<std::string, std::string>;

inline std::vector<CsvRow> readCsv(std::istream& in) {
  std::vector<CsvRow> rows;
  std::string line;
  std::vector<std::string> header;
  std::size_t lineNo = 0;
  auto split = [](const std::string& s) {
    std::vector<std::string> f;
    std::string cur;
    for (char ch : s) {
      if (ch == ',') {
        f.push_back(cur);
        cur.clear();
      } else {
        cur += ch;
      }
    }
    f.push_back(cur);
    return f;
  };
  while (std::getline(in, line)) {
    ++lineNo;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (header.empty()) {
      header = split(line);
      for (const char* required : {"n", "alpha", "p0", "method", "s_max", "s_min", "s_av", "s_off", "s_f"})
        if (std::find(header.begin(), header.end(), required) == header.end())
          throw ParseError(lineNo, std::string("CSV header lacks column '") + required + "'");
      continue;
    }
    const auto fields = split(line);
    if (fields.size() != header.size()) throw ParseError(lineNo, "CSV row has the wrong number of fields");
    CsvRow row;
    for (std::size_t i = 0; i < header.size(); ++i) row[header[i]] = fields[i];
    rows.push_back(std::move(row));
  }
  return rows;
}

/// Markdown tables, one pair per p0: block statistics (s_max, s_min, s_av,
/// s_off, s_f per method) and similarity/cost (jaccard, nmi_sg, perc, cpu_s,
/// eig_calls per method). Rows are (n, alpha) in order of first appearance.
inline std::string renderReport(const std::vector<CsvRow>& rows) {
  if (rows.empty()) return "No results.\n";
  std::vector<std::string> p0s, methods;
  std::vector<std::pair<std::string, std::string>> keys;
  std::map<std::tuple<std::string, std::string, std::string, std::string>, const CsvRow*> index;
  auto addUnique = [](auto& v, const auto& x) {
    if (std::find(v.begin(), v.end(), x) == v.end()) v.push_back(x);
  };
  for (const CsvRow& r : rows) {
    addUnique(p0s, r.at("p0"));
    addUnique(methods, r.at("method"));
    addUnique(keys, std::make_pair(r.at("n"), r.at("alpha")));
    index[{r.at("p0"), r.at("n"), r.at("alpha"), r.at("method")}] = &r;
  }
  auto table = [&](std::ostringstream& out, const std::string& p0, const std::vector<std::string>& cols) {
    out << "| n | alpha |";
    for (const auto& m : methods)
      for (const auto& c : cols) out << ' ' << m << ' ' << c << " |";
    out << "\n|---|---|";
    for (std::size_t i = 0; i < methods.size() * cols.size(); ++i) out << "---|";
    out << '\n';
    for (const auto& [n, alpha] : keys) {
      bool any = false;
      for (const auto& m : methods) any = any || index.count({p0, n, alpha, m});
      if (!any) continue;
      out << "| " << n << " | " << alpha << " |";
      for (const auto& m : methods) {
        const auto it = index.find({p0, n, alpha, m});
        for (const auto& c : cols) {
          std::string v = "";
          if (it != index.end()) {
            const auto f = it->second->find(c);
            if (f != it->second->end()) v = f->second;
          }
          out << ' ' << v << " |";
        }
      }
      out << '\n';
    }
  };
  std::ostringstream out;
  for (const auto& p0 : p0s) {
    out << "## p0 = " << p0 << "\n\n";
    table(out, p0, {"s_max", "s_min", "s_av", "s_off", "s_f"});
    const bool extras = rows.front().count("jaccard") > 0;
    if (extras) {
      out << '\n';
      table(out, p0, {"jaccard", "nmi_sg", "perc", "cpu_s", "eig_calls"});
    }
    out << '\n';
  }
  return out.str();
}

}  // namespace admipc

#endif  // ADMIPC_BENCH_HPP
