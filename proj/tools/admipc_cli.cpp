// admipc: generate, solve, evaluate and benchmark community recovery.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>

#include "admipc/admipc.hpp"

namespace fs = std::filesystem;
using namespace admipc;

namespace {

struct Options {
  Index n = 100;
  double alpha = 1.0;
  double p0 = 1.0;
  double flip = 0.05;
  std::uint64_t seed = 1;
  std::string method = "admipc";
  std::optional<double> rho;
  double epsR = 5e-4;
  double kappa = 1.2;
  double muBar = 1e7;
  int maxIter = 500;
  int louvainOrders = 20;
  int outerCap = 20;
  std::string backend = "dense";
  int jobs = 1;
  std::string out = ".";
  std::string graph;
  std::string spec;
  std::string csv;
  bool noTiming = false;
};

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

MethodParams paramsFrom(const Options& o) {
  MethodParams p;
  p.rho = o.rho;
  p.epsR = o.epsR;
  p.kappa = o.kappa;
  p.muBar = o.muBar;
  p.maxIter = o.maxIter;
  p.louvainOrders = o.louvainOrders;
  p.outerCap = o.outerCap;
  p.backend = o.backend == "thresholded" ? SpectralBackend::thresholdedIterative() : SpectralBackend::fullDense();
  return p;
}

void saveMetadata(const fs::path& path, const Metadata& kv) { saveFile(path.string(), kv, writeMetadata); }

int cmdGenerate(const Options& o) {
  const GeneratorConfig cfg{o.n, o.alpha, o.flip, o.p0, o.seed};
  const Instance inst = makeInstance(o.n, o.alpha, o.p0, o.flip, o.seed);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  saveFile((dir / "graph.txt").string(), inst.graph, writeGraph);
  saveFile((dir / "truth.txt").string(), inst.truth, writePartition);
  saveMetadata(dir / "generate.meta", {{"rng", std::string(Rng::kAlgorithm)},
                                       {"n_requested", std::to_string(cfg.n)},
                                       {"n", std::to_string(inst.truth.n())},
                                       {"clusters", std::to_string(inst.truth.r())},
                                       {"alpha", num(cfg.alpha)},
                                       {"p0", num(cfg.p0)},
                                       {"flip", num(cfg.flipFraction)},
                                       {"seed", std::to_string(cfg.seed)}});
  std::cout << "wrote " << (dir / "graph.txt").string() << " (n=" << inst.truth.n() << ", r=" << inst.truth.r()
            << ")\n";
  return 0;
}

int cmdSolve(const Options& o) {
  const Method method = *parseMethod(o.method);
  const fs::path dir(o.out);
  const std::string graphPath = o.graph.empty() ? (dir / "graph.txt").string() : o.graph;
  const ObservedGraph g = loadGraph(graphPath);
  const MethodParams p = paramsFrom(o);
  const MethodOutput out = runMethod(method, g, p, Rng(o.seed).split(kLouvainStreamKey).next());

  fs::create_directories(dir);
  for (const char* stale : {"L.txt", "S.txt", "partition.txt"}) fs::remove(dir / stale);
  Metadata meta{{"rng", std::string(Rng::kAlgorithm)},
                {"method", toString(method)},
                {"graph", graphPath},
                {"n", std::to_string(g.n())},
                {"backend", std::string(toString(p.backend.kind))},
                {"rho", num(p.rho.value_or(1.0 / std::sqrt(static_cast<double>(g.n()))))},
                {"eps_r", num(p.epsR)},
                {"kappa", num(p.kappa)},
                {"mu_bar", num(p.muBar)},
                {"max_iter", std::to_string(p.maxIter)},
                {"status", out.status},
                {"eig_calls", std::to_string(out.eigCalls)},
                {"seconds", num(out.seconds)}};
  if (out.L) {
    saveFile((dir / "L.txt").string(), *out.L, writeMatrix);
    saveFile((dir / "S.txt").string(), *out.S, writeMatrix);
    meta.emplace_back("iterations", std::to_string(out.iterations));
  }
  if (method == Method::Rpcab) {
    std::string trace;
    for (const RhoStep& s : out.rhoTrace) trace += (trace.empty() ? "" : ";") + num(s.rho) + ":" + num(s.trace);
    meta.emplace_back("outer_cap", std::to_string(p.outerCap));
    meta.emplace_back("outer_iterations", std::to_string(out.outerIterations));
    meta.emplace_back("rho_trace", trace);
  }
  if (method == Method::Louvain) {
    // Keep the highest-modularity run; earlier orderings win ties.
    const SimpleGraph sg = SimpleGraph::fromObserved(g);
    std::size_t best = 0;
    double bestQ = modularity(sg, out.partitions[0]);
    for (std::size_t k = 1; k < out.partitions.size(); ++k) {
      const double q = modularity(sg, out.partitions[k]);
      if (q > bestQ) {
        bestQ = q;
        best = k;
      }
    }
    saveFile((dir / "partition.txt").string(), out.partitions[best], writePartition);
    meta.emplace_back("louvain_orders", std::to_string(p.louvainOrders));
    meta.emplace_back("seed", std::to_string(o.seed));
    meta.emplace_back("modularity", num(bestQ));
  }
  saveMetadata(dir / "run.meta", meta);
  std::cout << toString(method) << ": " << out.status << ", eig_calls=" << out.eigCalls << ", " << num(out.seconds)
            << " s\n";
  return 0;
}

int cmdEval(const Options& o) {
  const fs::path dir(o.out);
  const Partition truth = loadPartition((dir / "truth.txt").string());
  std::ifstream metaIn(dir / "run.meta");
  if (!metaIn) throw std::runtime_error("cannot open '" + (dir / "run.meta").string() + "' for reading");
  const auto meta = readMetadata(metaIn);
  const auto method = meta.find("method");
  if (method == meta.end()) throw std::runtime_error("run.meta has no method entry");

  BlockStats block;
  std::optional<SimilarityScores> sim;
  if (method->second == "louvain") {
    const Partition found = loadPartition((dir / "partition.txt").string());
    block = recoveryStats(found.toBdo(), truth);
    sim = similarity(truth, found);
  } else {
    const DenseSymMatrix l = loadMatrix((dir / "L.txt").string());
    block = recoveryStats(l, truth);
    const Extraction ex = extractClusters(l);
    if (const auto* found = std::get_if<Partition>(&ex)) {
      sim = similarity(truth, *found);
    } else {
      const auto& f = std::get<DiagonalFailure>(ex);
      std::cout << "extraction: diagonal check failed at node " << f.node << " (L_ii = " << num(f.value) << ")\n";
    }
  }
  std::printf("s_max=%.4f s_min=%.4f s_av=%.4f s_off=%.4f s_f=%.4f\n", block.sMax, block.sMin, block.sAv, block.sOff,
              block.sF);
  if (sim) std::printf("jaccard=%.4f nmi_sg=%.4f perc=%.4f\n", sim->jaccard, sim->nmiSg, sim->perc);
  return 0;
}

int cmdBench(const Options& o) {
  std::ifstream in(o.spec);
  if (!in) throw std::runtime_error("cannot open spec '" + o.spec + "'");
  ExperimentSpec spec = parseExperimentSpec(in);
  if (o.noTiming) spec.timing = false;
  const auto cells = runBench(spec, o.jobs);
  const fs::path dir(o.out);
  fs::create_directories(dir);
  const fs::path csv = dir / "results.csv";
  {
    std::ofstream out(csv, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + csv.string() + "' for writing");
    writeCsv(out, cells, spec.timing);
  }
  saveMetadata(dir / "bench.meta", {{"rng", std::string(Rng::kAlgorithm)},
                                    {"spec", o.spec},
                                    {"master_seed", std::to_string(spec.masterSeed)},
                                    {"seeds", std::to_string(spec.seedsPerCell)},
                                    {"backend", std::string(toString(spec.params.backend.kind))}});
  std::cout << "wrote " << csv.string() << " (" << cells.size() << " rows)\n";
  return 0;
}

int cmdReport(const Options& o) {
  std::ifstream in(o.csv);
  if (!in) throw std::runtime_error("cannot open '" + o.csv + "'");
  std::cout << renderReport(readCsv(in));
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Community recovery by low-rank plus sparse decomposition"};
  app.require_subcommand(1);
  Options o;

  auto* gen = app.add_subcommand("generate", "Generate a planted-cluster network and its truth partition");
  gen->add_option("--n", o.n, "Requested number of nodes")->check(CLI::PositiveNumber);
  gen->add_option("--alpha", o.alpha, "Cluster size decay in (0, 1]")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--p0", o.p0, "Observed fraction of node pairs in (0, 1]")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--flip", o.flip, "Fraction of pairs toggled")->check(CLI::Range(0.0, 1.0));
  gen->add_option("--seed", o.seed, "Instance seed");
  gen->add_option("--out", o.out, "Output directory");

  auto* sol = app.add_subcommand("solve", "Run a method on a graph");
  sol->add_option("--method", o.method, "admipc | mialm | rpcab | louvain")
      ->check(CLI::IsMember({"admipc", "mialm", "rpcab", "louvain"}));
  sol->add_option("--graph", o.graph, "Graph file (default <out>/graph.txt)");
  sol->add_option("--out", o.out, "Working directory");
  sol->add_option("--rho", o.rho, "Sparsity weight (default 1/sqrt(n))")->check(CLI::PositiveNumber);
  sol->add_option("--eps-r", o.epsR, "Relative stopping tolerance");
  sol->add_option("--kappa", o.kappa, "Penalty growth factor");
  sol->add_option("--mu-bar", o.muBar, "Penalty cap");
  sol->add_option("--max-iter", o.maxIter, "Iteration cap")->check(CLI::PositiveNumber);
  sol->add_option("--outer-cap", o.outerCap, "RPCAB outer-call cap")->check(CLI::PositiveNumber);
  sol->add_option("--louvain-orders", o.louvainOrders, "Louvain node orderings")->check(CLI::PositiveNumber);
  sol->add_option("--seed", o.seed, "Seed for the Louvain orderings");
  sol->add_option("--backend", o.backend, "dense | thresholded")->check(CLI::IsMember({"dense", "thresholded"}));

  auto* ev = app.add_subcommand("eval", "Score a solve against the truth partition");
  ev->add_option("--out", o.out, "Working directory");

  auto* bench = app.add_subcommand("bench", "Sweep a grid and write results.csv");
  bench->add_option("--spec", o.spec, "Experiment spec file")->required();
  bench->add_option("--jobs", o.jobs, "Worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--out", o.out, "Output directory");
  bench->add_flag("--no-timing", o.noTiming, "Write '-' for cpu_s so reruns are byte-identical");

  auto* rep = app.add_subcommand("report", "Render a results CSV as markdown tables");
  rep->add_option("csv", o.csv, "Results CSV")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    if (*gen) return cmdGenerate(o);
    if (*sol) return cmdSolve(o);
    if (*ev) return cmdEval(o);
    if (*bench) return cmdBench(o);
    if (*rep) return cmdReport(o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
