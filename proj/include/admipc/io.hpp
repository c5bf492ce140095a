#ifndef ADMIPC_IO_HPP
#define ADMIPC_IO_HPP

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "admipc/errors.hpp"
#include "admipc/netgen.hpp"
#include "admipc/specmat.hpp"

// Text formats (UTF-8, LF, lines starting with '#' ignored, 1-based indices):
//   graph:      "n <n>" then one "i j b" line per observed pair, i < j, b in {0,1}
//   partition:  "n <n> r <r>" then one "i c" line per node, c in [1, r]
//   matrix:     "<n>" then n rows of n space-separated values (12 significant digits)
//   metadata:   "key=value" lines

namespace admipc {

namespace detail {

/// Yields (lineNumber, tokens) for each non-blank, non-comment line.
class LineReader {
 public:
  explicit LineReader(std::istream& in) : in_(in) {}

  bool next(std::vector<std::string>& tokens) {
    std::string line;
    while (std::getline(in_, line)) {
      ++lineNo_;
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::size_t first = line.find_first_not_of(" \t");
      if (first == std::string::npos || line[first] == '#') continue;
      tokens.clear();
      std::istringstream ss(line);
      for (std::string t; ss >> t;) tokens.push_back(t);
      return true;
    }
    return false;
  }
  std::size_t line() const noexcept { return lineNo_; }

 private:
  std::istream& in_;
  std::size_t lineNo_ = 0;
};

inline long long parseInteger(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const long long v = std::stoll(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected integer, got '" + tok + "'");
  }
}

inline double parseReal(const std::string& tok, std::size_t line) {
  try {
    std::size_t used = 0;
    const double v = std::stod(tok, &used);
    if (used != tok.size()) throw std::invalid_argument(tok);
    return v;
  } catch (const std::exception&) {
    throw ParseError(line, "expected number, got '" + tok + "'");
  }
}

inline std::ifstream openIn(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "' for reading");
  return in;
}

inline std::ofstream openOut(const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
  return out;
}

}  // namespace detail

inline ObservedGraph readGraph(std::istream& in) {
  detail::LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok)) throw ParseError(reader.line(), "missing header 'n <n>'");
  if (tok.size() != 2 || tok[0] != "n") throw ParseError(reader.line(), "expected header 'n <n>'");
  const long long n = detail::parseInteger(tok[1], reader.line());
  if (n < 1) throw ValidationError("graph: n must be >= 1");

  std::vector<IndexPair> pairs;
  std::vector<std::uint8_t> bits;
  std::vector<bool> seen(static_cast<std::size_t>(n * (n - 1) / 2), false);
  while (reader.next(tok)) {
    if (tok.size() != 3) throw ParseError(reader.line(), "expected 'i j b'");
    const long long i = detail::parseInteger(tok[0], reader.line());
    const long long j = detail::parseInteger(tok[1], reader.line());
    const long long b = detail::parseInteger(tok[2], reader.line());
    if (b != 0 && b != 1) throw ParseError(reader.line(), "edge bit must be 0 or 1");
    if (i >= j) throw ParseError(reader.line(), "pair must satisfy i < j");
    if (i < 1 || j > n) {
      throw ValidationError("graph: line " + std::to_string(reader.line()) + ": index out of range for n = " +
                            std::to_string(n));
    }
    const auto k = linearFromPair(static_cast<Index>(n), static_cast<Index>(i - 1), static_cast<Index>(j - 1));
    if (seen[k]) throw ParseError(reader.line(), "duplicate pair " + tok[0] + " " + tok[1]);
    seen[k] = true;
    pairs.emplace_back(i - 1, j - 1);
    bits.push_back(static_cast<std::uint8_t>(b));
  }
  // ObservedGraph keeps pairs sorted; reorder bits to match.
  std::vector<std::size_t> order(pairs.size());
  for (std::size_t k = 0; k < order.size(); ++k) order[k] = k;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return pairs[a] < pairs[b]; });
  std::vector<IndexPair> sortedPairs;
  std::vector<std::uint8_t> sortedBits;
  sortedPairs.reserve(pairs.size());
  sortedBits.reserve(bits.size());
  for (std::size_t k : order) {
    sortedPairs.push_back(pairs[k]);
    sortedBits.push_back(bits[k]);
  }
  return ObservedGraph(ObservationMask(static_cast<Index>(n), std::move(sortedPairs)), std::move(sortedBits));
}

inline void writeGraph(std::ostream& out, const ObservedGraph& g) {
  out << "n " << g.n() << '\n';
  const auto& pairs = g.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) {
    out << pairs[k].first + 1 << ' ' << pairs[k].second + 1 << ' ' << int(g.bits()[k]) << '\n';
  }
}

inline Partition readPartition(std::istream& in) {
  detail::LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok)) throw ParseError(reader.line(), "missing header 'n <n> r <r>'");
  if (tok.size() != 4 || tok[0] != "n" || tok[2] != "r") throw ParseError(reader.line(), "expected 'n <n> r <r>'");
  const long long n = detail::parseInteger(tok[1], reader.line());
  const long long r = detail::parseInteger(tok[3], reader.line());
  if (n < 1 || r < 1 || r > n) throw ValidationError("partition: need 1 <= r <= n");

  std::vector<int> labels(static_cast<std::size_t>(n), 0);
  std::vector<bool> used(static_cast<std::size_t>(r), false);
  while (reader.next(tok)) {
    if (tok.size() != 2) throw ParseError(reader.line(), "expected 'i c'");
    const long long i = detail::parseInteger(tok[0], reader.line());
    const long long c = detail::parseInteger(tok[1], reader.line());
    if (i < 1 || i > n || c < 1 || c > r) {
      throw ValidationError("partition: line " + std::to_string(reader.line()) + ": index out of range");
    }
    auto& slot = labels[static_cast<std::size_t>(i - 1)];
    if (slot != 0) throw ParseError(reader.line(), "node " + tok[0] + " listed twice");
    slot = static_cast<int>(c);
    used[static_cast<std::size_t>(c - 1)] = true;
  }
  for (std::size_t i = 0; i < labels.size(); ++i)
    if (labels[i] == 0) throw ValidationError("partition: node " + std::to_string(i + 1) + " has no cluster");
  for (std::size_t c = 0; c < used.size(); ++c)
    if (!used[c]) throw ValidationError("partition: cluster " + std::to_string(c + 1) + " is empty");
  return Partition(labels);
}

inline void writePartition(std::ostream& out, const Partition& p) {
  out << "n " << p.n() << " r " << p.r() << '\n';
  for (Index i = 0; i < p.n(); ++i) out << i + 1 << ' ' << p[i] + 1 << '\n';
}

inline void writeMatrix(std::ostream& out, const DenseSymMatrix& m) {
  out << m.n() << '\n';
  char buf[32];
  for (Index i = 0; i < m.n(); ++i) {
    for (Index j = 0; j < m.n(); ++j) {
      std::snprintf(buf, sizeof buf, "%.12g", m(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
}

inline DenseSymMatrix readMatrix(std::istream& in) {
  detail::LineReader reader(in);
  std::vector<std::string> tok;
  if (!reader.next(tok) || tok.size() != 1) throw ParseError(reader.line(), "expected matrix size line");
  const long long n = detail::parseInteger(tok[0], reader.line());
  if (n < 1) throw ValidationError("matrix: n must be >= 1");
  Eigen::MatrixXd m(n, n);
  for (long long i = 0; i < n; ++i) {
    if (!reader.next(tok)) throw ParseError(reader.line(), "missing matrix row " + std::to_string(i + 1));
    if (static_cast<long long>(tok.size()) != n) throw ParseError(reader.line(), "row has wrong length");
    for (long long j = 0; j < n; ++j) m(i, j) = detail::parseReal(tok[static_cast<std::size_t>(j)], reader.line());
  }
  return DenseSymMatrix(m);
}

using Metadata = std::vector<std::pair<std::string, std::string>>;

inline void writeMetadata(std::ostream& out, const Metadata& kv) {
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

inline std::map<std::string, std::string> readMetadata(std::istream& in) {
  std::map<std::string, std::string> kv;
  std::string line;
  std::size_t lineNo = 0;
  while (std::getline(in, line)) {
    ++lineNo;
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError(lineNo, "expected key=value");
    kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

template <class T, class Writer>
void saveFile(const std::string& path, const T& value, Writer write) {
  auto out = detail::openOut(path);
  write(out, value);
  if (!out) throw std::runtime_error("write failed for '" + path + "'");
}

inline ObservedGraph loadGraph(const std::string& path) {
  auto in = detail::openIn(path);
  return readGraph(in);
}
inline Partition loadPartition(const std::string& path) {
  auto in = detail::openIn(path);
  return readPartition(in);
}
inline DenseSymMatrix loadMatrix(const std::string& path) {
  auto in = detail::openIn(path);
  return readMatrix(in);
}

}  // namespace admipc

#endif  // ADMIPC_IO_HPP
