#ifndef ADMIPC_NETGEN_HPP
#define ADMIPC_NETGEN_HPP

#include <cmath>
#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "admipc/rng.hpp"
#include "admipc/specmat.hpp"

namespace admipc {

/// Disjoint clustering of nodes 0..n-1. Labels are compacted to 0..r-1 in
/// order of first appearance, so two partitions with the same clusters but
/// different label names compare equal only after relabeling (see sameClusters).
class Partition {
 public:
  /// Accepts arbitrary integer labels and compacts them.
  explicit Partition(const std::vector<int>& labels) {
    if (labels.empty()) throw std::invalid_argument("Partition: n must be >= 1");
    std::map<int, int> remap;
    assignment_.reserve(labels.size());
    for (int l : labels) {
      auto [it, inserted] = remap.try_emplace(l, static_cast<int>(remap.size()));
      assignment_.push_back(it->second);
    }
    r_ = static_cast<int>(remap.size());
  }

  /// Contiguous blocks: the first sizes[0] nodes form cluster 0, and so on.
  static Partition fromBlockSizes(const std::vector<Index>& sizes) {
    std::vector<int> labels;
    for (std::size_t c = 0; c < sizes.size(); ++c)
      for (Index k = 0; k < sizes[c]; ++k) labels.push_back(static_cast<int>(c));
    return Partition(labels);
  }

  static Partition singletons(Index n) {
    std::vector<int> labels(static_cast<std::size_t>(n));
    for (Index i = 0; i < n; ++i) labels[static_cast<std::size_t>(i)] = static_cast<int>(i);
    return Partition(labels);
  }

  Index n() const noexcept { return static_cast<Index>(assignment_.size()); }
  int r() const noexcept { return r_; }
  int operator[](Index i) const { return assignment_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& assignment() const noexcept { return assignment_; }

  std::vector<Index> sizes() const {
    std::vector<Index> s(static_cast<std::size_t>(r_), 0);
    for (int l : assignment_) ++s[static_cast<std::size_t>(l)];
    return s;
  }

  std::vector<std::vector<Index>> members() const {
    std::vector<std::vector<Index>> m(static_cast<std::size_t>(r_));
    for (Index i = 0; i < n(); ++i) m[static_cast<std::size_t>((*this)[i])].push_back(i);
    return m;
  }

  /// Block-diagonal matrix of ones encoding this clustering.
  DenseSymMatrix toBdo() const {
    Eigen::MatrixXd m(n(), n());
    for (Index i = 0; i < n(); ++i)
      for (Index j = 0; j < n(); ++j) m(i, j) = (*this)[i] == (*this)[j] ? 1.0 : 0.0;
    return DenseSymMatrix::fromTrusted(std::move(m));
  }

  /// Labels are canonical (first-appearance order), so equal clusterings
  /// have equal assignments.
  friend bool operator==(const Partition& a, const Partition& b) { return a.assignment_ == b.assignment_; }

 private:
  std::vector<int> assignment_;
  int r_ = 0;
};

/// Adjacency observations over a mask. The diagonal is implicitly 1.
class ObservedGraph {
 public:
  /// `bits[k]` is the observation for `mask.offDiagonal()[k]`.
  ObservedGraph(ObservationMask mask, std::vector<std::uint8_t> bits) : mask_(std::move(mask)), bits_(std::move(bits)) {
    if (bits_.size() != mask_.offDiagonal().size()) {
      throw std::invalid_argument("ObservedGraph: one bit per observed pair required");
    }
    for (auto b : bits_)
      if (b > 1) throw std::invalid_argument("ObservedGraph: adjacency bits must be 0 or 1");
  }

  Index n() const noexcept { return mask_.n(); }
  const ObservationMask& mask() const noexcept { return mask_; }
  const std::vector<IndexPair>& pairs() const noexcept { return mask_.offDiagonal(); }
  const std::vector<std::uint8_t>& bits() const noexcept { return bits_; }

  std::size_t edgeCount() const {
    std::size_t m = 0;
    for (auto b : bits_) m += b;
    return m;
  }

  friend bool operator==(const ObservedGraph& a, const ObservedGraph& b) {
    return a.mask_ == b.mask_ && a.bits_ == b.bits_;
  }

 private:
  ObservationMask mask_;
  std::vector<std::uint8_t> bits_;
};

struct GeneratorConfig {
  Index n = 100;
  double alpha = 1.0;
  double flipFraction = 0.05;
  double p0 = 1.0;
  std::uint64_t seed = 1;

  void validate() const {
    if (n < 1) throw std::invalid_argument("GeneratorConfig: n must be >= 1");
    if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("GeneratorConfig: alpha must lie in (0, 1]");
    if (!(flipFraction >= 0.0 && flipFraction < 1.0))
      throw std::invalid_argument("GeneratorConfig: flipFraction must lie in [0, 1)");
    if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("GeneratorConfig: p0 must lie in (0, 1]");
  }
};

/// Nearest integer, halves away from zero.
inline std::int64_t nearestInteger(double x) { return static_cast<std::int64_t>(std::llround(x)); }

/// Geometric cluster sizes n_l = [ (1-a)/(1-a^r) n a^(l-1) ], r = ceil(0.05 n).
/// Zero sizes are dropped; alpha = 1 uses the limit n/r.
inline std::vector<Index> clusterSizes(Index n, double alpha) {
  if (n < 1) throw std::invalid_argument("clusterSizes: n must be >= 1");
  if (!(alpha > 0.0 && alpha <= 1.0)) throw std::invalid_argument("clusterSizes: alpha must lie in (0, 1]");
  const auto r = static_cast<int>(std::ceil(0.05 * static_cast<double>(n) - 1e-12));
  std::vector<Index> sizes;
  for (int l = 0; l < r; ++l) {
    double x;
    if (alpha == 1.0) {
      x = static_cast<double>(n) / r;
    } else {
      x = (1.0 - alpha) / (1.0 - std::pow(alpha, r)) * static_cast<double>(n) * std::pow(alpha, l);
    }
    const auto s = nearestInteger(x);
    if (s > 0) sizes.push_back(static_cast<Index>(s));
  }
  return sizes;
}

inline std::uint64_t pairCount(Index n) { return static_cast<std::uint64_t>(n) * static_cast<std::uint64_t>(n - 1) / 2; }

/// Maps a linear index over upper-triangular pairs (row-major, i < j) to the pair.
inline IndexPair pairFromLinear(Index n, std::uint64_t k) {
  Index i = 0;
  auto rowLen = static_cast<std::uint64_t>(n - 1);
  while (k >= rowLen) {
    k -= rowLen;
    ++i;
    --rowLen;
  }
  return {i, i + 1 + static_cast<Index>(k)};
}

inline std::uint64_t linearFromPair(Index n, Index i, Index j) {
  const auto ui = static_cast<std::uint64_t>(i);
  const auto un = static_cast<std::uint64_t>(n);
  return ui * un - ui * (ui + 1) / 2 + static_cast<std::uint64_t>(j - i - 1);
}

/// Fully observed network with planted contiguous clusters; intra-cluster
/// pairs start as edges and a uniform subset of [flipFraction * |pairs|]
/// pairs is toggled.
struct GeneratedNetwork {
  ObservedGraph graph;
  Partition truth;
  std::size_t flipped = 0;
};

inline GeneratedNetwork generateNetwork(const GeneratorConfig& cfg) {
  cfg.validate();
  const std::vector<Index> sizes = clusterSizes(cfg.n, cfg.alpha);
  Partition truth = Partition::fromBlockSizes(sizes);
  const Index n = truth.n();

  const std::uint64_t total = pairCount(n);
  const auto numFlips = static_cast<std::uint64_t>(nearestInteger(cfg.flipFraction * static_cast<double>(total)));

  std::vector<std::uint8_t> bits(total);
  Index i = 0, j = 1;
  for (std::uint64_t k = 0; k < total; ++k) {
    bits[k] = truth[i] == truth[j] ? 1 : 0;
    if (++j == n) {
      ++i;
      j = i + 1;
    }
  }
  Rng rng = Rng(cfg.seed).split(0xF11B5);
  for (std::uint64_t k : rng.sampleWithoutReplacement(total, numFlips)) bits[k] ^= 1;

  return {ObservedGraph(ObservationMask::full(n), std::move(bits)), std::move(truth), numFlips};
}

/// Exactly [p0 (n^2 - n) / 2] upper-triangular pairs, uniformly without replacement.
inline ObservationMask sampleMask(Index n, double p0, std::uint64_t seed) {
  if (!(p0 > 0.0 && p0 <= 1.0)) throw std::invalid_argument("sampleMask: p0 must lie in (0, 1]");
  const std::uint64_t total = pairCount(n);
  const auto count = static_cast<std::uint64_t>(nearestInteger(p0 * static_cast<double>(total)));
  if (count >= total) return ObservationMask::full(n);
  Rng rng = Rng(seed).split(0x3A5C);
  std::vector<IndexPair> pairs;
  pairs.reserve(count);
  for (std::uint64_t k : rng.sampleWithoutReplacement(total, count)) pairs.push_back(pairFromLinear(n, k));
  return ObservationMask(n, std::move(pairs));
}

/// Restricts a graph to the observed pairs of `mask`. Every pair in `mask`
/// must be observed in `full`.
inline ObservedGraph restrictToMask(const ObservedGraph& full, const ObservationMask& mask) {
  if (full.n() != mask.n()) throw std::invalid_argument("restrictToMask: dimension mismatch");
  std::vector<std::uint8_t> bits;
  bits.reserve(mask.offDiagonal().size());
  const auto& src = full.pairs();
  std::size_t cursor = 0;
  for (const auto& p : mask.offDiagonal()) {
    while (cursor < src.size() && src[cursor] < p) ++cursor;
    if (cursor == src.size() || src[cursor] != p) throw std::invalid_argument("restrictToMask: pair not observed");
    bits.push_back(full.bits()[cursor]);
  }
  return ObservedGraph(mask, std::move(bits));
}

struct DenseObservation {
  DenseSymMatrix D;
  ObservationMask mask;
};

/// D has a unit diagonal, the observed bits on the mask and 0 elsewhere.
inline DenseObservation toDense(const ObservedGraph& g) {
  DenseSymMatrix d = DenseSymMatrix::identity(g.n());
  const auto& pairs = g.pairs();
  for (std::size_t k = 0; k < pairs.size(); ++k) d.set(pairs[k].first, pairs[k].second, g.bits()[k]);
  return {std::move(d), g.mask()};
}

inline ObservedGraph fromDense(const DenseSymMatrix& d, const ObservationMask& mask) {
  if (d.n() != mask.n()) throw std::invalid_argument("fromDense: dimension mismatch");
  std::vector<std::uint8_t> bits;
  bits.reserve(mask.offDiagonal().size());
  for (const auto& [i, j] : mask.offDiagonal()) {
    const double v = d(i, j);
    if (v != 0.0 && v != 1.0) throw std::invalid_argument("fromDense: entries on the mask must be 0 or 1");
    bits.push_back(v == 1.0 ? 1 : 0);
  }
  return ObservedGraph(mask, std::move(bits));
}

}  // namespace admipc

#endif  // ADMIPC_NETGEN_HPP
