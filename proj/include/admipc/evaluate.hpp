#ifndef ADMIPC_EVALUATE_HPP
#define ADMIPC_EVALUATE_HPP

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "admipc/netgen.hpp"
#include "admipc/specmat.hpp"

namespace admipc {

/// R(a, b) = Frobenius norm of (target block - L block) for truth clusters a, b,
/// where the target is all-ones on diagonal blocks and zero elsewhere.
/// Clusters need not be contiguous; members are gathered by label.
inline Eigen::MatrixXd blockResiduals(const DenseSymMatrix& l, const Partition& truth) {
  if (l.n() != truth.n()) throw std::invalid_argument("blockResiduals: dimension mismatch");
  const int r = truth.r();
  Eigen::MatrixXd sq = Eigen::MatrixXd::Zero(r, r);
  const Index n = l.n();
  for (Index j = 0; j < n; ++j) {
    const int b = truth[j];
    for (Index i = 0; i < n; ++i) {
      const int a = truth[i];
      const double diff = (a == b ? 1.0 : 0.0) - l(i, j);
      sq(a, b) += diff * diff;
    }
  }
  return sq.cwiseSqrt();
}

struct BlockStats {
  double sMax = 0, sMin = 0, sAv = 0, sOff = 0, sF = 0;
  /// (E_l, E_l^c) per truth cluster.
  std::vector<std::pair<double, double>> perClusterE;
};

/// For r = 1 the off-block sums are empty, so E^c and sOff are defined as 0.
inline BlockStats recoveryStats(const Eigen::MatrixXd& R, const std::vector<Index>& sizes, double tau1 = 0.4,
                                double tau2 = 0.1) {
  const auto r = static_cast<Index>(sizes.size());
  if (r < 1 || R.rows() != r || R.cols() != r) throw std::invalid_argument("recoveryStats: size mismatch");
  BlockStats st;
  st.sMax = -1.0;
  st.sMin = std::numeric_limits<double>::infinity();
  double sum = 0.0, offNum = 0.0, offDen = 0.0;
  int recovered = 0;
  for (Index a = 0; a < r; ++a) {
    const double na = static_cast<double>(sizes[a]);
    const double e = R(a, a) / na;
    double num = 0.0, den = 0.0;
    for (Index b = 0; b < r; ++b) {
      if (b == a) continue;
      num += R(a, b) * R(a, b);
      den += na * static_cast<double>(sizes[b]);
      if (b > a) {
        offNum += R(a, b) * R(a, b);
        offDen += na * static_cast<double>(sizes[b]);
      }
    }
    const double ec = den > 0.0 ? std::sqrt(num) / std::sqrt(den) : 0.0;
    st.perClusterE.emplace_back(e, ec);
    st.sMax = std::max(st.sMax, e);
    st.sMin = std::min(st.sMin, e);
    sum += e;
    if (e < tau1 && ec < tau2) ++recovered;
  }
  st.sAv = sum / static_cast<double>(r);
  st.sOff = offDen > 0.0 ? std::sqrt(offNum) / std::sqrt(offDen) : 0.0;
  st.sF = static_cast<double>(recovered) / static_cast<double>(r);
  return st;
}

inline BlockStats recoveryStats(const DenseSymMatrix& l, const Partition& truth, double tau1 = 0.4, double tau2 = 0.1) {
  return recoveryStats(blockResiduals(l, truth), truth.sizes(), tau1, tau2);
}

/// Some diagonal entry of L is farther than tauD from 1.
struct DiagonalFailure {
  Index node;
  double value;
};

using Extraction = std::variant<Partition, DiagonalFailure>;

/// Threshold L at tauBar and take connected components of the resulting graph.
inline Extraction extractClusters(const DenseSymMatrix& l, double tauD = 0.05, double tauBar = 0.55) {
  const Index n = l.n();
  for (Index i = 0; i < n; ++i)
    if (std::abs(l(i, i) - 1.0) > tauD) return DiagonalFailure{i, l(i, i)};

  std::vector<Index> parent(static_cast<std::size_t>(n));
  std::iota(parent.begin(), parent.end(), Index{0});
  auto find = [&](Index x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  for (Index i = 0; i < n; ++i)
    for (Index j = i + 1; j < n; ++j)
      if (l(i, j) >= tauBar) {
        const Index a = find(i), b = find(j);
        if (a != b) parent[std::max(a, b)] = std::min(a, b);
      }
  std::vector<int> labels(static_cast<std::size_t>(n));
  for (Index i = 0; i < n; ++i) labels[i] = static_cast<int>(find(i));
  return Partition(labels);
}

namespace detail {

inline void requireSameN(const Partition& a, const Partition& b, const char* op) {
  if (a.n() != b.n()) throw std::invalid_argument(std::string(op) + ": partitions differ in n");
}

/// m(i, j) = |cluster i of a  intersect  cluster j of b|
inline Eigen::MatrixXd contingency(const Partition& a, const Partition& b) {
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(a.r(), b.r());
  for (Index v = 0; v < a.n(); ++v) m(a[v], b[v]) += 1.0;
  return m;
}

inline double choose2(double x) { return x * (x - 1.0) / 2.0; }

}  // namespace detail

/// a / (a + b + c) over node pairs; 1 when neither partition co-clusters any pair.
inline double jaccard(const Partition& c1, const Partition& c2) {
  detail::requireSameN(c1, c2, "jaccard");
  const Eigen::MatrixXd m = detail::contingency(c1, c2);
  double both = 0.0, in1 = 0.0, in2 = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j) both += detail::choose2(m(i, j));
  for (Index i = 0; i < m.rows(); ++i) in1 += detail::choose2(m.row(i).sum());
  for (Index j = 0; j < m.cols(); ++j) in2 += detail::choose2(m.col(j).sum());
  const double unionCount = in1 + in2 - both;
  return unionCount == 0.0 ? 1.0 : both / unionCount;
}

/// Mutual information over sqrt(H H'), base-2 logs. A single-cluster side
/// has zero entropy; then the score is 1 for identical partitions, else 0.
inline double nmiSg(const Partition& c1, const Partition& c2) {
  detail::requireSameN(c1, c2, "nmiSg");
  const Eigen::MatrixXd m = detail::contingency(c1, c2);
  const double n = static_cast<double>(c1.n());
  const Eigen::VectorXd rows = m.rowwise().sum();
  const Eigen::VectorXd cols = m.colwise().sum().transpose();
  auto entropy = [n](const Eigen::VectorXd& sizes) {
    double h = 0.0;
    for (Index k = 0; k < sizes.size(); ++k)
      if (sizes[k] > 0) h -= sizes[k] / n * std::log2(sizes[k] / n);
    return h;
  };
  const double h1 = entropy(rows), h2 = entropy(cols);
  if (h1 == 0.0 || h2 == 0.0) return c1 == c2 ? 1.0 : 0.0;
  double mi = 0.0;
  for (Index i = 0; i < m.rows(); ++i)
    for (Index j = 0; j < m.cols(); ++j)
      if (m(i, j) > 0) mi += m(i, j) / n * std::log2(n * m(i, j) / (rows[i] * cols[j]));
  return std::clamp(mi / std::sqrt(h1 * h2), 0.0, 1.0);
}

/// Fraction of truth clusters that appear as exact node sets in `found`.
inline double perc(const Partition& truth, const Partition& found) {
  detail::requireSameN(truth, found, "perc");
  const Eigen::MatrixXd m = detail::contingency(truth, found);
  const std::vector<Index> foundSizes = found.sizes();
  const std::vector<Index> truthSizes = truth.sizes();
  int matched = 0;
  for (const auto& members : truth.members()) {
    const int label = found[members.front()];
    const int t = truth[members.front()];
    if (m(t, label) == static_cast<double>(truthSizes[t]) && foundSizes[label] == truthSizes[t]) ++matched;
  }
  return static_cast<double>(matched) / truth.r();
}

struct SimilarityScores {
  double jaccard = 0.0;
  double nmiSg = 0.0;
  double perc = 0.0;
};

inline SimilarityScores similarity(const Partition& truth, const Partition& found) {
  return {jaccard(truth, found), nmiSg(truth, found), perc(truth, found)};
}

}  // namespace admipc

#endif  // ADMIPC_EVALUATE_HPP
