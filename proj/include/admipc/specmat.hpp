#ifndef ADMIPC_SPECMAT_HPP
#define ADMIPC_SPECMAT_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <iostream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "admipc/spectral.hpp"

namespace admipc {

using Index = Eigen::Index;

/// Called when raw data handed to DenseSymMatrix is asymmetric beyond 1e-10.
inline std::function<void(std::string_view)>& symmetryWarningHandler() {
  static std::function<void(std::string_view)> handler = [](std::string_view msg) {
    std::cerr << "warning: " << msg << '\n';
  };
  return handler;
}

/// Real symmetric n x n matrix with dense storage. Raw input is symmetrized
/// as (M + M^T) / 2; every mutator writes both triangles.
class DenseSymMatrix {
 public:
  static constexpr double kAsymmetryWarnLevel = 1e-10;

  explicit DenseSymMatrix(Index n) : m_(Eigen::MatrixXd::Zero(checkedSize(n), n)) {}

  explicit DenseSymMatrix(const Eigen::MatrixXd& raw) : m_(raw) {
    if (raw.rows() != raw.cols()) throw std::invalid_argument("DenseSymMatrix: matrix must be square");
    checkedSize(raw.rows());
    const double asym = (raw - raw.transpose()).cwiseAbs().maxCoeff();
    if (asym > kAsymmetryWarnLevel) {
      symmetryWarningHandler()("DenseSymMatrix: input asymmetry " + std::to_string(asym) + " symmetrized");
    }
    if (asym != 0.0) m_ = 0.5 * (raw + raw.transpose());
  }

  static DenseSymMatrix zeros(Index n) { return DenseSymMatrix(n); }
  static DenseSymMatrix identity(Index n) {
    DenseSymMatrix out(n);
    out.m_.diagonal().setOnes();
    return out;
  }

  Index n() const noexcept { return m_.rows(); }
  double operator()(Index i, Index j) const { return m_(i, j); }

  void set(Index i, Index j, double v) {
    m_(i, j) = v;
    m_(j, i) = v;
  }

  const Eigen::MatrixXd& dense() const noexcept { return m_; }

  friend DenseSymMatrix operator+(const DenseSymMatrix& a, const DenseSymMatrix& b) {
    return fromTrusted(a.checkSame(b).m_ + b.m_);
  }
  friend DenseSymMatrix operator-(const DenseSymMatrix& a, const DenseSymMatrix& b) {
    return fromTrusted(a.checkSame(b).m_ - b.m_);
  }
  friend DenseSymMatrix operator*(double s, const DenseSymMatrix& a) { return fromTrusted(s * a.m_); }
  friend DenseSymMatrix operator*(const DenseSymMatrix& a, double s) { return fromTrusted(a.m_ * s); }
  friend DenseSymMatrix operator/(const DenseSymMatrix& a, double s) { return fromTrusted(a.m_ / s); }

  friend bool operator==(const DenseSymMatrix& a, const DenseSymMatrix& b) {
    return a.n() == b.n() && a.m_ == b.m_;
  }

  /// Entrywise map. `f` must not depend on (i, j) asymmetrically.
  template <class F>
  DenseSymMatrix unaryExpr(F&& f) const {
    return fromTrusted(m_.unaryExpr(std::forward<F>(f)));
  }

  /// For results of exactly symmetric entrywise arithmetic; skips the check.
  static DenseSymMatrix fromTrusted(Eigen::MatrixXd m) {
    DenseSymMatrix out;
    out.m_ = std::move(m);
    return out;
  }

 private:
  DenseSymMatrix() = default;

  static Index checkedSize(Index n) {
    if (n < 1) throw std::invalid_argument("DenseSymMatrix: n must be >= 1");
    return n;
  }
  const DenseSymMatrix& checkSame(const DenseSymMatrix& other) const {
    if (n() != other.n()) throw std::invalid_argument("DenseSymMatrix: dimension mismatch");
    return *this;
  }

  Eigen::MatrixXd m_;
};

/// Unordered index pair {i, j} with i < j, 0-based.
using IndexPair = std::pair<Index, Index>;

/// The observed index set: the given off-diagonal pairs, their mirrors, and
/// the full diagonal.
class ObservationMask {
 public:
  ObservationMask(Index n, std::vector<IndexPair> offDiagonal) : n_(n), pairs_(std::move(offDiagonal)) {
    if (n < 1) throw std::invalid_argument("ObservationMask: n must be >= 1");
    indicator_ = Eigen::MatrixXd::Identity(n, n);
    for (auto& [i, j] : pairs_) {
      if (i == j) throw std::invalid_argument("ObservationMask: diagonal entries are implicit");
      if (i > j) std::swap(i, j);
      if (i < 0 || j >= n) throw std::invalid_argument("ObservationMask: index out of range");
      if (indicator_(i, j) != 0.0) {
        throw std::invalid_argument("ObservationMask: duplicate pair (" + std::to_string(i + 1) + ", " +
                                    std::to_string(j + 1) + ")");
      }
      indicator_(i, j) = indicator_(j, i) = 1.0;
    }
    std::sort(pairs_.begin(), pairs_.end());
  }

  static ObservationMask diagonalOnly(Index n) { return ObservationMask(n, {}); }

  static ObservationMask full(Index n) {
    std::vector<IndexPair> all;
    all.reserve(static_cast<std::size_t>(n * (n - 1) / 2));
    for (Index i = 0; i < n; ++i)
      for (Index j = i + 1; j < n; ++j) all.emplace_back(i, j);
    return ObservationMask(n, std::move(all));
  }

  Index n() const noexcept { return n_; }
  /// Sorted off-diagonal pairs (i < j).
  const std::vector<IndexPair>& offDiagonal() const noexcept { return pairs_; }
  bool contains(Index i, Index j) const { return indicator_(i, j) != 0.0; }
  bool isFull() const noexcept { return static_cast<Index>(pairs_.size()) == n_ * (n_ - 1) / 2; }
  /// 1.0 on the mask (diagonal included), 0.0 elsewhere.
  const Eigen::MatrixXd& indicator() const noexcept { return indicator_; }

  friend bool operator==(const ObservationMask& a, const ObservationMask& b) {
    return a.n_ == b.n_ && a.pairs_ == b.pairs_;
  }

 private:
  Index n_;
  std::vector<IndexPair> pairs_;
  Eigen::MatrixXd indicator_;
};

/// FullDense: complete eigendecomposition, then selection.
/// ThresholdedIterative: only the selected pairs, by inverse iteration on the
/// tridiagonal form; each eigenvalue accurate to `tolerance` relative to ||Q||.
struct SpectralBackend {
  enum class Kind { FullDense, ThresholdedIterative };
  Kind kind = Kind::FullDense;
  double tolerance = 1e-10;

  static SpectralBackend fullDense() { return {}; }
  static SpectralBackend thresholdedIterative(double tol = 1e-10) { return {Kind::ThresholdedIterative, tol}; }
};

inline std::string_view toString(SpectralBackend::Kind k) {
  return k == SpectralBackend::Kind::FullDense ? "full-dense" : "thresholded-iterative";
}

namespace detail {
inline void requireSameSize(const DenseSymMatrix& m, const ObservationMask& mask, const char* op) {
  if (m.n() != mask.n()) {
    throw std::invalid_argument(std::string(op) + ": dimension mismatch (" + std::to_string(m.n()) + " vs " +
                                std::to_string(mask.n()) + ")");
  }
}
}  // namespace detail

/// pi_Omega: keeps entries on the mask, zeroes the rest.
inline DenseSymMatrix projectMask(const DenseSymMatrix& m, const ObservationMask& mask) {
  detail::requireSameSize(m, mask, "projectMask");
  return DenseSymMatrix::fromTrusted(m.dense().cwiseProduct(mask.indicator()));
}

/// pi_{Omega^c}: keeps entries off the mask.
inline DenseSymMatrix projectMaskComplement(const DenseSymMatrix& m, const ObservationMask& mask) {
  detail::requireSameSize(m, mask, "projectMaskComplement");
  return DenseSymMatrix::fromTrusted(
      (mask.indicator().array() == 0.0).select(m.dense(), Eigen::MatrixXd::Zero(m.n(), m.n())));
}

inline double frobeniusNorm(const DenseSymMatrix& m) { return m.dense().norm(); }
inline double infNorm(const DenseSymMatrix& m) { return m.dense().cwiseAbs().maxCoeff(); }
inline double trace(const DenseSymMatrix& m) { return m.dense().trace(); }

/// Largest absolute eigenvalue.
inline double spectralNorm(const DenseSymMatrix& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m.dense(), Eigen::EigenvaluesOnly);
  return es.eigenvalues().cwiseAbs().maxCoeff();
}

/// Eigenpairs selected by `cut`, descending.
inline Eigenpairs eigenpairsOutside(const DenseSymMatrix& q, const SpectrumCut& cut, const SpectralBackend& backend) {
  if (backend.kind == SpectralBackend::Kind::ThresholdedIterative) {
    return partialEigenpairs(q.dense(), cut, backend.tolerance);
  }
  return denseEigenpairs(q.dense(), cut);
}

/// All eigenpairs with eigenvalue strictly above `threshold`, descending.
inline Eigenpairs eigenpairsAbove(const DenseSymMatrix& q, double threshold, const SpectralBackend& backend) {
  SpectrumCut cut;
  cut.hi = threshold;
  return eigenpairsOutside(q, cut, backend);
}

/// Sum over the given eigenpairs of coef(lambda) w w^T.
inline DenseSymMatrix reconstruct(Index n, const Eigenpairs& pairs, const std::function<double(double)>& coef) {
  if (pairs.values.size() == 0) return DenseSymMatrix::zeros(n);
  Eigen::VectorXd c = pairs.values.unaryExpr(coef);
  Eigen::MatrixXd out = (pairs.vectors * c.asDiagonal()) * pairs.vectors.transpose();
  out = 0.5 * (out + out.transpose()).eval();
  return DenseSymMatrix::fromTrusted(std::move(out));
}

struct PsdProjection {
  DenseSymMatrix L;
  int eigCalls = 0;
};

/// L = sum_i max(lambda_i - shift, 0) w_i w_i^T: the Frobenius projection of
/// Q - shift*I onto the PSD cone.
inline PsdProjection psdProjectShifted(const DenseSymMatrix& q, double shift, const SpectralBackend& backend) {
  if (!(shift > 0.0)) throw std::invalid_argument("psdProjectShifted: shift must be positive");
  const Eigenpairs pairs = eigenpairsAbove(q, shift, backend);
  return {reconstruct(q.n(), pairs, [shift](double l) { return l - shift; }), 1};
}

}  // namespace admipc

#endif  // ADMIPC_SPECMAT_HPP
