#ifndef ADMIPC_SPECTRAL_HPP
#define ADMIPC_SPECTRAL_HPP

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "admipc/rng.hpp"

namespace admipc {

/// Thrown when an eigensolver fails to reach its tolerance.
class SpectralBackendError : public std::runtime_error {
 public:
  SpectralBackendError(const std::string& what, double residual)
      : std::runtime_error(what + " (residual " + std::to_string(residual) + ")"), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

/// Eigenpairs sorted by descending eigenvalue; column i of `vectors` pairs
/// with `values[i]`.
struct Eigenpairs {
  Eigen::VectorXd values;
  Eigen::MatrixXd vectors;
};

/// Eigenvalues strictly above `hi` or strictly below `lo`.
struct SpectrumCut {
  double lo = -std::numeric_limits<double>::infinity();
  double hi = std::numeric_limits<double>::infinity();
  bool keeps(double v) const { return v > hi || v < lo; }
};

inline Eigenpairs denseEigenpairs(const Eigen::MatrixXd& a, const SpectrumCut& cut) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  if (es.info() != Eigen::Success) throw SpectralBackendError("dense eigensolver failed", 0.0);
  const Eigen::Index n = a.rows();
  std::vector<Eigen::Index> idx;
  for (Eigen::Index k = n - 1; k >= 0; --k)
    if (cut.keeps(es.eigenvalues()[k])) idx.push_back(k);
  Eigenpairs out{Eigen::VectorXd(idx.size()), Eigen::MatrixXd(n, idx.size())};
  for (std::size_t c = 0; c < idx.size(); ++c) {
    out.values[c] = es.eigenvalues()[idx[c]];
    out.vectors.col(c) = es.eigenvectors().col(idx[c]);
  }
  return out;
}

namespace detail {

/// LU with partial pivoting of the tridiagonal T - shift I, for repeated solves.
class ShiftedTridiagonalLu {
 public:
  ShiftedTridiagonalLu(const Eigen::VectorXd& d, const Eigen::VectorXd& e, double shift, double tiny)
      : n_(d.size()), u0_(d.array() - shift), u1_(Eigen::VectorXd::Zero(n_)), u2_(Eigen::VectorXd::Zero(n_)),
        l_(Eigen::VectorXd::Zero(n_)), swap_(static_cast<std::size_t>(n_), false) {
    if (n_ > 1) u1_.head(n_ - 1) = e;
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      // Row i has (u0, u1, u2) at columns (i, i+1, i+2); row i+1 is (e_i, d_{i+1} - shift, e_{i+1}).
      double sub = e[i];
      double next0 = u0_[i + 1];
      double next1 = i + 2 < n_ ? e[i + 1] : 0.0;
      if (std::abs(sub) > std::abs(u0_[i])) {
        swap_[static_cast<std::size_t>(i)] = true;
        std::swap(u0_[i], sub);
        const double oldU1 = u1_[i];
        u1_[i] = next0;
        next0 = oldU1;
        u2_[i] = next1;
        next1 = 0.0;
      }
      if (u0_[i] == 0.0) u0_[i] = tiny;
      const double m = sub / u0_[i];
      l_[i] = m;
      u0_[i + 1] = next0 - m * u1_[i];
      if (i + 2 < n_) u1_[i + 1] = next1 - m * u2_[i];
    }
    if (n_ > 0 && u0_[n_ - 1] == 0.0) u0_[n_ - 1] = tiny;
  }

  void solveInPlace(Eigen::VectorXd& b) const {
    for (Eigen::Index i = 0; i + 1 < n_; ++i) {
      if (swap_[static_cast<std::size_t>(i)]) std::swap(b[i], b[i + 1]);
      b[i + 1] -= l_[i] * b[i];
    }
    for (Eigen::Index i = n_ - 1; i >= 0; --i) {
      double s = b[i];
      if (i + 1 < n_) s -= u1_[i] * b[i + 1];
      if (i + 2 < n_) s -= u2_[i] * b[i + 2];
      b[i] = s / u0_[i];
    }
  }

 private:
  Eigen::Index n_;
  Eigen::VectorXd u0_, u1_, u2_, l_;
  std::vector<bool> swap_;
};

inline Eigen::VectorXd tridiagonalTimes(const Eigen::VectorXd& d, const Eigen::VectorXd& e, const Eigen::VectorXd& x) {
  const Eigen::Index n = d.size();
  Eigen::VectorXd y = d.cwiseProduct(x);
  if (n > 1) {
    y.head(n - 1) += e.cwiseProduct(x.tail(n - 1));
    y.tail(n - 1) += e.cwiseProduct(x.head(n - 1));
  }
  return y;
}

}  // namespace detail

/// Eigenpairs of symmetric `a` selected by `cut`, without forming the full
/// eigenvector basis: Householder reduction to tridiagonal T, all eigenvalues
/// of T by implicit QL, then inverse iteration on T for the selected values
/// only and back-transformation. Vectors whose eigenvalues lie within
/// 1e-3 ||T|| of each other are kept mutually orthogonal.
///
/// Throws SpectralBackendError if some pair's residual ||T v - lambda v||
/// exceeds `tol` times ||T||_inf.
inline Eigenpairs partialEigenpairs(const Eigen::MatrixXd& a, const SpectrumCut& cut, double tol,
                                    std::uint64_t seed = 0x1a2c705ULL) {
  const Eigen::Index n = a.rows();
  if (a.cols() != n) throw std::invalid_argument("partialEigenpairs: matrix must be square");
  if (n == 1) {
    if (!cut.keeps(a(0, 0))) return {Eigen::VectorXd(0), Eigen::MatrixXd(1, 0)};
    return {Eigen::VectorXd::Constant(1, a(0, 0)), Eigen::MatrixXd::Ones(1, 1)};
  }

  Eigen::Tridiagonalization<Eigen::MatrixXd> tri(a);
  const Eigen::VectorXd d = tri.diagonal();
  const Eigen::VectorXd e = tri.subDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es;
  es.computeFromTridiagonal(d, e, Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) throw SpectralBackendError("tridiagonal eigenvalue iteration failed", 0.0);

  std::vector<double> selected;
  for (Eigen::Index k = n - 1; k >= 0; --k)
    if (cut.keeps(es.eigenvalues()[k])) selected.push_back(es.eigenvalues()[k]);
  const auto k = static_cast<Eigen::Index>(selected.size());
  Eigenpairs out{Eigen::VectorXd(k), Eigen::MatrixXd(n, k)};
  if (k == 0) return out;

  double tnorm = std::abs(d[0]) + std::abs(e[0]);
  for (Eigen::Index i = 1; i < n; ++i)
    tnorm = std::max(tnorm, std::abs(d[i]) + std::abs(e[i - 1]) + (i + 1 < n ? std::abs(e[i]) : 0.0));
  tnorm = std::max(tnorm, std::numeric_limits<double>::min());
  const double eps = std::numeric_limits<double>::epsilon();
  const double clusterGap = 1e-3 * tnorm;
  const double accept = std::max(tol, 10 * eps) * tnorm;

  Rng rng(seed);
  Eigen::MatrixXd v(n, k);
  Eigen::Index clusterStart = 0;
  double shiftPrev = 0.0;
  for (Eigen::Index c = 0; c < k; ++c) {
    double shift = selected[c];
    if (c > 0 && selected[c - 1] - selected[c] > clusterGap) clusterStart = c;
    // Coincident shifts would give the same solution; separate them slightly.
    if (c > clusterStart && shift >= shiftPrev - 10 * eps * tnorm) shift = shiftPrev - 10 * eps * tnorm;
    shiftPrev = shift;

    const detail::ShiftedTridiagonalLu lu(d, e, shift, eps * tnorm);
    Eigen::VectorXd x(n);
    for (Eigen::Index i = 0; i < n; ++i) x[i] = rng.uniform() - 0.5;
    auto orthogonalize = [&] {
      for (int pass = 0; pass < 2; ++pass)
        for (Eigen::Index p = clusterStart; p < c; ++p) x -= v.col(p).dot(x) * v.col(p);
    };
    orthogonalize();
    x.normalize();

    double res = std::numeric_limits<double>::infinity();
    for (int iter = 0; iter < 8 && res > accept; ++iter) {
      lu.solveInPlace(x);
      orthogonalize();
      const double nx = x.norm();
      if (!(nx > 0.0) || !std::isfinite(nx)) throw SpectralBackendError("inverse iteration broke down", res);
      x /= nx;
      res = (detail::tridiagonalTimes(d, e, x) - selected[c] * x).norm();
    }
    if (res > accept) throw SpectralBackendError("inverse iteration did not converge", res);
    v.col(c) = x;
    out.values[c] = selected[c];
  }
  out.vectors.noalias() = tri.matrixQ() * v;
  return out;
}

}  // namespace admipc

#endif  // ADMIPC_SPECTRAL_HPP
