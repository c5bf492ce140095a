#ifndef ADMIPC_SOLVER_HPP
#define ADMIPC_SOLVER_HPP

#include <algorithm>
#include <cmath>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "admipc/errors.hpp"
#include "admipc/netgen.hpp"
#include "admipc/specmat.hpp"

namespace admipc {

/// ADMIPC parameters. Unset `rho` and `mu0` resolve to 1/sqrt(n) and
/// 1.25 / ||pi_Omega(D)||_2 for the instance at hand.
struct SolverConfig {
  std::optional<double> rho;
  std::optional<double> mu0;
  double kappa = 1.2;
  double muBar = 1e7;
  double epsR = 5e-4;
  int maxIter = 500;
  SpectralBackend backend;

  void validate() const {
    if (rho && !(*rho > 0.0)) throw std::invalid_argument("SolverConfig: rho must be positive");
    if (mu0 && !(*mu0 > 0.0)) throw std::invalid_argument("SolverConfig: mu0 must be positive");
    if (!(kappa > 1.0)) throw std::invalid_argument("SolverConfig: kappa must exceed 1");
    if (!(muBar > 0.0)) throw std::invalid_argument("SolverConfig: muBar must be positive");
    if (!(epsR >= 0.0)) throw std::invalid_argument("SolverConfig: epsR must be nonnegative");
    if (maxIter < 1) throw std::invalid_argument("SolverConfig: maxIter must be >= 1");
  }

  double rhoFor(Index n) const { return rho ? *rho : 1.0 / std::sqrt(static_cast<double>(n)); }
};

/// Solver state (L_k, X_k, S_k, Y_k, mu_k).
struct Iterate {
  DenseSymMatrix L, X, S, Y;
  double mu;
  int k = 0;
};

enum class SolveStatus { Converged, MaxIterReached };

inline const char* toString(SolveStatus s) { return s == SolveStatus::Converged ? "converged" : "max_iter"; }

struct SolveResult {
  DenseSymMatrix L;
  DenseSymMatrix S;
  int iterations = 0;
  int eigCalls = 0;
  std::vector<double> primalResiduals{};
  std::vector<double> dualResiduals{};
  SolveStatus status = SolveStatus::MaxIterReached;
  double rho = 0.0;
  double mu0 = 0.0;
};

/// Rejects D unless it is 0/1 on the mask with a unit diagonal.
inline void requireBinaryObservation(const DenseSymMatrix& d, const ObservationMask& mask) {
  if (d.n() != mask.n()) throw std::invalid_argument("observation: dimension mismatch");
  for (Index i = 0; i < d.n(); ++i) {
    if (d(i, i) != 1.0) throw ValidationError("observation: diagonal of D must be all ones");
  }
  for (const auto& [i, j] : mask.offDiagonal()) {
    const double v = d(i, j);
    if (v != 0.0 && v != 1.0) throw ValidationError("observation: D must be 0/1 on observed entries");
  }
}

/// Largest-magnitude scaling used by both ADMIPC and M-IALM initializations.
struct InitScaling {
  double specNorm;  // ||pi_Omega(D)||_2
  double mu0;
  double y0Denominator;
};

inline InitScaling initScaling(const DenseSymMatrix& projD, double rho, std::optional<double> mu0) {
  const double spec = spectralNorm(projD);
  InitScaling s{spec, 0.0, 0.0};
  if (spec > 0.0) {
    s.mu0 = mu0 ? *mu0 : 1.25 / spec;
    s.y0Denominator = std::max(spec, infNorm(projD) / rho);
  } else {
    s.mu0 = mu0 ? *mu0 : 1.25;
    s.y0Denominator = std::max(1.0, 1.0 / rho);
  }
  return s;
}

/// L_0 = 0, Y_0 = pi_Omega(D) / max(||pi_Omega(D)||_2, ||pi_Omega(D)||_inf / rho).
inline Iterate initialize(const DenseSymMatrix& d, const ObservationMask& mask, const SolverConfig& cfg) {
  cfg.validate();
  requireBinaryObservation(d, mask);
  const DenseSymMatrix projD = projectMask(d, mask);
  const InitScaling s = initScaling(projD, cfg.rhoFor(d.n()), cfg.mu0);
  const Index n = d.n();
  return Iterate{DenseSymMatrix::zeros(n), DenseSymMatrix::zeros(n), DenseSymMatrix::zeros(n),
                 projD / s.y0Denominator, s.mu0, 0};
}

/// sgn(t) * max(|t| - c, 0)
inline double shrink(double t, double c) {
  const double mag = std::abs(t) - c;
  if (mag <= 0.0) return 0.0;
  return t > 0.0 ? mag : -mag;
}

/// argmin over [lower, upper] of rho|s| + mu/2 (s - t)^2, with c = rho/mu.
inline double clampedShrink(double t, double c, double lower, double upper) {
  return std::min(upper, std::max(lower, shrink(t, c)));
}

/// Closed-form (X, S) step. With Q = L_k - Y_k / mu_k and t = (D - Q)_ij on
/// the observed off-diagonal pairs, S_ij = clamp(shrink(t, rho/mu), -1, D_ij);
/// S vanishes elsewhere. X = D - S on the mask and max(Q, 0) off it.
inline std::pair<DenseSymMatrix, DenseSymMatrix> updateXS(const Iterate& it, const DenseSymMatrix& d,
                                                          const ObservationMask& mask, const SolverConfig& cfg) {
  const Index n = d.n();
  const double c = cfg.rhoFor(n) / it.mu;
  const Eigen::MatrixXd q = it.L.dense() - it.Y.dense() / it.mu;
  Eigen::MatrixXd s = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd x(n, n);
  const Eigen::MatrixXd& ind = mask.indicator();
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (ind(i, j) == 0.0) {
        x(i, j) = std::max(q(i, j), 0.0);
      } else if (i == j) {
        x(i, j) = d(i, j);
      } else {
        const double dij = d(i, j);
        const double sij = clampedShrink(dij - q(i, j), c, -1.0, dij);
        s(i, j) = sij;
        x(i, j) = dij - sij;
      }
    }
  }
  // q is exactly symmetric (entrywise ops on symmetric inputs), so x and s are too.
  return {DenseSymMatrix::fromTrusted(std::move(x)), DenseSymMatrix::fromTrusted(std::move(s))};
}

struct LUpdate {
  DenseSymMatrix L;
  int eigCalls;
};

/// L_{k+1} = PSD projection of X_{k+1} + Y_k/mu_k - I/mu_k.
inline LUpdate updateL(const Iterate& it, const SolverConfig& cfg) {
  const DenseSymMatrix qx = it.X + it.Y / it.mu;
  auto proj = psdProjectShifted(qx, 1.0 / it.mu, cfg.backend);
  return {std::move(proj.L), proj.eigCalls};
}

/// Y_{k+1} = Y_k + mu_k (X_{k+1} - L_{k+1})
inline DenseSymMatrix updateDual(const Iterate& it) { return it.Y + it.mu * (it.X - it.L); }

/// mu_{k+1} = min(kappa mu_k, muBar)
inline double updatePenalty(const Iterate& it, const SolverConfig& cfg) { return std::min(cfg.kappa * it.mu, cfg.muBar); }

struct ConvergenceCheck {
  bool converged;
  double primalResidual;
  double dualResidual;
};

/// Primal: ||L_{k+1} - X_{k+1}||_F <= epsR max(||L_{k+1}||_F, ||X_{k+1}||_F).
/// Dual:   mu_k ||L_{k+1} - L_k||_F / ||pi_Omega(D)||_F <= epsR ||Y_{k+1}||_F.
/// `prev` supplies L_k and mu_k; `next` supplies L, X, Y after the iteration.
inline ConvergenceCheck checkConvergence(const Iterate& prev, const Iterate& next, const DenseSymMatrix& d,
                                         const ObservationMask& mask, const SolverConfig& cfg) {
  const double projDNorm = frobeniusNorm(projectMask(d, mask));
  const double primal = (next.L.dense() - next.X.dense()).norm();
  const double dual = prev.mu * (next.L.dense() - prev.L.dense()).norm() / projDNorm;
  const double tolP = cfg.epsR * std::max(frobeniusNorm(next.L), frobeniusNorm(next.X));
  const double tolD = cfg.epsR * frobeniusNorm(next.Y);
  return {primal <= tolP && dual <= tolD, primal, dual};
}

/// Largest violation of the (X, S) constraint set: X = D - S on the mask,
/// X >= 0, diag(S) = 0, |S_ij| <= 1.
inline double checkFeasibility(const DenseSymMatrix& x, const DenseSymMatrix& s, const DenseSymMatrix& d,
                               const ObservationMask& mask) {
  const Index n = d.n();
  if (x.n() != n || s.n() != n || mask.n() != n) throw std::invalid_argument("checkFeasibility: dimension mismatch");
  double worst = 0.0;
  for (Index j = 0; j < n; ++j) {
    for (Index i = 0; i < n; ++i) {
      if (mask.contains(i, j)) worst = std::max(worst, std::abs(x(i, j) - (d(i, j) - s(i, j))));
      worst = std::max(worst, -x(i, j));
      if (i == j) {
        worst = std::max(worst, std::abs(s(i, i)));
      } else {
        worst = std::max(worst, std::abs(s(i, j)) - 1.0);
      }
    }
  }
  return worst;
}

/// Tr(L) + rho ||S||_1
inline double objective(const DenseSymMatrix& l, const DenseSymMatrix& s, double rho) {
  return trace(l) + rho * s.dense().cwiseAbs().sum();
}

inline SolveResult solve(const DenseSymMatrix& d, const ObservationMask& mask, const SolverConfig& cfg) {
  Iterate it = initialize(d, mask, cfg);
  SolveResult out{.L = DenseSymMatrix::zeros(d.n()), .S = DenseSymMatrix::zeros(d.n())};
  out.rho = cfg.rhoFor(d.n());
  out.mu0 = it.mu;

  for (int k = 0; k < cfg.maxIter; ++k) {
    const Iterate prev = it;
    auto [x, s] = updateXS(it, d, mask, cfg);
    it.X = std::move(x);
    it.S = std::move(s);
    try {
      auto lu = updateL(it, cfg);
      it.L = std::move(lu.L);
      out.eigCalls += lu.eigCalls;
    } catch (const SpectralBackendError& e) {
      throw SpectralBackendError("ADMIPC iteration " + std::to_string(k) + ", mu " + std::to_string(it.mu) + ": " +
                                     e.what(),
                                 e.residual());
    }
    it.Y = updateDual(it);
    const ConvergenceCheck conv = checkConvergence(prev, it, d, mask, cfg);
    out.primalResiduals.push_back(conv.primalResidual);
    out.dualResiduals.push_back(conv.dualResidual);
    it.mu = updatePenalty(it, cfg);
    it.k = k + 1;
    if (conv.converged) {
      out.status = SolveStatus::Converged;
      break;
    }
  }
  out.iterations = it.k;
  out.L = std::move(it.L);
  out.S = std::move(it.S);
  return out;
}

inline SolveResult solve(const ObservedGraph& g, const SolverConfig& cfg) {
  const auto obs = toDense(g);
  return solve(obs.D, obs.mask, cfg);
}

}  // namespace admipc

#endif  // ADMIPC_SOLVER_HPP
