#ifndef ADMIPC_RPCA_HPP
#define ADMIPC_RPCA_HPP

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "admipc/netgen.hpp"
#include "admipc/solver.hpp"
#include "admipc/specmat.hpp"

// Partially observed robust PCA baselines:
//   min ||L||_* + rho ||pi_Omega(S)||_1   s.t.   L + S = pi_Omega(D)
// solved by an increasing-penalty ADMM (M-IALM), and the rho-adjusting
// wrapper RPCAB around it.

namespace admipc {

struct MialmConfig {
  std::optional<double> rho;
  std::optional<double> mu0;
  double kappa = 1.2;
  double muBar = 1e7;
  double epsR = 5e-4;
  int maxIter = 500;
  SpectralBackend backend;

  void validate() const {
    SolverConfig{rho, mu0, kappa, muBar, epsR, maxIter, backend}.validate();
  }
  double rhoFor(Index n) const { return rho ? *rho : 1.0 / std::sqrt(static_cast<double>(n)); }
};

struct MialmResult {
  DenseSymMatrix L;
  DenseSymMatrix S;
  int iterations = 0;
  int eigCalls = 0;
  SolveStatus status = SolveStatus::MaxIterReached;
  double primalResidual = 0.0;
  double primalTolerance = 0.0;
};

/// Proximal map of tau ||.||_* for a symmetric matrix: singular values of a
/// symmetric matrix are |lambda|, so each eigenvalue is shrunk toward zero.
/// Only eigenpairs with |lambda| > tau contribute.
inline DenseSymMatrix svtSymmetric(const DenseSymMatrix& q, double tau, const SpectralBackend& backend = {}) {
  if (!(tau >= 0.0)) throw std::invalid_argument("svtSymmetric: tau must be nonnegative");
  const Eigenpairs pairs = eigenpairsOutside(q, SpectrumCut{-tau, tau}, backend);
  return reconstruct(q.n(), pairs, [tau](double l) { return shrink(l, tau); });
}

/// Optional starting (L, S); Y and mu always use the default initialization.
struct MialmStart {
  DenseSymMatrix L;
  DenseSymMatrix S;
};

inline MialmResult mialmSolve(const DenseSymMatrix& d, const ObservationMask& mask, const MialmConfig& cfg,
                              const MialmStart* start = nullptr) {
  cfg.validate();
  requireBinaryObservation(d, mask);
  const Index n = d.n();
  const double rho = cfg.rhoFor(n);
  const DenseSymMatrix pd = projectMask(d, mask);
  const double pdNorm = frobeniusNorm(pd);
  const InitScaling init = initScaling(pd, rho, cfg.mu0);

  const Eigen::MatrixXd& ind = mask.indicator();
  const Eigen::MatrixXd& pdm = pd.dense();
  Eigen::MatrixXd l = start ? start->L.dense() : Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd s = start ? start->S.dense() : Eigen::MatrixXd::Zero(n, n);
  if (l.rows() != n || s.rows() != n) throw std::invalid_argument("mialmSolve: start has wrong dimension");
  Eigen::MatrixXd y = pdm / init.y0Denominator;
  double mu = init.mu0;

  MialmResult out{DenseSymMatrix::zeros(n), DenseSymMatrix::zeros(n)};
  for (int k = 0; k < cfg.maxIter; ++k) {
    // S-step: soft-threshold on the mask, exact unpenalized solve off it.
    const Eigen::MatrixXd t = pdm - l + y / mu;
    const double c = rho / mu;
    for (Index j = 0; j < n; ++j)
      for (Index i = 0; i < n; ++i) s(i, j) = ind(i, j) != 0.0 ? shrink(t(i, j), c) : t(i, j);

    DenseSymMatrix lNext = [&] {
      try {
        return svtSymmetric(DenseSymMatrix::fromTrusted(pdm - s + y / mu), 1.0 / mu, cfg.backend);
      } catch (const SpectralBackendError& e) {
        throw SpectralBackendError("M-IALM iteration " + std::to_string(k) + ": " + e.what(), e.residual());
      }
    }();
    ++out.eigCalls;

    const Eigen::MatrixXd r = pdm - lNext.dense() - s;
    y += mu * r;
    const double primal = r.norm();
    const double tolP = cfg.epsR * std::max({lNext.dense().norm(), s.norm(), pdNorm});
    const double dual = mu * (lNext.dense() - l).norm() / pdNorm;
    const double tolD = cfg.epsR * y.norm();
    l = lNext.dense();
    mu = std::min(cfg.kappa * mu, cfg.muBar);
    out.iterations = k + 1;
    out.primalResidual = primal;
    out.primalTolerance = tolP;
    if (primal <= tolP && dual <= tolD) {
      out.status = SolveStatus::Converged;
      break;
    }
  }
  out.L = DenseSymMatrix::fromTrusted(std::move(l));
  out.S = DenseSymMatrix::fromTrusted(std::move(s));
  return out;
}

inline MialmResult mialmSolve(const ObservedGraph& g, const MialmConfig& cfg) {
  const auto obs = toDense(g);
  return mialmSolve(obs.D, obs.mask, cfg);
}

enum class RpcabStatus { TraceMatched, OuterCapReached };

inline const char* toString(RpcabStatus s) {
  return s == RpcabStatus::TraceMatched ? "trace_matched" : "outer_cap";
}

struct RhoStep {
  double rho;
  double trace;
};

struct RpcabResult {
  DenseSymMatrix L;
  DenseSymMatrix S;
  std::vector<RhoStep> rhoTrace{};
  int outerIterations = 0;
  int eigCalls = 0;
  double rho = 0.0;  // rho of the returned iterate
  RpcabStatus status = RpcabStatus::OuterCapReached;
};

struct RpcabOptions {
  int outerCap = 20;
  double traceTolerance = 0.01;
  /// Seed each M-IALM call with the previous call's (L, S).
  bool warmStart = false;
};

/// Calls M-IALM with rho halved while Tr(L) > n and doubled otherwise, until
/// |Tr(L) - n| / n <= traceTolerance or outerCap calls. Returns the iterate
/// closest to trace n.
inline RpcabResult rpcabSolve(const DenseSymMatrix& d, const ObservationMask& mask, const MialmConfig& cfg,
                              const RpcabOptions& opt = {}) {
  if (opt.outerCap < 1) throw std::invalid_argument("rpcabSolve: outerCap must be >= 1");
  const Index n = d.n();
  const auto nd = static_cast<double>(n);
  MialmConfig inner = cfg;
  double rho = cfg.rhoFor(n);

  RpcabResult out{.L = DenseSymMatrix::zeros(n), .S = DenseSymMatrix::zeros(n)};
  double bestGap = std::numeric_limits<double>::infinity();
  std::optional<MialmStart> start;
  for (int call = 0; call < opt.outerCap; ++call) {
    inner.rho = rho;
    MialmResult r = mialmSolve(d, mask, inner, start ? &*start : nullptr);
    if (opt.warmStart) start = MialmStart{r.L, r.S};
    const double tr = trace(r.L);
    const double gap = std::abs(tr - nd) / nd;
    out.rhoTrace.push_back({rho, tr});
    out.eigCalls += r.eigCalls;
    out.outerIterations = call + 1;
    if (gap < bestGap) {
      bestGap = gap;
      out.L = std::move(r.L);
      out.S = std::move(r.S);
      out.rho = rho;
    }
    if (gap <= opt.traceTolerance) {
      out.status = RpcabStatus::TraceMatched;
      break;
    }
    rho = tr > nd ? rho / 2.0 : rho * 2.0;
  }
  return out;
}

inline RpcabResult rpcabSolve(const ObservedGraph& g, const MialmConfig& cfg, const RpcabOptions& opt = {}) {
  const auto obs = toDense(g);
  return rpcabSolve(obs.D, obs.mask, cfg, opt);
}

}  // namespace admipc

#endif  // ADMIPC_RPCA_HPP
