#ifndef RADMM_SOLVERS_HPP
#define RADMM_SOLVERS_HPP

#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "radmm/diagnostics.hpp"
#include "radmm/problems.hpp"

namespace radmm {

struct DivergenceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvariantViolation : std::logic_error {
  using std::logic_error::logic_error;
};

struct SolverConfig {
  double rho = 100.0;
  double gamma = 1e-8;
  double eta = 1e-2;
  int max_iter = 1000;
  double tol = 1e-8;
  unsigned seed = 0;
  RetractionKind retraction = RetractionKind::QR;
  int inner_iters = 5;      // SOC/MADMM subproblem steps per outer iteration
  double inner_eta = 1e-2;  // SOC/MADMM subproblem stepsize
  double irls_delta = 1e-8;
  bool theory_mode = false; // derive (rho, gamma, eta) from epsilon and assert
                            // the monotone-decrease guarantee during the run
  double epsilon = 0.5;

  void validate() const {
    if (rho <= 0 || gamma <= 0 || eta <= 0 || inner_eta <= 0 ||
        irls_delta <= 0 || epsilon <= 0)
      throw std::invalid_argument("SolverConfig: positive fields must be > 0");
    if (max_iter < 1 || inner_iters < 0)
      throw std::invalid_argument("SolverConfig: bad iteration counts");
    if (tol < 0) throw std::invalid_argument("SolverConfig: tol must be >= 0");
  }
};

/// The (x, y, z, lambda) tuple of the ADMM iteration, plus the bookkeeping
/// needed to evaluate the analysis-side bounds.
struct RadmmState {
  Matrix x;       // manifold iterate
  Matrix y;       // prox output (ambient)
  Matrix z;       // smoothed splitting variable
  Matrix lambda;  // multiplier
  int k = 0;
  Matrix z_prev;
  double step_norm = 0;  // || -eta * grad_x L || of the step that produced x
};

struct IterateRecord {
  int k = 0;
  double obj = 0;
  double auglag = 0;
  double infeas = 0;
  double sparsity = 0;
  double stationarity = 0;
  double elapsed = 0;
};

struct RadmmResult {
  RadmmState state;
  std::vector<IterateRecord> trace;
  bool diverged = false;
  std::string message;
};

struct SolveResult {
  Matrix x;
  std::vector<IterateRecord> trace;
  bool diverged = false;
  std::string message;
};

/// L_rho from the geodesic-smoothness bound on the augmented Lagrangian.
inline double smoothness_constant(const CompositeProblem& prob, double rho,
                                  double alpha = 1.0, double beta = 1.0) {
  if (rho < 0) throw std::invalid_argument("smoothness_constant: rho must be >= 0");
  const double lg = prob.g.lipschitz();
  return 0.5 * (prob.L + rho * prob.ata_norm) * alpha * alpha +
         (prob.M + prob.a_norm * lg + rho * prob.ata_norm * prob.D +
          prob.a_norm * (2.0 * lg + rho * prob.a_norm * prob.D)) *
             beta;
}

struct TheoryParams {
  double rho;
  double gamma;
  double eta;
  double l_rho;
};

/// Parameter schedule that guarantees an epsilon-stationary point:
/// rho = 1/eps, gamma = sqrt(2/rho^2 + (rho^2 ||A||^2 + 1)/(rho^3 L_rho)),
/// eta = 1/L_rho. Always yields rho*gamma >= sqrt(2) > 1.
inline TheoryParams theory_params(const CompositeProblem& prob, double eps,
                                  double alpha = 1.0, double beta = 1.0) {
  if (eps <= 0) throw std::invalid_argument("theory_params: eps must be > 0");
  TheoryParams tp;
  tp.rho = 1.0 / eps;
  tp.l_rho = smoothness_constant(prob, tp.rho, alpha, beta);
  tp.gamma = std::sqrt(2.0 / (tp.rho * tp.rho) +
                       (tp.rho * tp.rho * prob.a_norm * prob.a_norm + 1.0) /
                           (tp.rho * tp.rho * tp.rho * tp.l_rho));
  tp.eta = 1.0 / tp.l_rho;
  return tp;
}

namespace detail {

struct DualUpdate {
  Matrix y;
  Matrix z;
  Matrix lambda;
};

// Closed-form y/z/lambda updates given ax = A x^{k+1}:
//   y = prox_{(1+rho*gamma)/rho g}(ax + lambda/rho)
//   z = gamma/(1+gamma*rho) * (y/gamma + lambda + rho*ax)
//   lambda' = lambda + rho*(ax - z)
inline DualUpdate radmm_dual_update(const Matrix& ax, const Matrix& lambda,
                                    const NonsmoothTerm& g, double rho,
                                    double gamma) {
  DualUpdate d;
  d.y = prox(g, (1.0 + rho * gamma) / rho, ax + lambda / rho);
  d.z = (gamma / (1.0 + gamma * rho)) * (d.y / gamma + lambda + rho * ax);
  d.lambda = lambda + rho * (ax - d.z);
  return d;
}

inline void require_finite_state(const Matrix& M, int k, const char* what) {
  if (!M.allFinite())
    throw DivergenceError("radmm diverged at iteration " + std::to_string(k) +
                          ": non-finite " + what);
}

// Post-step invariants of the iterate tuple. The lambda identity is checked
// with a floating-point-aware slack since (z - prox(z))/gamma amplifies
// roundoff by 1/gamma.
inline void check_radmm_invariants(const RadmmState& prev, const RadmmState& next,
                                   const NonsmoothTerm& g, double gamma) {
  const double lg = g.lipschitz();
  const double dim = std::sqrt(static_cast<double>(next.z.size()));

  Matrix grad = moreau_gradient(g, gamma, next.z);
  const double id_tol = 1e-10 * (1.0 + next.lambda.norm()) +
                        1e-13 * dim * (1.0 + next.z.norm()) / gamma;
  if ((next.lambda - grad).norm() > id_tol)
    throw InvariantViolation("radmm: lambda != grad g_gamma(z) at iteration " +
                             std::to_string(next.k));
  if (next.lambda.norm() > lg + 1e-8)
    throw InvariantViolation("radmm: ||lambda|| > L_g at iteration " +
                             std::to_string(next.k));
  if ((next.z - next.y).norm() > gamma * lg + 1e-8)
    throw InvariantViolation("radmm: ||z - y|| > gamma L_g at iteration " +
                             std::to_string(next.k));
  if (prev.k >= 1) {
    const double dl = (next.lambda - prev.lambda).norm();
    if (dl > (next.z - prev.z).norm() / gamma + 1e-10)
      throw InvariantViolation("radmm: dual-by-primal bound violated at iteration " +
                               std::to_string(next.k));
  }
}

}  // namespace detail

/// One iteration of the ADMM with a Riemannian gradient x-step and closed-form
/// y/z/lambda updates.
inline RadmmState radmm_step(const RadmmState& state, const CompositeProblem& prob,
                             const SolverConfig& cfg) {
  const Matrix& x = state.x;
  Matrix grad_e = prob.f_euclid_grad(x) + prob.A.adjoint(state.lambda) +
                  cfg.rho * prob.A.adjoint(prob.A.apply(x) - state.z);
  Matrix xi = detail::tangent_project_raw(x, grad_e);
  Matrix step = -cfg.eta * xi;

  RadmmState next;
  next.k = state.k + 1;
  next.step_norm = step.norm();
  next.x = next.step_norm == 0.0 ? x : detail::retract_raw(x, step, cfg.retraction);
  // drift guard; retraction already guarantees orthonormality
  const Eigen::Index p = next.x.cols();
  if ((next.x.transpose() * next.x - Matrix::Identity(p, p)).norm() > 1e-8)
    next.x = detail::qr_positive(next.x);
  detail::require_finite_state(next.x, next.k, "x");

  auto d = detail::radmm_dual_update(prob.A.apply(next.x), state.lambda, prob.g,
                                     cfg.rho, cfg.gamma);
  next.y = std::move(d.y);
  next.z = std::move(d.z);
  next.lambda = std::move(d.lambda);
  next.z_prev = state.z;
  detail::require_finite_state(next.y, next.k, "y");
  detail::require_finite_state(next.z, next.k, "z");
  detail::require_finite_state(next.lambda, next.k, "lambda");

  detail::check_radmm_invariants(state, next, prob.g, cfg.gamma);
  return next;
}

/// Full run: feasible start (z0 = y0 = A x0, lambda0 = 0), stop when the
/// monitored objective F(y^k) changes by less than tol or max_iter is hit.
inline RadmmResult radmm_solve(const CompositeProblem& prob, SolverConfig cfg,
                               const StiefelPoint& x0) {
  cfg.validate();
  if (cfg.theory_mode) {
    auto tp = theory_params(prob, cfg.epsilon);
    cfg.rho = tp.rho;
    cfg.gamma = tp.gamma;
    cfg.eta = tp.eta;
    if (cfg.rho * cfg.gamma <= 1.0)
      throw InvariantViolation("theory_mode: rho*gamma <= 1");
  }

  RadmmResult res;
  RadmmState& s = res.state;
  s.x = x0.mat();
  s.z = prob.A.apply(s.x);
  s.y = s.z;
  s.lambda = Matrix::Zero(s.z.rows(), s.z.cols());
  s.z_prev = s.z;
  s.k = 0;

  double prev_obj = objective(prob, s.y);
  double prev_auglag = std::numeric_limits<double>::infinity();
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < cfg.max_iter; ++k) {
    try {
      s = radmm_step(s, prob, cfg);
    } catch (const DivergenceError& e) {
      res.diverged = true;
      res.message = e.what();
      return res;
    }
    const double obj = objective(prob, s.y);
    IterateRecord rec;
    rec.k = s.k;
    rec.obj = obj;
    rec.auglag = aug_lagrangian(prob, s.x, s.z, s.lambda, cfg.rho, cfg.gamma);
    rec.infeas = prob.kind == ProblemKind::SparsePca
                     ? infeasibility(InfeasKind::GramIdentity, s.y)
                     : infeasibility(InfeasKind::SplitDifference,
                                     prob.A.apply(s.x), s.y);
    rec.sparsity = sparsity(s.y, 0.0);
    rec.stationarity =
        stationarity(prob, StiefelPoint(s.x), s.y, s.lambda).total;
    rec.elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0)
                      .count();
    res.trace.push_back(rec);

    if (cfg.theory_mode && rec.auglag > prev_auglag + 1e-12)
      throw InvariantViolation(
          "theory_mode: augmented Lagrangian increased at iteration " +
          std::to_string(s.k));
    prev_auglag = rec.auglag;

    if (std::abs(obj - prev_obj) < cfg.tol) break;
    prev_obj = obj;
  }
  return res;
}

namespace detail {

// Stationarity at a manifold point with the canonical subgradient choice
// y = A x, lambda = mu * sign(A x); used by solvers that carry no multiplier.
inline double canonical_stationarity(const CompositeProblem& prob, const Matrix& x) {
  Matrix ax = prob.A.apply(x);
  Matrix lam = prob.g.mu * ax.unaryExpr([](double v) {
    return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
  });
  return stationarity(prob, StiefelPoint(x), ax, lam).total;
}

// Shared outer loop for the baseline solvers: step, record, stop when the
// monitored objective stalls. `live` aliases the solver's monitored matrix.
template <typename StepFn, typename RecordFn>
SolveResult run_monitored_loop(const SolverConfig& cfg, const Matrix& live,
                               double initial_obj, StepFn step, RecordFn record) {
  SolveResult res;
  double prev_obj = initial_obj;
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 1; k <= cfg.max_iter; ++k) {
    step(k);
    if (!live.allFinite()) {
      res.diverged = true;
      res.message = "diverged at iteration " + std::to_string(k);
      res.x = live;
      return res;
    }
    IterateRecord rec = record(k);
    rec.elapsed =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    res.trace.push_back(rec);
    if (std::abs(rec.obj - prev_obj) < cfg.tol) break;
    prev_obj = rec.obj;
  }
  res.x = live;
  return res;
}

}  // namespace detail

/// SOC: x kept ambient, the auxiliary variable carries the manifold
/// constraint. x-subproblem solved by inner_iters proximal-gradient steps
/// (sparse PCA) or subgradient steps (DPCP), then a polar projection and a
/// multiplier update. Monitored iterate is the projected (manifold) variable.
inline SolveResult soc_solve(const CompositeProblem& prob, const SolverConfig& cfg,
                             const StiefelPoint& x0) {
  cfg.validate();
  Matrix X = x0.mat();
  Matrix Y = x0.mat();
  Matrix Lam = Matrix::Zero(X.rows(), X.cols());
  return detail::run_monitored_loop(
      cfg, Y, objective(prob, Y),
      [&](int) {
        for (int j = 0; j < cfg.inner_iters; ++j) {
          if (prob.kind == ProblemKind::SparsePca) {
            Matrix grad = prob.f_euclid_grad(X) + Lam + cfg.rho * (X - Y);
            X = prox(prob.g, cfg.inner_eta, X - cfg.inner_eta * grad);
          } else {
            Matrix ax = prob.A.apply(X);
            Matrix sub = prob.A.adjoint(prob.g.mu *
                                        ax.unaryExpr([](double v) {
                                          return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
                                        }));
            X -= cfg.inner_eta * (sub + Lam + cfg.rho * (X - Y));
          }
        }
        Y = project_stiefel(X + Lam / cfg.rho);
        Lam += cfg.rho * (X - Y);
      },
      [&](int k) {
        IterateRecord rec;
        rec.k = k;
        rec.obj = objective(prob, Y);
        rec.auglag = objective(prob, X) + Lam.cwiseProduct(X - Y).sum() +
                     0.5 * cfg.rho * (X - Y).squaredNorm();
        rec.infeas = infeasibility(InfeasKind::SplitDifference, X, Y);
        rec.sparsity = sparsity(X, 0.0);
        rec.stationarity = prob.kind == ProblemKind::SparsePca
                               ? stationarity(prob, StiefelPoint(Y), X, Lam).total
                               : detail::canonical_stationarity(prob, Y);
        return rec;
      });
}

/// MADMM: x kept on the manifold via inner Riemannian gradient steps, the
/// auxiliary variable takes the prox of g. Monitored iterate is x.
inline SolveResult madmm_solve(const CompositeProblem& prob, const SolverConfig& cfg,
                               const StiefelPoint& x0) {
  cfg.validate();
  Matrix X = x0.mat();
  Matrix Yv = prob.A.apply(X);
  Matrix Lam = Matrix::Zero(Yv.rows(), Yv.cols());
  return detail::run_monitored_loop(
      cfg, X, objective(prob, X),
      [&](int) {
        for (int j = 0; j < cfg.inner_iters; ++j) {
          Matrix grad_e = prob.f_euclid_grad(X) +
                          prob.A.adjoint(Lam + cfg.rho * (prob.A.apply(X) - Yv));
          Matrix xi = detail::tangent_project_raw(X, grad_e);
          X = detail::retract_raw(X, -cfg.inner_eta * xi, cfg.retraction);
        }
        Yv = prox(prob.g, 1.0 / cfg.rho, prob.A.apply(X) + Lam / cfg.rho);
        Lam += cfg.rho * (prob.A.apply(X) - Yv);
      },
      [&](int k) {
        IterateRecord rec;
        rec.k = k;
        rec.obj = objective(prob, X);
        Matrix r = prob.A.apply(X) - Yv;
        rec.auglag = prob.f_value(X) + prob.g.value(Yv) +
                     Lam.cwiseProduct(r).sum() + 0.5 * cfg.rho * r.squaredNorm();
        rec.infeas = infeasibility(InfeasKind::SplitDifference, prob.A.apply(X), Yv);
        rec.sparsity = sparsity(Yv, 0.0);
        rec.stationarity = stationarity(prob, StiefelPoint(X), Yv, Lam).total;
        return rec;
      });
}

/// Riemannian subgradient method: X <- Retr_X(-eta Proj(grad f + A^T D)),
/// D the minimal-norm subgradient of g at A X (sign with sign(0) = 0).
inline SolveResult rsg_solve(const CompositeProblem& prob, const SolverConfig& cfg,
                             const StiefelPoint& x0) {
  cfg.validate();
  Matrix X = x0.mat();
  return detail::run_monitored_loop(
      cfg, X, objective(prob, X),
      [&](int) {
        Matrix ax = prob.A.apply(X);
        Matrix sub = prob.A.adjoint(
            prob.g.mu * ax.unaryExpr([](double v) {
              return v > 0 ? 1.0 : (v < 0 ? -1.0 : 0.0);
            }));
        Matrix xi = detail::tangent_project_raw(X, prob.f_euclid_grad(X) + sub);
        X = detail::retract_raw(X, -cfg.eta * xi, cfg.retraction);
      },
      [&](int k) {
        IterateRecord rec;
        rec.k = k;
        rec.obj = objective(prob, X);
        rec.auglag = rec.obj;
        rec.infeas = infeasibility(InfeasKind::GramIdentity, X);
        rec.sparsity = sparsity(X, 0.0);
        rec.stationarity = detail::canonical_stationarity(prob, X);
        return rec;
      });
}

/// IRLS for ||Y^T X||_1 over St(n,p). Initialized at the p smallest
/// eigenvectors of Y Y^T; each iteration re-solves the weighted eigenproblem.
inline SolveResult irls_solve(const Matrix& Y, int p, const SolverConfig& cfg) {
  cfg.validate();
  const int n = static_cast<int>(Y.rows());
  if (p < 1 || p > n) throw std::invalid_argument("irls_solve: need 1 <= p <= n");

  auto smallest_eigvecs = [n, p](const Matrix& Sc) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(Sc);
    if (es.info() != Eigen::Success)
      throw std::runtime_error("irls_solve: eigendecomposition failed");
    return Matrix(es.eigenvectors().leftCols(p));
  };

  Matrix X = smallest_eigvecs(Y * Y.transpose());
  CompositeProblem prob = dpcp_problem(Y, p);
  return detail::run_monitored_loop(
      cfg, X, objective(prob, X),
      [&](int) {
        Matrix Sc = Matrix::Zero(n, n);
        for (Eigen::Index i = 0; i < Y.cols(); ++i) {
          const double w = std::max(cfg.irls_delta, (X.transpose() * Y.col(i)).norm());
          Sc.noalias() += Y.col(i) * Y.col(i).transpose() / w;
        }
        X = smallest_eigvecs(Sc);
      },
      [&](int k) {
        IterateRecord rec;
        rec.k = k;
        rec.obj = objective(prob, X);
        rec.auglag = rec.obj;
        rec.infeas = infeasibility(InfeasKind::GramIdentity, X);
        rec.sparsity = sparsity(X, 0.0);
        rec.stationarity = detail::canonical_stationarity(prob, X);
        return rec;
      });
}

inline SolveResult irls_solve(const DpcpDataset& data, int p,
                              const SolverConfig& cfg) {
  return irls_solve(data.Y, p, cfg);
}

}  // namespace radmm

#endif  // RADMM_SOLVERS_HPP
