#ifndef RADMM_DIAGNOSTICS_HPP
#define RADMM_DIAGNOSTICS_HPP

#include <cmath>
#include <stdexcept>

#include "radmm/problems.hpp"

namespace radmm {

/// L_{rho,gamma}(x, z; lambda) = f(x) + g_gamma(z) + <lambda, Ax - z>
///                               + (rho/2) ||Ax - z||^2.
inline double aug_lagrangian(const CompositeProblem& prob, const Matrix& x,
                             const Matrix& z, const Matrix& lambda, double rho,
                             double gamma) {
  Matrix r = prob.A.apply(x) - z;
  if (lambda.rows() != r.rows() || lambda.cols() != r.cols())
    throw std::invalid_argument("aug_lagrangian: dimension mismatch");
  return prob.f_value(x) + moreau_value(prob.g, gamma, z) +
         lambda.cwiseProduct(r).sum() + 0.5 * rho * r.squaredNorm();
}

/// The three blocks of the stationarity system: Riemannian gradient of the
/// Lagrangian, distance from lambda to the subdifferential of g at y, and the
/// primal residual Ax - y.
struct StationarityReport {
  double grad_block = 0;
  double dual_block = 0;
  double primal_block = 0;
  double total = 0;
};

inline StationarityReport stationarity(const CompositeProblem& prob,
                                       const StiefelPoint& x, const Matrix& y,
                                       const Matrix& lambda) {
  StationarityReport rep;
  rep.grad_block = detail::tangent_project_raw(
                       x.mat(), prob.f_euclid_grad(x.mat()) + prob.A.adjoint(lambda))
                       .norm();

  // Pointwise distance from lambda to the subdifferential of mu*||.||_1 at y:
  // the box [-mu, mu] at zero entries, the point mu*sign(y) elsewhere.
  const double mu = prob.g.mu;
  double dual_sq = 0;
  for (Eigen::Index j = 0; j < y.cols(); ++j)
    for (Eigen::Index i = 0; i < y.rows(); ++i) {
      const double l = lambda(i, j);
      const double d = y(i, j) == 0.0
                           ? std::max(std::abs(l) - mu, 0.0)
                           : std::abs(l - mu * (y(i, j) > 0 ? 1.0 : -1.0));
      dual_sq += d * d;
    }
  rep.dual_block = std::sqrt(dual_sq);
  rep.primal_block = (prob.A.apply(x.mat()) - y).norm();
  rep.total = std::sqrt(rep.grad_block * rep.grad_block + dual_sq +
                        rep.primal_block * rep.primal_block);
  return rep;
}

/// Which constraint-violation norm a solver reports.
enum class InfeasKind {
  GramIdentity,     // ||U^T U - I||_F   (RADMM on sparse PCA: Y off-manifold)
  SplitDifference,  // ||U - V||_F       (SOC/MADMM splits, DPCP W = Y^T X)
};

inline double infeasibility(InfeasKind kind, const Matrix& U,
                            const Matrix& V = Matrix()) {
  switch (kind) {
    case InfeasKind::GramIdentity: {
      const Eigen::Index p = U.cols();
      return (U.transpose() * U - Matrix::Identity(p, p)).norm();
    }
    case InfeasKind::SplitDifference:
      if (U.rows() != V.rows() || U.cols() != V.cols())
        throw std::invalid_argument("infeasibility: dimension mismatch");
      return (U - V).norm();
  }
  throw std::invalid_argument("infeasibility: unknown kind");
}

/// Fraction of entries with |u| <= tau.
inline double sparsity(const Matrix& U, double tau = 0.0) {
  if (tau < 0) throw std::invalid_argument("sparsity: tau must be >= 0");
  const Eigen::Index total = U.size();
  if (total == 0) return 1.0;
  Eigen::Index zeros = 0;
  for (Eigen::Index j = 0; j < U.cols(); ++j)
    for (Eigen::Index i = 0; i < U.rows(); ++i)
      if (std::abs(U(i, j)) <= tau) ++zeros;
  return static_cast<double>(zeros) / static_cast<double>(total);
}

}  // namespace radmm

#endif  // RADMM_DIAGNOSTICS_HPP
