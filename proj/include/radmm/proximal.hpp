#ifndef RADMM_PROXIMAL_HPP
#define RADMM_PROXIMAL_HPP

#include <cmath>
#include <stdexcept>

#include "radmm/manifolds.hpp"

namespace radmm {

/// The nonsmooth convex term g. The only shipped instance is the weighted
/// l1 norm mu*||.||_1 on m1-by-m2 matrices.
struct NonsmoothTerm {
  enum class Kind { WeightedL1 };

  Kind kind = Kind::WeightedL1;
  double mu = 1.0;
  int rows = 0;
  int cols = 0;

  static NonsmoothTerm weighted_l1(double mu, int rows, int cols) {
    if (mu < 0) throw std::invalid_argument("NonsmoothTerm: mu must be >= 0");
    return NonsmoothTerm{Kind::WeightedL1, mu, rows, cols};
  }

  double value(const Matrix& U) const { return mu * U.cwiseAbs().sum(); }

  // Frobenius-norm Lipschitz constant of mu*||.||_1.
  double lipschitz() const {
    return mu * std::sqrt(static_cast<double>(rows) * cols);
  }
};

struct MoreauParams {
  double gamma;
};

/// sign(u) * max(|u| - t, 0). Entries with |u| <= t map to exactly 0.
inline double soft_threshold(double u, double t) {
  if (t < 0) throw std::invalid_argument("soft_threshold: t must be >= 0");
  if (std::abs(u) <= t) return 0.0;
  return u > 0 ? u - t : u + t;
}

/// prox_{t g}(U); elementwise soft threshold at t*mu for the weighted l1 norm.
inline Matrix prox(const NonsmoothTerm& g, double t, const Matrix& U) {
  if (t <= 0) throw std::invalid_argument("prox: t must be > 0");
  const double thr = t * g.mu;
  return U.unaryExpr([thr](double u) { return soft_threshold(u, thr); });
}

/// g_gamma(Z) = min_Y g(Y) + ||Y - Z||_F^2 / (2 gamma), evaluated at the prox.
inline double moreau_value(const NonsmoothTerm& g, double gamma, const Matrix& Z) {
  if (gamma <= 0) throw std::invalid_argument("moreau_value: gamma must be > 0");
  Matrix Y = prox(g, gamma, Z);
  return g.value(Y) + (Y - Z).squaredNorm() / (2.0 * gamma);
}

/// grad g_gamma(Z) = (Z - prox_{gamma g}(Z)) / gamma.
inline Matrix moreau_gradient(const NonsmoothTerm& g, double gamma, const Matrix& Z) {
  if (gamma <= 0) throw std::invalid_argument("moreau_gradient: gamma must be > 0");
  return (Z - prox(g, gamma, Z)) / gamma;
}

}  // namespace radmm

#endif  // RADMM_PROXIMAL_HPP
