#ifndef RADMM_PROBLEMS_HPP
#define RADMM_PROBLEMS_HPP

#include <functional>
#include <memory>
#include <stdexcept>
#include <string>

#include "radmm/manifolds.hpp"
#include "radmm/proximal.hpp"

namespace radmm {

/// The linear map A in F(x) = f(x) + g(Ax). Identity for sparse PCA (X = Y
/// split), left multiplication by Y^T for DPCP (W = Y^T X split).
struct LinearMap {
  enum class Kind { Identity, LeftMultiply };

  Kind kind = Kind::Identity;
  Matrix B;       // used for LeftMultiply: apply(U) = B * U
  int dom_rows = 0;
  int dom_cols = 0;

  static LinearMap identity(int rows, int cols) {
    return LinearMap{Kind::Identity, Matrix(), rows, cols};
  }
  static LinearMap left_multiply(Matrix B, int dom_cols) {
    const int dom_rows = static_cast<int>(B.cols());
    return LinearMap{Kind::LeftMultiply, std::move(B), dom_rows, dom_cols};
  }

  int out_rows() const {
    return kind == Kind::Identity ? dom_rows : static_cast<int>(B.rows());
  }
  int out_cols() const { return dom_cols; }

  Matrix apply(const Matrix& U) const {
    if (U.rows() != dom_rows || U.cols() != dom_cols)
      throw std::invalid_argument("LinearMap::apply: dimension mismatch");
    return kind == Kind::Identity ? U : Matrix(B * U);
  }

  Matrix adjoint(const Matrix& V) const {
    if (V.rows() != out_rows() || V.cols() != dom_cols)
      throw std::invalid_argument("LinearMap::adjoint: dimension mismatch");
    return kind == Kind::Identity ? V : Matrix(B.transpose() * V);
  }
};

/// ||A||_2 via power iteration on A^T A. Relative tolerance 1e-8, cap 5000.
inline double operator_norm(const LinearMap& A) {
  if (A.kind == LinearMap::Kind::Identity) return 1.0;
  std::mt19937_64 rng(12345);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Eigen::VectorXd v(A.B.cols());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = gauss(rng);
  v.normalize();
  double lam = 0.0;
  for (int it = 0; it < 5000; ++it) {
    Eigen::VectorXd w = A.B.transpose() * (A.B * v);
    const double lam_new = w.norm();
    if (lam_new == 0.0) return 0.0;
    v = w / lam_new;
    if (std::abs(lam_new - lam) <= 1e-8 * lam_new) return std::sqrt(lam_new);
    lam = lam_new;
  }
  throw std::runtime_error(
      "operator_norm: power iteration did not converge after 5000 iterations, "
      "last estimate " + std::to_string(std::sqrt(lam)));
}

enum class ProblemKind { SparsePca, Dpcp };

/// Bundle of smooth term, nonsmooth term, linear map and the constants used
/// by the analysis-side formulas (L, M, D).
struct CompositeProblem {
  ProblemKind kind;
  std::function<double(const Matrix&)> f_value;
  std::function<Matrix(const Matrix&)> f_euclid_grad;
  NonsmoothTerm g;
  LinearMap A;
  int n = 0;
  int p = 0;
  double L = 0;        // Lipschitz constant of grad f
  double M = 0;        // bound on ||grad f|| over the manifold
  double D = 0;        // manifold diameter
  double a_norm = 1;   // ||A||_2
  double ata_norm = 1; // ||A^T A||_2
};

/// F(U) = f(U) + g(A U). U need not be on the manifold.
inline double objective(const CompositeProblem& prob, const Matrix& U) {
  return prob.f_value(U) + prob.g.value(prob.A.apply(U));
}

/// Sparse PCA: f(X) = -Tr(X^T A^T A X)/2 over St(n,p), g = mu ||.||_1, A = I.
inline CompositeProblem spca_problem(const Matrix& Adata, double mu, int p) {
  const int n = static_cast<int>(Adata.cols());
  if (p < 1 || p > std::min<int>(static_cast<int>(Adata.rows()), n))
    throw std::invalid_argument("spca_problem: need 1 <= p <= min(m, n)");
  auto G = std::make_shared<Matrix>(Adata.transpose() * Adata);

  CompositeProblem prob;
  prob.kind = ProblemKind::SparsePca;
  prob.f_value = [G](const Matrix& X) {
    return -0.5 * (X.transpose() * (*G) * X).trace();
  };
  prob.f_euclid_grad = [G](const Matrix& X) { return Matrix(-(*G) * X); };
  prob.g = NonsmoothTerm::weighted_l1(mu, n, p);
  prob.A = LinearMap::identity(n, p);
  prob.n = n;
  prob.p = p;
  prob.a_norm = 1.0;
  prob.ata_norm = 1.0;
  prob.L = operator_norm(LinearMap::left_multiply(*G, 1));
  prob.M = prob.L * std::sqrt(static_cast<double>(p));
  prob.D = 2.0 * std::sqrt(static_cast<double>(p));
  return prob;
}

/// DPCP: f = 0, g = ||.||_1, A(X) = Y^T X over St(n,p).
inline CompositeProblem dpcp_problem(const Matrix& Y, int p) {
  const int n = static_cast<int>(Y.rows());
  if (p < 1 || p > n) throw std::invalid_argument("dpcp_problem: need 1 <= p <= n");

  CompositeProblem prob;
  prob.kind = ProblemKind::Dpcp;
  prob.f_value = [](const Matrix&) { return 0.0; };
  prob.f_euclid_grad = [n, p](const Matrix&) { return Matrix::Zero(n, p).eval(); };
  prob.g = NonsmoothTerm::weighted_l1(1.0, static_cast<int>(Y.cols()), p);
  prob.A = LinearMap::left_multiply(Y.transpose(), p);
  prob.n = n;
  prob.p = p;
  prob.a_norm = operator_norm(prob.A);
  prob.ata_norm = prob.a_norm * prob.a_norm;
  prob.L = 0.0;
  prob.M = 0.0;
  prob.D = 2.0 * std::sqrt(static_cast<double>(p));
  return prob;
}

/// m-by-n matrix with i.i.d. standard Gaussian entries, deterministic per seed.
inline Matrix gen_gaussian(int m, int n, unsigned seed) {
  if (m < 1 || n < 1) throw std::invalid_argument("gen_gaussian: dims must be >= 1");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(m, n);
  for (Eigen::Index j = 0; j < n; ++j)
    for (Eigen::Index i = 0; i < m; ++i) G(i, j) = gauss(rng);
  return G;
}

/// Synthetic robust-subspace data Y = [S R, O]: p1 inliers in span(S), p2
/// Gaussian outliers.
struct DpcpDataset {
  Matrix Y;  // n x (p1 + p2)
  Matrix S;  // n x d, orthonormal inlier basis
  int p1 = 0;
  int p2 = 0;
  int d = 0;
};

inline DpcpDataset gen_dpcp_data(int n, int d, int p1, int p2, unsigned seed) {
  if (d >= n) throw std::invalid_argument("gen_dpcp_data: need d < n");
  if (p1 < 1 || p2 < 0)
    throw std::invalid_argument("gen_dpcp_data: need p1 >= 1, p2 >= 0");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  auto draw = [&](int r, int c) {
    Matrix G(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) G(i, j) = gauss(rng);
    return G;
  };
  DpcpDataset data;
  data.d = d;
  data.p1 = p1;
  data.p2 = p2;
  data.S = detail::qr_positive(draw(n, d));
  Matrix R = draw(d, p1);
  data.Y.resize(n, p1 + p2);
  data.Y.leftCols(p1) = data.S * R;
  if (p2 > 0) data.Y.rightCols(p2) = draw(n, p2);
  return data;
}

}  // namespace radmm

#endif  // RADMM_PROBLEMS_HPP
