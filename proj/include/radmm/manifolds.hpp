#ifndef RADMM_MANIFOLDS_HPP
#define RADMM_MANIFOLDS_HPP

#include <Eigen/Dense>
#include <cmath>
#include <random>
#include <stdexcept>
#include <string>

namespace radmm {

using Matrix = Eigen::MatrixXd;

inline constexpr double kOrthTol = 1e-10;
inline constexpr double kTangentTol = 1e-8;

/// Retraction back onto the Stiefel manifold. QR uses the thin Q factor with
/// sign-corrected R (R_ii > 0), Polar uses (X+V)(I + V^T V)^{-1/2}.
enum class RetractionKind { QR, Polar };

struct SingularRetractionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require_finite(const Matrix& M, const char* what) {
  if (!M.allFinite())
    throw std::invalid_argument(std::string(what) + ": non-finite entries");
}

// Thin QR with positive diagonal of R, so the factorization is unique and
// deterministic for full-rank input.
inline Matrix qr_positive(const Matrix& M) {
  const Eigen::Index n = M.rows(), p = M.cols();
  Eigen::HouseholderQR<Matrix> qr(M);
  Matrix Q = qr.householderQ() * Matrix::Identity(n, p);
  Matrix R = qr.matrixQR().topRows(p).triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < p; ++j) {
    if (std::abs(R(j, j)) < 1e-14 * std::max<double>(1.0, M.norm()))
      throw SingularRetractionError("qr_positive: rank-deficient input");
    if (R(j, j) < 0) Q.col(j) = -Q.col(j);
  }
  return Q;
}

}  // namespace detail

/// A point on St(n,p): an n-by-p matrix with orthonormal columns.
class StiefelPoint {
 public:
  explicit StiefelPoint(Matrix data, double tol = kOrthTol) : data_(std::move(data)) {
    detail::require_finite(data_, "StiefelPoint");
    const Eigen::Index n = data_.rows(), p = data_.cols();
    if (p < 1 || p > n)
      throw std::invalid_argument("StiefelPoint: need 1 <= p <= n");
    const double err =
        (data_.transpose() * data_ - Matrix::Identity(p, p)).norm();
    if (err > tol)
      throw std::invalid_argument(
          "StiefelPoint: columns not orthonormal, ||X^T X - I|| = " +
          std::to_string(err));
  }

  const Matrix& mat() const { return data_; }
  Eigen::Index n() const { return data_.rows(); }
  Eigen::Index p() const { return data_.cols(); }

 private:
  Matrix data_;
};

/// An element of T_X St(n,p), i.e. X^T V + V^T X = 0.
struct TangentVector {
  Matrix data;
  Matrix base;  // the point the vector is tangent at
};

namespace detail {

// Projection onto T_X St(n,p): V - X sym(X^T V). Equals the spec form
// (I - XX^T)V + X skew(X^T V).
inline Matrix tangent_project_raw(const Matrix& X, const Matrix& V) {
  Matrix XtV = X.transpose() * V;
  return V - X * ((XtV + XtV.transpose()) * 0.5);
}

inline Matrix retract_raw(const Matrix& X, const Matrix& V, RetractionKind kind) {
  Matrix W = X + V;
  switch (kind) {
    case RetractionKind::QR:
      return qr_positive(W);
    case RetractionKind::Polar: {
      // (X+V)(I + V^T V)^{-1/2}; for tangent V this is the polar factor of X+V.
      const Eigen::Index p = X.cols();
      Eigen::SelfAdjointEigenSolver<Matrix> es(Matrix::Identity(p, p) +
                                               V.transpose() * V);
      if (es.eigenvalues().minCoeff() < 1e-14)
        throw SingularRetractionError("polar retraction: singular X + V");
      Matrix inv_sqrt = es.eigenvectors() *
                        es.eigenvalues().cwiseSqrt().cwiseInverse().asDiagonal() *
                        es.eigenvectors().transpose();
      return W * inv_sqrt;
    }
  }
  throw std::invalid_argument("retract: unknown retraction kind");
}

}  // namespace detail

inline TangentVector tangent_project(const StiefelPoint& X, const Matrix& V) {
  if (V.rows() != X.n() || V.cols() != X.p())
    throw std::invalid_argument("tangent_project: dimension mismatch");
  detail::require_finite(V, "tangent_project");
  return TangentVector{detail::tangent_project_raw(X.mat(), V), X.mat()};
}

inline StiefelPoint retract(const StiefelPoint& X, const TangentVector& V,
                            RetractionKind kind = RetractionKind::QR) {
  if (V.data.rows() != X.n() || V.data.cols() != X.p())
    throw std::invalid_argument("retract: dimension mismatch");
  if (V.data.norm() == 0.0) return X;  // Retr_x(0) = x exactly
  return StiefelPoint(detail::retract_raw(X.mat(), V.data, kind));
}

/// Q factor of an n-by-p standard Gaussian matrix; deterministic per seed.
inline StiefelPoint random_stiefel(int n, int p, unsigned seed) {
  if (p < 1 || p > n) throw std::invalid_argument("random_stiefel: need 1 <= p <= n");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  Matrix G(n, p);
  for (Eigen::Index j = 0; j < p; ++j)
    for (Eigen::Index i = 0; i < n; ++i) G(i, j) = gauss(rng);
  return StiefelPoint(detail::qr_positive(G));
}

/// Nearest-point (polar) projection onto St(n,p): U V^T from the thin SVD.
inline Matrix project_stiefel(const Matrix& B) {
  Eigen::JacobiSVD<Matrix> svd(B, Eigen::ComputeThinU | Eigen::ComputeThinV);
  if (svd.singularValues().minCoeff() < 1e-14)
    throw SingularRetractionError("project_stiefel: degenerate input");
  return svd.matrixU() * svd.matrixV().transpose();
}

}  // namespace radmm

#endif  // RADMM_MANIFOLDS_HPP
