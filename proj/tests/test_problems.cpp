#include "radmm/problems.hpp"

#include <gtest/gtest.h>

#include <random>

using namespace radmm;

TEST(LinearMap, AdjointConsistency) {
  std::mt19937_64 rng(5);
  std::normal_distribution<double> gauss(0, 1);
  Matrix B = gen_gaussian(6, 4, 9);
  LinearMap maps[] = {LinearMap::identity(4, 3), LinearMap::left_multiply(B, 3)};
  for (const LinearMap& A : maps) {
    for (int rep = 0; rep < 20; ++rep) {
      Matrix U(A.dom_rows, A.dom_cols), V(A.out_rows(), A.out_cols());
      for (int k = 0; k < U.size(); ++k) U(k) = gauss(rng);
      for (int k = 0; k < V.size(); ++k) V(k) = gauss(rng);
      const double lhs = A.apply(U).cwiseProduct(V).sum();
      const double rhs = U.cwiseProduct(A.adjoint(V)).sum();
      EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
    }
  }
}

TEST(OperatorNorm, IdentityAndDiagonal) {
  EXPECT_DOUBLE_EQ(operator_norm(LinearMap::identity(4, 2)), 1.0);
  Matrix D = Matrix::Zero(2, 2);
  D(0, 0) = 3;
  D(1, 1) = 1;
  EXPECT_NEAR(operator_norm(LinearMap::left_multiply(D, 1)), 3.0, 1e-7);
}

TEST(OperatorNorm, MatchesDenseSvd) {
  Matrix B = gen_gaussian(5, 4, 21);
  Eigen::JacobiSVD<Matrix> svd(B);
  EXPECT_NEAR(operator_norm(LinearMap::left_multiply(B, 2)),
              svd.singularValues()(0), 1e-6);
}

TEST(SpcaProblem, SimpleValues) {
  Matrix I2 = Matrix::Identity(2, 2);
  Matrix x(2, 1);
  x << 1, 0;

  CompositeProblem p0 = spca_problem(I2, 0.0, 1);
  EXPECT_NEAR(p0.f_value(x), -0.5, 1e-14);
  EXPECT_NEAR(objective(p0, x), -0.5, 1e-14);

  CompositeProblem p1 = spca_problem(I2, 1.0, 1);
  EXPECT_NEAR(objective(p1, x), 0.5, 1e-14);
  EXPECT_NEAR(objective(p1, Matrix::Zero(2, 1)), 0.0, 1e-14);

  EXPECT_THROW(spca_problem(I2, 1.0, 3), std::invalid_argument);
}

TEST(SpcaProblem, GradientFiniteDifferenceOracle) {
  Matrix A = gen_gaussian(5, 4, 33);
  CompositeProblem prob = spca_problem(A, 0.0, 2);
  std::mt19937_64 rng(12);
  std::normal_distribution<double> gauss(0, 1);
  Matrix X(4, 2);
  for (int k = 0; k < X.size(); ++k) X(k) = gauss(rng);
  Matrix G = prob.f_euclid_grad(X);
  const double h = 1e-6;
  for (int k = 0; k < X.size(); ++k) {
    Matrix Xp = X, Xm = X;
    Xp(k) += h;
    Xm(k) -= h;
    const double fd = (prob.f_value(Xp) - prob.f_value(Xm)) / (2 * h);
    EXPECT_NEAR(G(k), fd, 1e-6 * std::max(1.0, std::abs(fd)));
  }
}

TEST(SpcaProblem, Constants) {
  Matrix A = gen_gaussian(6, 5, 4);
  CompositeProblem prob = spca_problem(A, 0.5, 2);
  Eigen::SelfAdjointEigenSolver<Matrix> es(A.transpose() * A);
  const double lmax = es.eigenvalues().maxCoeff();
  EXPECT_NEAR(prob.L, lmax, 1e-6 * lmax);
  EXPECT_NEAR(prob.M, lmax * std::sqrt(2.0), 1e-6 * prob.M);
  EXPECT_NEAR(prob.D, 2.0 * std::sqrt(2.0), 1e-14);
}

TEST(DpcpProblem, SimpleValues) {
  Matrix I2 = Matrix::Identity(2, 2);
  Matrix x(2, 1);
  x << 1, 0;
  CompositeProblem prob = dpcp_problem(I2, 1);
  EXPECT_NEAR(objective(prob, x), 1.0, 1e-14);
  EXPECT_EQ(prob.f_value(x), 0.0);
  EXPECT_EQ(prob.f_euclid_grad(x), Matrix::Zero(2, 1));
}

TEST(DpcpProblem, NaiveSumOracle) {
  Matrix Y = gen_gaussian(4, 10, 8);
  CompositeProblem prob = dpcp_problem(Y, 2);
  StiefelPoint X = random_stiefel(4, 2, 3);
  double naive = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 2; ++j)
      naive += std::abs(Y.col(i).dot(X.mat().col(j)));
  EXPECT_NEAR(objective(prob, X.mat()), naive, 1e-10 * naive);
}

TEST(GenGaussian, DeterministicAndStandardized) {
  Matrix A = gen_gaussian(1000, 1000, 42);
  EXPECT_EQ(A, gen_gaussian(1000, 1000, 42));
  EXPECT_NE(A, gen_gaussian(1000, 1000, 43));
  const double mean = A.mean();
  const double var = (A.array() - mean).square().sum() / (A.size() - 1);
  EXPECT_NEAR(mean, 0.0, 0.01);
  EXPECT_NEAR(var, 1.0, 0.02);
}

TEST(GenDpcpData, InliersSpanSubspace) {
  DpcpDataset data = gen_dpcp_data(10, 3, 20, 15, 7);
  EXPECT_EQ(data.Y.cols(), 35);
  EXPECT_LT((data.S.transpose() * data.S - Matrix::Identity(3, 3)).norm(), 1e-12);
  Matrix inliers = data.Y.leftCols(20);
  Matrix resid = inliers - data.S * (data.S.transpose() * inliers);
  EXPECT_LT(resid.norm(), 1e-10);
  // inlier block has full rank d when p1 >= d
  Eigen::JacobiSVD<Matrix> svd(inliers);
  int rank = 0;
  for (int i = 0; i < svd.singularValues().size(); ++i)
    if (svd.singularValues()(i) > 1e-8) ++rank;
  EXPECT_EQ(rank, 3);
}

TEST(GenDpcpData, DeterministicAndValidated) {
  DpcpDataset a = gen_dpcp_data(8, 2, 10, 5, 1);
  DpcpDataset b = gen_dpcp_data(8, 2, 10, 5, 1);
  EXPECT_EQ(a.Y, b.Y);
  EXPECT_THROW(gen_dpcp_data(5, 5, 10, 5, 0), std::invalid_argument);
}
