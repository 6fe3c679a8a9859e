#include "gptw/lobpcg.hpp"

#include "gptw/error.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace gptw {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

void EigenOptions::validate() const {
  if (max_iters < 1) throw InvalidArgument("eigen max_iters must be >= 1");
  if (!(tol > 0.0)) throw InvalidArgument("eigen tol must be positive");
  if (guard < 0) throw InvalidArgument("eigen guard must be >= 0");
}

namespace {

struct Problem {
  const BlockOperator& A;
  const BlockOperator& B;
  const BlockOperator& T;
  MatrixXd Y;   // B-orthonormal constraints
  MatrixXd BY;

  MatrixXd apply_A(const MatrixXd& X) const {
    MatrixXd out(X.rows(), X.cols());
    A(X, out);
    return out;
  }
  MatrixXd apply_B(const MatrixXd& X) const {
    if (!B) return X;
    MatrixXd out(X.rows(), X.cols());
    B(X, out);
    return out;
  }
  void project(MatrixXd& X) const {
    if (Y.cols() > 0) X -= Y * (BY.transpose() * X);
  }
};

// Columns Q = S V D^{-1/2} spanning S with Q^T B Q = I, dropping directions
// whose Gram eigenvalue is negligible.
MatrixXd orthonormal_coefficients(const MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (gram + gram.transpose()));
  const VectorXd& d = eig.eigenvalues();
  const double cut = 1e-13 * std::max(d.maxCoeff(), 1e-300);
  std::vector<Index> keep;
  for (Index i = 0; i < d.size(); ++i)
    if (d[i] > cut) keep.push_back(i);
  MatrixXd Q(gram.rows(), static_cast<Index>(keep.size()));
  for (std::size_t j = 0; j < keep.size(); ++j)
    Q.col(static_cast<Index>(j)) = eig.eigenvectors().col(keep[j]) / std::sqrt(d[keep[j]]);
  return Q;
}

EigenResult dense_solve(Index n, int count, const Problem& pr) {
  MatrixXd I = MatrixXd::Identity(n, n);
  pr.project(I);
  MatrixXd Q0 = orthonormal_coefficients(I.transpose() * pr.apply_B(I));
  MatrixXd S = I * Q0;
  MatrixXd AS = pr.apply_A(S);
  MatrixXd reduced = S.transpose() * AS;
  Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (reduced + reduced.transpose()));
  if (eig.info() != Eigen::Success) throw NoConvergence("dense eigensolve failed");
  if (eig.eigenvalues().size() < count) throw InvalidArgument("eigen count exceeds the constrained dimension");
  EigenResult r;
  r.values = eig.eigenvalues().head(count);
  r.vectors = S * eig.eigenvectors().leftCols(count);
  MatrixXd res = pr.apply_A(r.vectors) - pr.apply_B(r.vectors) * r.values.asDiagonal();
  if (pr.Y.cols() > 0) res -= pr.BY * (pr.Y.transpose() * res);
  r.residuals = res.colwise().norm().transpose();
  return r;
}

}  // namespace

EigenResult lobpcg(Index n, int count, const BlockOperator& A, const BlockOperator& B,
                   const BlockOperator& precond, const MatrixXd& constraints, const EigenOptions& opts) {
  opts.validate();
  if (count < 1) throw InvalidArgument("eigen count must be >= 1");
  if (!A) throw InvalidArgument("eigen operator is empty");
  if (constraints.cols() > 0 && constraints.rows() != n) throw InvalidArgument("constraint size mismatch");

  Problem pr{A, B, precond, MatrixXd(n, 0), MatrixXd(n, 0)};
  if (constraints.cols() > 0) {
    MatrixXd BY = pr.apply_B(constraints);
    MatrixXd Q = orthonormal_coefficients(constraints.transpose() * BY);
    pr.Y = constraints * Q;
    pr.BY = BY * Q;
  }

  const Index free_dim = n - pr.Y.cols();
  if (count > free_dim) throw InvalidArgument("eigen count exceeds the constrained dimension");
  const Index m = std::min<Index>(count + opts.guard, free_dim);
  if (3 * m >= free_dim) return dense_solve(n, count, pr);

  std::mt19937_64 rng(opts.seed);
  std::normal_distribution<double> normal;
  MatrixXd X(n, m);
  for (Index j = 0; j < m; ++j)
    for (Index i = 0; i < n; ++i) X(i, j) = normal(rng);
  pr.project(X);

  MatrixXd P(n, 0), AP(n, 0), BP(n, 0);
  VectorXd lambda;
  MatrixXd AX, BX;
  {
    MatrixXd BX0 = pr.apply_B(X);
    MatrixXd Q = orthonormal_coefficients(X.transpose() * BX0);
    X = X * Q;
    AX = pr.apply_A(X);
    BX = BX0 * Q;
    MatrixXd reduced = X.transpose() * AX;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (reduced + reduced.transpose()));
    X = X * eig.eigenvectors();
    AX = AX * eig.eigenvectors();
    BX = BX * eig.eigenvectors();
    lambda = eig.eigenvalues();
  }

  // Largest Ritz magnitude seen so far: a lower estimate of ||A|| in the
  // B-norm, so eigenvalues near zero get an absolute residual scale.
  double anorm = lambda.cwiseAbs().maxCoeff();
  EigenResult result;
  for (int it = 1; it <= opts.max_iters; ++it) {
    auto residual = [&] {
      MatrixXd R = AX - BX * lambda.asDiagonal();
      // Constrained residual: drop the part along B Y.
      if (pr.Y.cols() > 0) R -= pr.BY * (pr.Y.transpose() * R);
      return R;
    };
    MatrixXd R = residual();
    VectorXd res = R.colwise().norm().transpose();
    auto converged = [&] {
      for (int j = 0; j < count; ++j) {
        const double scale = AX.col(j).norm() + std::max(std::abs(lambda[j]), anorm) * BX.col(j).norm();
        if (res[j] > opts.tol * std::max(scale, 1e-300)) return false;
      }
      return true;
    };
    if (converged()) {
      // Confirm with fresh operator images before accepting.
      AX = pr.apply_A(X);
      BX = pr.apply_B(X);
      R = residual();
      res = R.colwise().norm().transpose();
    }
    if (converged()) {
      result.values = lambda.head(count);
      result.vectors = X.leftCols(count);
      result.residuals = res.head(count);
      result.iterations = it - 1;
      return result;
    }

    MatrixXd W(n, m);
    if (precond)
      precond(R, W);
    else
      W = R;
    pr.project(W);
    for (Index j = 0; j < W.cols(); ++j) {
      const double norm = W.col(j).norm();
      if (norm > 0) W.col(j) /= norm;
    }
    MatrixXd AW = pr.apply_A(W);
    MatrixXd BW = pr.apply_B(W);

    const Index k = m + W.cols() + P.cols();
    MatrixXd S(n, k), AS(n, k), BS(n, k);
    S << X, W, P;
    AS << AX, AW, AP;
    BS << BX, BW, BP;
    MatrixXd Q = orthonormal_coefficients(S.transpose() * BS);
    if (Q.cols() < m) throw NoConvergence("LOBPCG basis collapsed");
    MatrixXd reduced = Q.transpose() * (S.transpose() * AS) * Q;
    Eigen::SelfAdjointEigenSolver<MatrixXd> eig(0.5 * (reduced + reduced.transpose()));
    if (eig.info() != Eigen::Success) throw NoConvergence("LOBPCG Rayleigh-Ritz failed");
    anorm = std::max(anorm, eig.eigenvalues().cwiseAbs().maxCoeff());
    MatrixXd C = Q * eig.eigenvectors().leftCols(m);
    lambda = eig.eigenvalues().head(m);

    // Search direction: the part of the new block outside the old X.
    MatrixXd Cx = C.topRows(m);
    MatrixXd Crest = C.bottomRows(k - m);
    MatrixXd rest(n, k - m), Arest(n, k - m), Brest(n, k - m);
    rest << W, P;
    Arest << AW, AP;
    Brest << BW, BP;
    P = rest * Crest;
    AP = Arest * Crest;
    BP = Brest * Crest;
    X = X * Cx + P;
    // Recompute the X images periodically to limit drift.
    if (it % 20 == 0) {
      pr.project(X);
      AX = pr.apply_A(X);
      BX = pr.apply_B(X);
    } else {
      AX = AX * Cx + AP;
      BX = BX * Cx + BP;
    }
  }
  throw NoConvergence("LOBPCG did not converge in " + std::to_string(opts.max_iters) + " iterations");
}

}  // namespace gptw
