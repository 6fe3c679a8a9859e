#pragma once

#include <Eigen/Core>

#include <cstdint>
#include <functional>

namespace gptw {

/// Applies a symmetric operator to every column of a block.
using BlockOperator = std::function<void(const Eigen::MatrixXd& in, Eigen::MatrixXd& out)>;

struct EigenOptions {
  int max_iters = 3000;
  /// Converged when ||A x - lambda B x|| <= tol (||A x|| + max(|lambda|, a) ||B x||),
  /// a the largest Ritz value magnitude met during the iteration.
  double tol = 1e-11;
  /// Extra block columns beyond the requested count.
  int guard = 4;
  std::uint64_t seed = 1;
  void validate() const;
};

struct EigenResult {
  Eigen::VectorXd values;   // ascending
  Eigen::MatrixXd vectors;  // B-orthonormal columns
  Eigen::VectorXd residuals;
  int iterations = 0;
};

/// Smallest `count` eigenpairs of A x = lambda B x restricted to the
/// B-orthogonal complement of span(constraints), by block LOBPCG.
/// `B` and `precond` may be empty (identity). Small problems are solved
/// densely. Throws NoConvergence when the budget is exhausted.
EigenResult lobpcg(Eigen::Index n, int count, const BlockOperator& A, const BlockOperator& B,
                   const BlockOperator& precond, const Eigen::MatrixXd& constraints,
                   const EigenOptions& opts = {});

}  // namespace gptw
