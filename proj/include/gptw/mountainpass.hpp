#pragma once

#include "gptw/ansatz.hpp"
#include "gptw/minimize.hpp"

#include <iosfwd>
#include <optional>
#include <vector>

namespace gptw {

/// Discrete path of fields on one grid from the constant 1 to 1 + w_R.
struct Path {
  std::vector<ComplexField> nodes;
  /// M = max_t I(1 + t w_R) over the straight path, when known.
  std::optional<double> upper_bound;

  const TorusGrid& grid() const { return nodes.front().grid(); }
  /// Throws InvalidArgument / GridMismatch on a malformed path.
  void validate() const;
};

/// Straight path 1 + t_j w_R at uniform t_j in [0, 1].
Path init_path(double c, const TorusGrid& grid, const VortexAnsatz& shape, int node_count = 33);
Path init_path(double c, const TorusGrid& grid, double R, int node_count = 33);

/// max over t in [0, 1] of the discrete action of 1 + t w_R, from the exact
/// quartic t^2 a2 + t^3 a3 + t^4 a4 (w = field - 1).
struct StraightPathBound {
  double a2 = 0.0, a3 = 0.0, a4 = 0.0;
  double t_max = 0.0;
  double M = 0.0;
  double at(double t) const { return t * t * (a2 + t * (a3 + t * a4)); }
};
StraightPathBound straight_path_bound(const ComplexField& end, const Params& p);

std::vector<double> path_actions(const Path& path, const Params& p);

/// Index of the largest entry; ties within 1e-12 go to the lowest index.
std::size_t max_node(const std::vector<double>& actions);

struct RelaxOptions {
  int max_sweeps = 4000;
  /// Initial step of the preconditioned descent; adapted per sweep.
  double step = 0.5;
  double max_step = 1.0;
  double rel_tol = 1e-7;
  int patience = 100;
  bool precondition = true;
  std::ostream* log = nullptr;
  int log_every = 100;
  void validate() const;
};

struct RelaxResult {
  Path path;
  double gamma = 0.0;
  /// Gamma after each accepted sweep, starting with the initial path.
  std::vector<double> gamma_history;
  std::vector<double> actions;
  int sweeps = 0;
  /// Gamma stopped decreasing by rel_tol over `patience` sweeps.
  bool stalled = false;
};

/// String method: preconditioned descent of interior nodes, then L2
/// arclength reparametrization. Sweeps that raise gamma are rejected.
RelaxResult relax_path(const Path& path, const Params& p, const RelaxOptions& opts = {});

struct SaddleOptions {
  /// Stop when ||gradient||_{L2} <= grad_tol; <= 0 selects 1e-8 T^{N/2}.
  double grad_tol = 0.0;
  int max_newton = 200;
  int max_minres = 400;
  double minres_tol = 1e-4;
  int probes = 50;
  std::uint64_t seed = 1;
  double class_tol = kDefaultClassTol;
  std::ostream* log = nullptr;
  void validate() const;
};

struct SaddleResult {
  CriticalPoint saddle;
  double gamma = 0.0;
  double upper_bound = 0.0;
  /// Direction with l2(H w, w) < 0 at the saddle, and its Rayleigh quotient.
  ComplexField index_witness;
  double witness_quotient = 0.0;
  std::size_t start_node = 0;
  /// 0 < action <= M + 1e-8.
  bool level_in_range = false;
};

/// Refines the max node of `path` by Newton-MINRES on ||gradient||^2 and
/// checks the Morse index. The result carries converged = false when the
/// residual target is missed. Throws NotASaddle when no probe direction
/// has a negative Hessian form.
SaddleResult find_saddle(const Path& path, const Params& p, const SaddleOptions& opts = {});

/// Preconditioned MINRES for the symmetric model Hessian at `base`:
/// solves H x = b to relative tolerance `tol` in the preconditioner norm.
/// Returns the iteration count.
int minres(const ActionModel& model, const Eigen::VectorXcd& base, const Eigen::VectorXcd& b, Eigen::VectorXcd& x,
           double tol, int max_iters);

}  // namespace gptw
