#pragma once

#include "gptw/ansatz.hpp"
#include "gptw/functionals.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gptw {

enum class Classification { ZeroConstant, UnitConstant, PlaneWave, Vortexful, OtherNonconstant };

std::string to_string(Classification c);
inline bool is_constant(Classification c) {
  return c == Classification::ZeroConstant || c == Classification::UnitConstant;
}

inline constexpr double kDefaultClassTol = 1e-6;

/// Nonlinear conjugate gradient settings (Polak-Ribiere+, backtracking).
struct MinimizeOptions {
  int max_iters = 50000;
  /// Stop when ||gradient||_{L2} <= grad_tol; <= 0 selects 1e-8 T^{N/2}.
  double grad_tol = 0.0;
  /// Fallback trial step when the curvature along the direction is not positive.
  double initial_step = 1.0;
  double backtrack = 0.5;
  double sufficient_decrease = 1e-4;
  int restart_period = 50;
  bool precondition = true;
  double class_tol = kDefaultClassTol;
  /// Progress lines "iteration action residual" every log_every iterations.
  std::ostream* log = nullptr;
  int log_every = 500;

  void validate() const;
  double resolved_grad_tol(const TorusGrid& grid) const;
};

/// A converged (or best available) field with its diagnostics.
struct CriticalPoint {
  ComplexField field;
  ActionReport report;
  double residual = 0.0;
  Classification classification = Classification::OtherNonconstant;
  std::optional<std::vector<int>> windings;
  Certificate certificates;
  bool converged = false;
  int iterations = 0;
  /// Action after every accepted step, starting with the initial value.
  std::vector<double> action_history;
};

/// Diagnoses a field: action, residual, class, windings and certificates.
CriticalPoint analyze(const ComplexField& f, const Params& p, double class_tol = kDefaultClassTol);

Classification classify(const ComplexField& f, double class_tol = kDefaultClassTol);

/// Descends the action from `init`. The result carries converged = false
/// when the iteration budget runs out or the line search stalls.
/// Throws NonFiniteValue if an iterate leaves the finite range.
CriticalPoint minimize_action(const ComplexField& init, const Params& p, const MinimizeOptions& opts = {});

struct ExperimentRow {
  double c = 0.0;
  double T = 0.0;
  double action = 0.0;
  double residual = 0.0;
  Classification classification = Classification::OtherNonconstant;
  bool converged = false;
};

std::string experiment_csv_header();
std::string to_csv(const ExperimentRow& row);

struct ExperimentResult {
  CriticalPoint point;
  ExperimentRow row;
};

/// Minimizes from 1 + w_R on a `resolution`^2 grid of period T.
ExperimentResult theorem_E_experiment(double c, double T, int resolution, double R,
                                      const MinimizeOptions& opts = {});
/// Same experiment from an explicit initial field.
ExperimentResult theorem_E_experiment(const ComplexField& init, double c, const MinimizeOptions& opts = {});

}  // namespace gptw
