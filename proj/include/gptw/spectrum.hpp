#pragma once

#include "gptw/functionals.hpp"
#include "gptw/lobpcg.hpp"
#include "gptw/minimize.hpp"

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace gptw {

/// One eigenvalue of the Hessian at a constant, with its Fourier label.
struct SpectrumEntry {
  double value = 0.0;
  /// Symbol value |xi|^2 + 1 + branch sqrt(1 + c^2 xi_1^2) matched to `value`.
  double analytic = 0.0;
  std::vector<int> mode;
  /// -1 lower branch, +1 upper branch.
  int branch = 0;
};

struct SpectrumReport {
  double c = 0.0;
  double T = 0.0;
  double theta = 0.0;
  /// Smallest eigenvalues on the complement of span{i e^{i theta}}, ascending.
  std::vector<SpectrumEntry> smallest_eigenvalues;
  /// ||H[i e^{i theta}]||_{L2}.
  double degenerate_residual = 0.0;
  /// Smallest symbol value over the complement.
  double analytic_min = 0.0;
  bool positivity = false;
  int iterations = 0;
  /// Largest |value - analytic| / max(1, |analytic|).
  double max_symbol_error() const;
};

/// Symbol eigenvalues at a constant on the grid, ascending, with the k = 0
/// degenerate zero left out (its upper partner 2 is kept with branch +1).
std::vector<SpectrumEntry> symbol_spectrum(double c, const TorusGrid& grid);

/// Hessian of the action at `base`, assembled column by column in the real
/// coordinates (Re f_0, Im f_0, Re f_1, ...). At most 512 nodes.
Eigen::MatrixXd dense_hessian(const ComplexField& base, const Params& p);

/// Real coordinates <-> complex node vectors, as used by dense_hessian.
Eigen::VectorXd to_real(const Eigen::VectorXcd& v);
Eigen::VectorXcd to_complex(const Eigen::VectorXd& v);

SpectrumReport hessian_spectrum_at_constant(double theta, const Params& p, const TorusGrid& grid, int count,
                                            const EigenOptions& opts = {});

/// Smallest Rayleigh quotient l2(H u, u) / l2(u, u) at a general base field
/// and its minimizer, by LOBPCG.
struct LowestMode {
  double value = 0.0;
  ComplexField direction;
};
LowestMode lowest_hessian_mode(const ComplexField& base, const Params& p, const EigenOptions& opts = {});

struct PoincareConstant {
  double lambda = 0.0;  // smallest nonzero eigenvalue of -Lap
  double C_T = 0.0;     // lambda / 4
};
PoincareConstant poincare_constant(const TorusGrid& grid);

/// inf of int |grad u|^2 / int f u^2 over int f u = 0, for real 1/2 <= f <= 2.
double weighted_eigenvalue(const Eigen::VectorXd& f, const TorusGrid& grid, const EigenOptions& opts = {});

/// Same quotient by a dense generalized eigensolve (small grids only).
double weighted_eigenvalue_dense(const Eigen::VectorXd& f, const TorusGrid& grid);

/// Sufficient bound below which every solution is constant: 2 pi / sqrt(8 + 4 c^2).
double case1_bound(double c);

/// Whether the Hessian at constants is positive on the complement: c^2 < 2 + (2 pi / T)^2.
bool symbol_positivity(double c, double T);

struct ScanRow {
  double T = 0.0;
  bool all_constant = true;
  int runs = 0;
  int nonconstant = 0;
  int not_converged = 0;
  /// Lowest action among converged runs.
  double min_action = 0.0;
  /// Classification of the lowest-action converged run.
  Classification best = Classification::UnitConstant;
};

struct ThresholdReport {
  double c = 0.0;
  double case1_bound = 0.0;
  double plane_wave_onset = 0.0;
  /// Largest scanned T with every scanned T up to it all-constant, when the
  /// scan found a nonconstant point above it.
  std::optional<double> empirical_onset;
  /// Smallest scanned T with a nonconstant critical point.
  std::optional<double> onset_upper;
  std::vector<ScanRow> rows;
};

struct ScanOptions {
  int band = 4;
  std::uint64_t seed = 0;
  /// Vortex-pair radius for the extra 1 + w_R start when it fits.
  double R = 8.0;
  MinimizeOptions minimize;
  void validate() const;
};

/// Multi-start descent for each T (amplitudes 0.1, 0.5, 1.0 cycled) on a
/// resolution^2 grid. Runs in parallel over all (T, start) pairs.
ThresholdReport constancy_scan(double c, const std::vector<double>& T_values, int starts, int resolution,
                               const ScanOptions& opts = {});

std::string spectrum_csv(const SpectrumReport& r);
/// Per-T scan rows.
std::string threshold_csv(const ThresholdReport& r);
/// One row: c, the two analytic references and the empirical brackets.
std::string threshold_summary_csv(const ThresholdReport& r);

/// Positivity flag computed by hessian_spectrum_at_constant on a
/// resolution^2 grid for every (c, T); rows follow c, columns follow T.
std::vector<std::vector<bool>> positivity_lattice(const std::vector<double>& c_values,
                                                  const std::vector<double>& T_values, int resolution = 16);
/// Plain PGM of a positivity lattice (white = positive).
void write_positivity_pgm(std::ostream& os, const std::vector<std::vector<bool>>& lattice);

}  // namespace gptw
