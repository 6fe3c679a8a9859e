#pragma once

#include "gptw/field.hpp"
#include "gptw/functionals.hpp"

#include <cstdint>
#include <span>
#include <vector>

namespace gptw {

/// Compactly supported vortex perturbation of the constant 1.
///
/// In two dimensions a vortex/antivortex pair sits at x_2 = +-R on the line
/// x_1 = 0 through the center, so that the pair carries momentum along x_1.
/// In three dimensions it is a vortex ring of radius R in the plane x_1 = 0
/// with axis x_1. Outside `cutoff_outer` the field is exactly 1.
struct VortexAnsatz {
  double R = 8.0;
  double core_width = 1.0;
  double cutoff_inner = 10.0;
  double cutoff_outer = 14.0;

  /// cutoff_inner = 1.25 R, cutoff_outer = 1.75 R, unit core width.
  static VortexAnsatz with_defaults(double R);

  void validate() const;
  double support_diameter() const { return 2.0 * cutoff_outer; }

  /// Value of 1 + upsilon_R at `offset` from the center, dimension = offset size.
  Complex value(std::span<const double> offset) const;
};

namespace ansatz {

/// The constant solution e^{i theta}.
ComplexField constant(double theta, const TorusGrid& grid);

/// Exact plane-wave critical point rho e^{i alpha x_1}, alpha = 2 pi k / T,
/// rho^2 = 1 - alpha^2 - c alpha. Throws NoSuchSolution when rho^2 <= 0.
ComplexField plane_wave(int k, double c, const TorusGrid& grid);

/// Action of the plane wave in closed form, T^N (beta/2 - beta^2/4).
double plane_wave_action(int k, double c, const TorusGrid& grid);

/// Smallest period admitting the k = -1 plane wave at speed c:
/// pi (sqrt(c^2 + 4) - c).
double plane_wave_onset(double c);

/// 1 + w_R: the ansatz centered in the cell and extended periodically.
/// Throws SupportTooLarge unless T > support diameter.
ComplexField vortex_test_function(const VortexAnsatz& a, const TorusGrid& grid);

/// Adds a seeded random field with modes |k_a| <= band whose L2 norm is
/// amplitude * T^{N/2}.
ComplexField perturb(const ComplexField& f, double amplitude, int band, std::uint64_t seed);

/// Diagnostics of 1 + w_R on the cube of side T = periods_per_R * R with
/// the given grid spacing (rounded up to an even node count).
struct ScalingRow {
  double R = 0.0;
  double T = 0.0;
  int size = 0;
  ActionReport report;
};
std::vector<ScalingRow> scaling_table(const std::vector<double>& radii, double c, int dim = 2,
                                      double spacing = 0.25, double periods_per_R = 4.0);

/// Least-squares slope of log y against log x.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace ansatz
}  // namespace gptw
