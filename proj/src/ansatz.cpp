#include "gptw/ansatz.hpp"

#include "gptw/error.hpp"
#include "gptw/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <string>

namespace gptw {

using std::numbers::pi;

namespace {

// Pade approximant of the Ginzburg-Landau vortex amplitude.
double core_profile(double r) { return r / std::sqrt(r * r + 2.0); }

// 1 inside, 0 outside, quintic smoothstep in between.
double cutoff(double r, double inner, double outer) {
  if (r <= inner) return 1.0;
  if (r >= outer) return 0.0;
  const double t = (r - inner) / (outer - inner);
  return 1.0 - t * t * t * (t * (6.0 * t - 15.0) + 10.0);
}

}  // namespace

VortexAnsatz VortexAnsatz::with_defaults(double R) {
  return VortexAnsatz{R, 1.0, 1.25 * R, 1.75 * R};
}

void VortexAnsatz::validate() const {
  if (!(R >= 2.0)) throw InvalidArgument("vortex half-separation R must be >= 2");
  if (!(core_width > 0.0)) throw InvalidArgument("core width must be positive");
  if (!(cutoff_inner > R) || !(cutoff_outer > cutoff_inner))
    throw InvalidArgument("cutoff radii must satisfy R < cutoff_inner < cutoff_outer");
}

Complex VortexAnsatz::value(std::span<const double> offset) const {
  double r2 = 0.0;
  for (double x : offset) r2 += x * x;
  const double r = std::sqrt(r2);
  if (r >= cutoff_outer) return 1.0;

  // Meridian coordinates: z = x_1 + i y with y = x_2 (pair) or the distance
  // from the x_1 axis (ring).
  const double x1 = offset[0];
  const double y = offset.size() == 2 ? offset[1] : std::hypot(offset[1], offset[2]);
  const Complex z(x1, y);
  const Complex upper(0.0, R), lower(0.0, -R);
  const double modulus = core_profile(std::abs(z - upper) / core_width) *
                         core_profile(std::abs(z - lower) / core_width);
  // Charge -1 at +R and +1 at -R: the phase drops by 2 pi across the segment
  // between the cores, which makes the momentum along x_1 positive.
  const double phase = -std::arg((z - upper) * std::conj(z - lower));
  const double chi = cutoff(r, cutoff_inner, cutoff_outer);
  return std::polar(1.0 + chi * (modulus - 1.0), chi * phase);
}

namespace ansatz {

ComplexField constant(double theta, const TorusGrid& grid) {
  return ComplexField::constant(grid, std::polar(1.0, theta));
}

namespace {
double plane_wave_beta(int k, double c, double T) {
  const double alpha = 2.0 * pi * k / T;
  return alpha * alpha + c * alpha;
}
}  // namespace

ComplexField plane_wave(int k, double c, const TorusGrid& grid) {
  const double T = grid.period();
  const double beta = plane_wave_beta(k, c, T);
  if (!(beta < 1.0))
    throw NoSuchSolution("no plane wave with k = " + std::to_string(k) + " at T = " + std::to_string(T) +
                         ": amplitude^2 = " + std::to_string(1.0 - beta) + " <= 0");
  const double rho = std::sqrt(1.0 - beta);
  const double alpha = 2.0 * pi * k / T;
  return ComplexField::sample(grid, [&](std::span<const double> x) { return std::polar(rho, alpha * x[0]); });
}

double plane_wave_action(int k, double c, const TorusGrid& grid) {
  const double beta = plane_wave_beta(k, c, grid.period());
  if (!(beta < 1.0)) throw NoSuchSolution("no plane wave for these parameters");
  return grid.volume() * (beta / 2.0 - beta * beta / 4.0);
}

double plane_wave_onset(double c) { return pi * (std::sqrt(c * c + 4.0) - c); }

ComplexField vortex_test_function(const VortexAnsatz& a, const TorusGrid& grid) {
  a.validate();
  if (!(grid.period() > a.support_diameter()))
    throw SupportTooLarge("vortex support diameter " + std::to_string(a.support_diameter()) +
                          " does not fit period " + std::to_string(grid.period()));
  const double center = 0.5 * grid.period();
  return ComplexField::sample(grid, [&](std::span<const double> x) {
    std::array<double, 3> offset{};
    for (std::size_t i = 0; i < x.size(); ++i) offset[i] = x[i] - center;
    return a.value(std::span<const double>(offset.data(), x.size()));
  });
}

ComplexField perturb(const ComplexField& f, double amplitude, int band, std::uint64_t seed) {
  if (!(amplitude >= 0.0)) throw InvalidArgument("perturbation amplitude must be >= 0");
  if (band < 1) throw InvalidArgument("perturbation band must be >= 1");
  if (!f.is_physical()) throw InvalidArgument("perturb expects a physical field");
  if (amplitude == 0.0) return f;

  const TorusGrid& grid = f.grid();
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  Eigen::VectorXcd hat = Eigen::VectorXcd::Zero(grid.node_count());
  for (Eigen::Index j = 0; j < hat.size(); ++j) {
    auto idx = grid.unflatten(j);
    bool inside = true;
    for (int a = 0; a < grid.dim(); ++a) inside = inside && std::abs(grid.wavenumber(a, idx[a])) <= band;
    // Draw for every node so the stream does not depend on the band.
    const Complex z(normal(rng), normal(rng));
    if (inside) hat[j] = z;
  }
  Eigen::VectorXcd noise = fft_inverse(grid, hat);
  const double norm = std::sqrt(grid.cell_volume()) * noise.norm();
  noise *= amplitude * std::sqrt(grid.volume()) / norm;
  return ComplexField(grid, f.values() + noise);
}

std::vector<ScalingRow> scaling_table(const std::vector<double>& radii, double c, int dim, double spacing,
                                      double periods_per_R) {
  if (!(spacing > 0.0)) throw InvalidArgument("spacing must be positive");
  if (!(periods_per_R > 0.0)) throw InvalidArgument("periods_per_R must be positive");
  std::vector<ScalingRow> rows;
  for (double R : radii) {
    const auto shape = VortexAnsatz::with_defaults(R);
    const double T = periods_per_R * R;
    int size = static_cast<int>(std::ceil(T / spacing - 1e-9));
    size += size % 2;
    const auto f = vortex_test_function(shape, TorusGrid::cube(dim, std::max(size, 8), T));
    rows.push_back({R, T, std::max(size, 8), action(f, Params{.c = c})});
  }
  return rows;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw InvalidArgument("slope needs two or more matching points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(x[i] > 0 && y[i] > 0)) throw InvalidArgument("log-log slope needs positive data");
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= x.size();
  my /= y.size();
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
  }
  if (sxx == 0) throw InvalidArgument("log-log slope needs distinct x values");
  return sxy / sxx;
}

}  // namespace ansatz
}  // namespace gptw
