#pragma once

#include "gptw/grid.hpp"

#include <Eigen/Core>

#include <complex>
#include <functional>
#include <span>
#include <vector>

namespace gptw {

using Complex = std::complex<double>;

enum class Representation { Physical, Spectral };

/// Complex samples of a T-periodic function on a TorusGrid.
///
/// In spectral representation entry j holds the Fourier coefficient of the
/// wave vector whose per-axis wavenumbers are `grid.wavenumber(a, idx[a])`,
/// normalized so that the zero mode is the mean of the physical samples.
class ComplexField {
 public:
  ComplexField(TorusGrid grid, Eigen::VectorXcd values,
               Representation rep = Representation::Physical);

  static ComplexField constant(const TorusGrid& grid, Complex value);
  static ComplexField zeros(const TorusGrid& grid) { return constant(grid, 0.0); }
  /// Samples `fn(x)` at every node, x = physical coordinates.
  static ComplexField sample(const TorusGrid& grid,
                             const std::function<Complex(std::span<const double>)>& fn);

  const TorusGrid& grid() const { return grid_; }
  const Eigen::VectorXcd& values() const { return values_; }
  Representation representation() const { return rep_; }
  bool is_physical() const { return rep_ == Representation::Physical; }

  Complex operator[](Eigen::Index i) const { return values_[i]; }

  ComplexField conjugate() const;
  /// Cyclic translation by a whole number of nodes per axis.
  ComplexField shifted(const std::array<int, 3>& offset) const;

  ComplexField& operator+=(const ComplexField& other);
  ComplexField& operator-=(const ComplexField& other);
  ComplexField& operator*=(Complex scale);

 private:
  TorusGrid grid_;
  Eigen::VectorXcd values_;
  Representation rep_;
};

ComplexField operator+(ComplexField a, const ComplexField& b);
ComplexField operator-(ComplexField a, const ComplexField& b);
ComplexField operator*(Complex s, ComplexField a);
ComplexField operator*(ComplexField a, Complex s);

/// Per-node Fourier symbols of a grid, in the node order of the spectral
/// representation.
struct SpectralSymbols {
  /// Derivative symbol 2*pi*k_a/T, zero at the Nyquist index of axis a.
  std::vector<Eigen::VectorXd> xi;
  /// |xi|^2 of the Laplacian; the Nyquist index keeps its full value so the
  /// discrete Laplacian has no spurious kernel.
  Eigen::VectorXd xi_squared;
  /// True where every per-axis |k_a| <= M_a/3 (two-thirds rule).
  Eigen::Array<bool, Eigen::Dynamic, 1> dealias_mask;
};

/// Cached symbols for a grid; safe to call concurrently.
const SpectralSymbols& spectral_symbols(const TorusGrid& grid);

ComplexField transform_forward(const ComplexField& f);
ComplexField transform_inverse(const ComplexField& f);

/// Partial derivative along `axis` (0-based) of a physical field.
ComplexField spectral_derivative(const ComplexField& f, int axis);
/// Laplacian (full symbol, Nyquist kept) of a physical field.
ComplexField laplacian(const ComplexField& f);

/// Real L2 product: integral of Re(a)Re(b) + Im(a)Im(b).
double l2_product(const ComplexField& a, const ComplexField& b);
double l2_norm(const ComplexField& a);
/// H1 product: integral of grad a . grad b + a . b.
double h1_product(const ComplexField& a, const ComplexField& b);

double sup_norm(const ComplexField& a);

/// Modulus and continuous phase of a vortexless field.
struct LiftResult {
  TorusGrid grid;
  Eigen::VectorXd rho;
  /// Unwrapped phase: periodic part plus 2*pi * sum_a w_a x_a / T.
  Eigen::VectorXd theta;
  std::vector<int> windings;

  /// theta with the linear winding part removed; T-periodic.
  Eigen::VectorXd periodic_theta() const;
  ComplexField reconstruct() const;
};

inline constexpr double kDefaultLiftFloor = 0.1;

/// Lifts f = rho e^{i theta}. Throws VortexPresent if min |f| < floor and
/// InconsistentWinding if the unwrapped phase depends on the path.
LiftResult lift(const ComplexField& f, double floor = kDefaultLiftFloor);

}  // namespace gptw
