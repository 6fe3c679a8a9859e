#include "gptw/field.hpp"

#include "gptw/error.hpp"
#include "gptw/fft.hpp"

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>

namespace gptw {

// ---------------------------------------------------------------------------
// TorusGrid

TorusGrid::TorusGrid(std::vector<int> sizes, double period)
    : sizes_(std::move(sizes)), period_(period) {
  if (sizes_.size() < 2 || sizes_.size() > 3)
    throw InvalidArgument("torus dimension must be 2 or 3");
  if (!(period_ > 0.0) || !std::isfinite(period_))
    throw InvalidArgument("torus period must be positive and finite");
  for (int m : sizes_) {
    if (m < 8 || m % 2 != 0)
      throw InvalidArgument("points per axis must be even and >= 8, got " + std::to_string(m));
    node_count_ *= m;
    cell_volume_ *= period_ / m;
  }
}

TorusGrid TorusGrid::cube(int dim, int size, double period) {
  return TorusGrid(std::vector<int>(static_cast<std::size_t>(std::max(dim, 0)), size), period);
}

double TorusGrid::volume() const { return std::pow(period_, dim()); }

std::array<int, 3> TorusGrid::unflatten(Eigen::Index flat) const {
  std::array<int, 3> idx{0, 0, 0};
  for (int a = dim() - 1; a >= 0; --a) {
    idx[a] = static_cast<int>(flat % sizes_[a]);
    flat /= sizes_[a];
  }
  return idx;
}

Eigen::Index TorusGrid::flatten(const std::array<int, 3>& idx) const {
  Eigen::Index flat = 0;
  for (int a = 0; a < dim(); ++a) flat = flat * sizes_[a] + idx[a];
  return flat;
}

Eigen::Index TorusGrid::stride(int axis) const {
  Eigen::Index s = 1;
  for (int a = dim() - 1; a > axis; --a) s *= sizes_[a];
  return s;
}

// ---------------------------------------------------------------------------
// ComplexField

ComplexField::ComplexField(TorusGrid grid, Eigen::VectorXcd values, Representation rep)
    : grid_(std::move(grid)), values_(std::move(values)), rep_(rep) {
  if (values_.size() != grid_.node_count())
    throw InvalidArgument("value count does not match grid node count");
  if (!values_.allFinite()) throw NonFiniteValue("field contains non-finite values");
}

ComplexField ComplexField::constant(const TorusGrid& grid, Complex value) {
  return ComplexField(grid, Eigen::VectorXcd::Constant(grid.node_count(), value));
}

ComplexField ComplexField::sample(const TorusGrid& grid,
                                  const std::function<Complex(std::span<const double>)>& fn) {
  Eigen::VectorXcd v(grid.node_count());
  std::array<double, 3> x{};
  for (Eigen::Index j = 0; j < v.size(); ++j) {
    auto idx = grid.unflatten(j);
    for (int a = 0; a < grid.dim(); ++a) x[a] = grid.coordinate(a, idx[a]);
    v[j] = fn(std::span<const double>(x.data(), static_cast<std::size_t>(grid.dim())));
  }
  return ComplexField(grid, std::move(v));
}

ComplexField ComplexField::conjugate() const {
  if (!is_physical()) throw InvalidArgument("conjugate expects a physical field");
  return ComplexField(grid_, values_.conjugate(), rep_);
}

ComplexField ComplexField::shifted(const std::array<int, 3>& offset) const {
  Eigen::VectorXcd out(values_.size());
  for (Eigen::Index j = 0; j < values_.size(); ++j) {
    auto idx = grid_.unflatten(j);
    for (int a = 0; a < grid_.dim(); ++a) {
      int m = grid_.size(a);
      idx[a] = ((idx[a] + offset[a]) % m + m) % m;
    }
    out[grid_.flatten(idx)] = values_[j];
  }
  return ComplexField(grid_, std::move(out), rep_);
}

namespace {
void require_compatible(const ComplexField& a, const ComplexField& b) {
  if (a.grid() != b.grid()) throw GridMismatch();
  if (a.representation() != b.representation())
    throw InvalidArgument("fields have different representations");
}
}  // namespace

ComplexField& ComplexField::operator+=(const ComplexField& other) {
  require_compatible(*this, other);
  values_ += other.values_;
  return *this;
}

ComplexField& ComplexField::operator-=(const ComplexField& other) {
  require_compatible(*this, other);
  values_ -= other.values_;
  return *this;
}

ComplexField& ComplexField::operator*=(Complex scale) {
  values_ *= scale;
  return *this;
}

ComplexField operator+(ComplexField a, const ComplexField& b) { return a += b; }
ComplexField operator-(ComplexField a, const ComplexField& b) { return a -= b; }
ComplexField operator*(Complex s, ComplexField a) { return a *= s; }
ComplexField operator*(ComplexField a, Complex s) { return a *= s; }

// ---------------------------------------------------------------------------
// Spectral calculus

namespace {

std::unique_ptr<SpectralSymbols> build_symbols(const TorusGrid& grid) {
  auto sym = std::make_unique<SpectralSymbols>();
  const Eigen::Index n = grid.node_count();
  const double base = 2.0 * std::numbers::pi / grid.period();
  sym->xi.assign(static_cast<std::size_t>(grid.dim()), Eigen::VectorXd::Zero(n));
  sym->xi_squared = Eigen::VectorXd::Zero(n);
  sym->dealias_mask.resize(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    auto idx = grid.unflatten(j);
    bool keep = true;
    for (int a = 0; a < grid.dim(); ++a) {
      const int k = grid.wavenumber(a, idx[a]);
      const double full = base * k;
      sym->xi_squared[j] += full * full;
      sym->xi[a][j] = (2 * k == -grid.size(a)) ? 0.0 : full;
      if (3 * std::abs(k) > grid.size(a)) keep = false;
    }
    sym->dealias_mask[j] = keep;
  }
  return sym;
}

void require_physical(const ComplexField& f) {
  if (!f.is_physical()) throw InvalidArgument("operation expects a physical field");
}

}  // namespace

const SpectralSymbols& spectral_symbols(const TorusGrid& grid) {
  static std::mutex mutex;
  static std::map<std::pair<std::vector<int>, double>, std::unique_ptr<SpectralSymbols>> cache;
  std::lock_guard lock(mutex);
  auto key = std::make_pair(grid.sizes(), grid.period());
  auto it = cache.find(key);
  if (it == cache.end()) it = cache.emplace(key, build_symbols(grid)).first;
  return *it->second;
}

ComplexField transform_forward(const ComplexField& f) {
  require_physical(f);
  return ComplexField(f.grid(), fft_forward(f.grid(), f.values()), Representation::Spectral);
}

ComplexField transform_inverse(const ComplexField& f) {
  if (f.is_physical()) throw InvalidArgument("transform_inverse expects a spectral field");
  return ComplexField(f.grid(), fft_inverse(f.grid(), f.values()), Representation::Physical);
}

ComplexField spectral_derivative(const ComplexField& f, int axis) {
  require_physical(f);
  if (axis < 0 || axis >= f.grid().dim()) throw InvalidArgument("derivative axis out of range");
  const auto& sym = spectral_symbols(f.grid());
  Eigen::VectorXcd hat = fft_forward(f.grid(), f.values());
  hat.array() *= Complex(0.0, 1.0) * sym.xi[axis].array().cast<Complex>();
  return ComplexField(f.grid(), fft_inverse(f.grid(), hat));
}

ComplexField laplacian(const ComplexField& f) {
  require_physical(f);
  const auto& sym = spectral_symbols(f.grid());
  Eigen::VectorXcd hat = fft_forward(f.grid(), f.values());
  hat.array() *= -sym.xi_squared.array().cast<Complex>();
  return ComplexField(f.grid(), fft_inverse(f.grid(), hat));
}

double l2_product(const ComplexField& a, const ComplexField& b) {
  require_physical(a);
  require_compatible(a, b);
  return a.grid().cell_volume() * (a.values().conjugate().cwiseProduct(b.values())).sum().real();
}

double l2_norm(const ComplexField& a) { return std::sqrt(l2_product(a, a)); }

double h1_product(const ComplexField& a, const ComplexField& b) {
  double sum = l2_product(a, b);
  for (int axis = 0; axis < a.grid().dim(); ++axis)
    sum += l2_product(spectral_derivative(a, axis), spectral_derivative(b, axis));
  return sum;
}

double sup_norm(const ComplexField& a) { return a.values().cwiseAbs().maxCoeff(); }

// ---------------------------------------------------------------------------
// Lifting

Eigen::VectorXd LiftResult::periodic_theta() const {
  Eigen::VectorXd out = theta;
  const double T = grid.period();
  for (Eigen::Index j = 0; j < out.size(); ++j) {
    auto idx = grid.unflatten(j);
    for (int a = 0; a < grid.dim(); ++a)
      out[j] -= 2.0 * std::numbers::pi * windings[a] * grid.coordinate(a, idx[a]) / T;
  }
  return out;
}

ComplexField LiftResult::reconstruct() const {
  Eigen::VectorXcd v(rho.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) v[j] = std::polar(rho[j], theta[j]);
  return ComplexField(grid, std::move(v));
}

LiftResult lift(const ComplexField& f, double floor) {
  require_physical(f);
  if (!(floor > 0.0)) throw InvalidArgument("lift floor must be positive");
  const TorusGrid& grid = f.grid();
  const auto& v = f.values();
  constexpr double kTwoPi = 2.0 * std::numbers::pi;
  constexpr double kPathTolerance = 1e-6;

  LiftResult out{grid, v.cwiseAbs(), Eigen::VectorXd::Zero(v.size()),
                 std::vector<int>(static_cast<std::size_t>(grid.dim()), 0)};
  const double min_modulus = out.rho.minCoeff();
  if (min_modulus < floor)
    throw VortexPresent("field modulus " + std::to_string(min_modulus) + " below lift floor " +
                        std::to_string(floor));

  auto step = [&](Eigen::Index from, Eigen::Index to) {
    return std::arg(v[to] * std::conj(v[from]));
  };

  // Sweep axis by axis: after axis a every node with idx[b] == 0 for b > a is set.
  out.theta[0] = std::arg(v[0]);
  for (int a = 0; a < grid.dim(); ++a) {
    const Eigen::Index s = grid.stride(a);
    for (Eigen::Index j = 0; j < v.size(); ++j) {
      auto idx = grid.unflatten(j);
      bool on_front = idx[a] >= 1;
      for (int b = a + 1; b < grid.dim(); ++b) on_front = on_front && idx[b] == 0;
      if (on_front) out.theta[j] = out.theta[j - s] + step(j - s, j);
    }
    // Winding along the axis line through the origin.
    const Eigen::Index last = (grid.size(a) - 1) * s;
    const double turn = out.theta[last] + step(last, 0) - out.theta[0];
    out.windings[a] = static_cast<int>(std::lround(turn / kTwoPi));
  }

  for (Eigen::Index j = 0; j < v.size(); ++j) {
    auto idx = grid.unflatten(j);
    for (int a = 0; a < grid.dim(); ++a) {
      const bool wraps = idx[a] == grid.size(a) - 1;
      const Eigen::Index next = wraps ? j - idx[a] * grid.stride(a) : j + grid.stride(a);
      const double expected =
          out.theta[next] + (wraps ? kTwoPi * out.windings[a] : 0.0) - out.theta[j];
      if (std::abs(expected - step(j, next)) > kPathTolerance)
        throw InconsistentWinding("phase unwrapping is path dependent near node " +
                                  std::to_string(j));
    }
  }
  return out;
}

}  // namespace gptw
