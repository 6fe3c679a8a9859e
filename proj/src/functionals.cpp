#include "gptw/functionals.hpp"

#include "gptw/error.hpp"
#include "gptw/fft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace gptw {

void Params::validate() const {
  if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("wave speed c must be >= 0");
  if (!(grad_tol > 0.0) || !(cert_tol > 0.0)) throw InvalidArgument("tolerances must be > 0");
}

double Certificate::worst() const {
  double w = std::max(residual, std::abs(integral));
  if (lifted) w = std::max(w, std::abs(*lifted));
  return w;
}

// ---------------------------------------------------------------------------
// ActionModel

ActionModel::ActionModel(TorusGrid grid, Params params)
    : grid_(std::move(grid)), params_(params), symbols_(&spectral_symbols(grid_)) {
  params_.validate();
  linear_symbol_ = symbols_->xi_squared + params_.c * symbols_->xi[0];
}

Eigen::VectorXcd ActionModel::dealiased(const Eigen::VectorXcd& f) const {
  Eigen::VectorXcd hat = fft_forward(grid_, f);
  for (Eigen::Index j = 0; j < hat.size(); ++j)
    if (!symbols_->dealias_mask[j]) hat[j] = 0.0;
  return fft_inverse(grid_, hat);
}

ActionReport ActionModel::report(const Eigen::VectorXcd& f) const {
  ActionReport r;
  value_and_gradient(f, nullptr, &r);
  return r;
}

double ActionModel::value_and_gradient(const Eigen::VectorXcd& f, Eigen::VectorXcd* grad,
                                       ActionReport* report) const {
  const double volume = grid_.volume();
  Eigen::VectorXcd hat = fft_forward(grid_, f);
  const Eigen::VectorXd power = hat.cwiseAbs2();

  ActionReport r;
  r.kinetic = 0.5 * volume * symbols_->xi_squared.dot(power);
  r.momentum = -0.5 * volume * symbols_->xi[0].dot(power);

  const Eigen::VectorXcd g = params_.dealias ? dealiased(f) : f;
  const Eigen::ArrayXd gap = 1.0 - g.array().abs2();
  r.potential = 0.25 * grid_.cell_volume() * gap.square().sum();
  r.action = r.kinetic + r.potential - params_.c * r.momentum;

  if (grad) {
    hat.array() *= linear_symbol_.array().cast<Complex>();
    fft_inverse(grid_, hat, *grad);
    Eigen::VectorXcd nonlinear = (gap.cast<Complex>() * g.array()).matrix();
    if (params_.dealias) nonlinear = dealiased(nonlinear);
    *grad -= nonlinear;
  }
  if (report) *report = r;
  return r.action;
}

void ActionModel::hessian_apply(const Eigen::VectorXcd& base, const Eigen::VectorXcd& dir,
                                Eigen::VectorXcd& out) const {
  Eigen::VectorXcd hat = fft_forward(grid_, dir);
  hat.array() *= linear_symbol_.array().cast<Complex>();
  Eigen::VectorXcd linear = fft_inverse(grid_, hat);

  const Eigen::VectorXcd psi = params_.dealias ? dealiased(base) : base;
  const Eigen::VectorXcd phi = params_.dealias ? dealiased(dir) : dir;
  const Eigen::ArrayXd gap = 1.0 - psi.array().abs2();
  const Eigen::ArrayXd dot = (psi.array().conjugate() * phi.array()).real();
  Eigen::VectorXcd nonlinear =
      (-gap.cast<Complex>() * phi.array() + 2.0 * dot.cast<Complex>() * psi.array()).matrix();
  if (params_.dealias) nonlinear = dealiased(nonlinear);
  out = linear + nonlinear;
}

void ActionModel::precondition(const Eigen::VectorXcd& g, Eigen::VectorXcd& out) const {
  Eigen::VectorXcd hat = fft_forward(grid_, g);
  hat.array() /= (1.0 + symbols_->xi_squared.array()).cast<Complex>();
  fft_inverse(grid_, hat, out);
}

ActionModel::Line::Line(const ActionModel& model, const Eigen::VectorXcd& f,
                        const Eigen::VectorXcd& d)
    : model_(&model) {
  const TorusGrid& grid = model.grid();
  const double volume = grid.volume();
  const Eigen::VectorXcd fh = fft_forward(grid, f);
  const Eigen::VectorXcd dh = fft_forward(grid, d);
  quad_linear_ =
      volume * (model.linear_symbol_.array() * (fh.array().conjugate() * dh.array()).real()).sum();
  quad_d_ = 0.5 * volume * model.linear_symbol_.dot(dh.cwiseAbs2());

  const Eigen::VectorXcd fs = model.params_.dealias ? model.dealiased(f) : f;
  const Eigen::VectorXcd ds = model.params_.dealias ? model.dealiased(d) : d;
  dot_fd_ = (fs.array().conjugate() * ds.array()).real().matrix();
  abs_d2_ = ds.cwiseAbs2();
  gap_ = (1.0 - fs.array().abs2()).matrix();
  linear_ = quad_linear_ - grid.cell_volume() * gap_.dot(dot_fd_);
  curvature_ = 2.0 * quad_d_ + grid.cell_volume() * (2.0 * dot_fd_.array().square() -
                                                     gap_.array() * abs_d2_.array()).sum();
}

double ActionModel::Line::delta(double s) const {
  const Eigen::ArrayXd e = 2.0 * s * dot_fd_.array() + s * s * abs_d2_.array();
  const double potential = -0.25 * model_->grid().cell_volume() * (e * (2.0 * gap_.array() - e)).sum();
  return s * quad_linear_ + s * s * quad_d_ + potential;
}

// ---------------------------------------------------------------------------
// Field-level API

namespace {
void require_physical(const ComplexField& f) {
  if (!f.is_physical()) throw InvalidArgument("functional expects a physical field");
}
}  // namespace

Energy energy(const ComplexField& f, bool dealias) {
  require_physical(f);
  Params p;
  p.dealias = dealias;
  const ActionReport r = ActionModel(f.grid(), p).report(f.values());
  return {r.kinetic, r.potential};
}

double momentum(const ComplexField& f) {
  require_physical(f);
  return ActionModel(f.grid(), Params{}).report(f.values()).momentum;
}

ActionReport action(const ComplexField& f, const Params& p) {
  require_physical(f);
  return ActionModel(f.grid(), p).report(f.values());
}

ComplexField gradient(const ComplexField& f, const Params& p) {
  require_physical(f);
  Eigen::VectorXcd g;
  ActionModel(f.grid(), p).value_and_gradient(f.values(), &g);
  return ComplexField(f.grid(), std::move(g));
}

ComplexField hessian_apply(const ComplexField& base, const ComplexField& dir, const Params& p) {
  require_physical(base);
  require_physical(dir);
  if (base.grid() != dir.grid()) throw GridMismatch();
  Eigen::VectorXcd out;
  ActionModel(base.grid(), p).hessian_apply(base.values(), dir.values(), out);
  return ComplexField(base.grid(), std::move(out));
}

Certificate certify(const ComplexField& f, const Params& p) {
  require_physical(f);
  const TorusGrid& grid = f.grid();
  Certificate cert;
  cert.residual = l2_norm(gradient(f, p));
  const Eigen::ArrayXcd gap = (1.0 - f.values().array().abs2()).cast<Complex>();
  cert.integral = grid.cell_volume() * (gap * f.values().array()).sum();

  std::optional<LiftResult> maybe_lift;
  try {
    maybe_lift = lift(f);
  } catch (const VortexPresent&) {
  } catch (const InconsistentWinding&) {
  }
  if (!maybe_lift) {
    cert.note = "vortexful; lifted identity skipped";
    return cert;
  }
  const LiftResult& lifted = *maybe_lift;

  // Gradients of the periodic parts are spectral; the winding part of theta
  // contributes the constant 2 pi w_a / T.
  const ComplexField rho(grid, lifted.rho.cast<Complex>());
  const ComplexField theta_periodic(grid, lifted.periodic_theta().cast<Complex>());
  const Eigen::ArrayXd rho2 = lifted.rho.array().square();
  Eigen::ArrayXd integrand = -(1.0 - rho2) * rho2;
  double mean_d1_theta = 0.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const Eigen::ArrayXd d_rho = spectral_derivative(rho, a).values().real().array();
    const double slope = 2.0 * std::numbers::pi * lifted.windings[a] / grid.period();
    const Eigen::ArrayXd d_theta = spectral_derivative(theta_periodic, a).values().real().array() + slope;
    integrand += d_rho.square() + rho2 * d_theta.square();
    if (a == 0) {
      integrand += p.c * (rho2 - 1.0) * d_theta;
      mean_d1_theta = slope;
    }
  }
  // The (rho^2 - 1) form drops int d_1 theta, which only vanishes without
  // winding along x_1; add it back so the identity holds for plane waves too.
  cert.lifted = grid.cell_volume() * integrand.sum() + p.c * mean_d1_theta * grid.volume();
  return cert;
}

}  // namespace gptw
