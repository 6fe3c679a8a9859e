#include "gptw/minimize.hpp"

#include "gptw/error.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <sstream>

namespace gptw {

std::string to_string(Classification c) {
  switch (c) {
    case Classification::ZeroConstant: return "ZeroConstant";
    case Classification::UnitConstant: return "UnitConstant";
    case Classification::PlaneWave: return "PlaneWave";
    case Classification::Vortexful: return "Vortexful";
    case Classification::OtherNonconstant: return "OtherNonconstant";
  }
  return "Unknown";
}

void MinimizeOptions::validate() const {
  if (max_iters < 1) throw InvalidArgument("max_iters must be >= 1");
  if (!(backtrack > 0.0 && backtrack < 1.0)) throw InvalidArgument("backtracking factor must lie in (0,1)");
  if (!(sufficient_decrease > 0.0 && sufficient_decrease < 0.5))
    throw InvalidArgument("sufficient-decrease constant must lie in (0,1/2)");
  if (!(initial_step > 0.0)) throw InvalidArgument("initial step must be positive");
  if (restart_period < 1) throw InvalidArgument("restart period must be >= 1");
  if (!(class_tol > 0.0)) throw InvalidArgument("class_tol must be positive");
}

double MinimizeOptions::resolved_grad_tol(const TorusGrid& grid) const {
  return grad_tol > 0.0 ? grad_tol : 1e-8 * std::sqrt(grid.volume());
}

Classification classify(const ComplexField& f, double class_tol) {
  if (!(class_tol > 0.0)) throw InvalidArgument("class_tol must be positive");
  const Eigen::VectorXcd& v = f.values();
  const Eigen::VectorXd modulus = v.cwiseAbs();
  if (modulus.maxCoeff() <= class_tol) return Classification::ZeroConstant;

  const Complex mean = v.mean();
  const double variation = (v.array() - mean).abs().maxCoeff();
  const double unit_gap = (modulus.array() - 1.0).abs().maxCoeff();
  if (variation <= class_tol && unit_gap <= class_tol) return Classification::UnitConstant;

  const double min_modulus = modulus.minCoeff();
  if (modulus.maxCoeff() - min_modulus <= class_tol) {
    try {
      auto l = lift(f, 0.5 * min_modulus);
      for (int w : l.windings)
        if (w != 0) return Classification::PlaneWave;
    } catch (const InconsistentWinding&) {
    }
  }
  try {
    lift(f);
  } catch (const VortexPresent&) {
    return Classification::Vortexful;
  } catch (const InconsistentWinding&) {
    return Classification::Vortexful;
  }
  return Classification::OtherNonconstant;
}

CriticalPoint analyze(const ComplexField& f, const Params& p, double class_tol) {
  CriticalPoint cp{f, action(f, p)};
  cp.certificates = certify(f, p);
  cp.residual = cp.certificates.residual;
  cp.classification = classify(f, class_tol);
  try {
    cp.windings = lift(f, 0.5 * std::max(f.values().cwiseAbs().minCoeff(), 1e-300)).windings;
  } catch (const Error&) {
  }
  return cp;
}

CriticalPoint minimize_action(const ComplexField& init, const Params& p, const MinimizeOptions& opts) {
  p.validate();
  opts.validate();
  if (!init.is_physical()) throw InvalidArgument("minimize expects a physical field");
  const TorusGrid& grid = init.grid();
  const ActionModel model(grid, p);
  const double tol = opts.resolved_grad_tol(grid);

  Eigen::VectorXcd x = init.values();
  Eigen::VectorXcd g, z, z_old, d;
  double value = model.value_and_gradient(x, &g);
  double residual = model.l2_norm(g);
  std::vector<double> history{value};

  auto precondition = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
    if (opts.precondition)
      model.precondition(in, out);
    else
      out = in;
  };

  int iteration = 0;
  bool converged = residual <= tol;
  if (!converged) {
    precondition(g, z);
    d = -z;
    double gz = model.l2(g, z);
    double last_step = opts.initial_step;
    int since_restart = 0;
    while (iteration < opts.max_iters) {
      ++iteration;
      double slope = model.l2(g, d);
      if (!(slope < 0.0)) {
        d = -z;
        slope = -gz;
        since_restart = 0;
      }
      const ActionModel::Line line(model, x, d);
      const double curvature = line.curvature();
      double step = curvature > 0.0 ? -slope / curvature : 2.0 * last_step;
      double delta = line.delta(step);
      if (!std::isfinite(delta)) throw NonFiniteValue("action became non-finite during line search");
      while (delta > opts.sufficient_decrease * step * slope && step > 1e-30) {
        step *= opts.backtrack;
        delta = line.delta(step);
      }
      if (step <= 1e-30 || delta >= 0.0) {
        // No decrease resolvable along this direction.
        if (since_restart == 0) break;
        d = -z;
        since_restart = 0;
        continue;
      }
      last_step = step;
      x += step * d;
      if (!x.allFinite()) throw NonFiniteValue("iterate left the finite range");
      model.value_and_gradient(x, &g);
      value = history.back() + delta;
      history.push_back(value);
      residual = model.l2_norm(g);
      if (opts.log && iteration % opts.log_every == 0)
        *opts.log << iteration << ' ' << value << ' ' << residual << '\n';
      if (residual <= tol) {
        converged = true;
        break;
      }
      z_old.swap(z);
      precondition(g, z);
      const double gz_new = model.l2(g, z);
      double beta = std::max(0.0, (gz_new - model.l2(g, z_old)) / gz);
      gz = gz_new;
      if (++since_restart >= opts.restart_period) {
        beta = 0.0;
        since_restart = 0;
      }
      d = -z + beta * d;
    }
  }

  CriticalPoint cp = analyze(ComplexField(grid, std::move(x)), p, opts.class_tol);
  cp.converged = converged;
  cp.iterations = iteration;
  cp.action_history = std::move(history);
  return cp;
}

std::string experiment_csv_header() { return "c,T,action,residual,classification,converged"; }

std::string to_csv(const ExperimentRow& row) {
  char buf[256];
  std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%.17g,%s,%d", row.c, row.T, row.action, row.residual,
                to_string(row.classification).c_str(), row.converged ? 1 : 0);
  return buf;
}

ExperimentResult theorem_E_experiment(const ComplexField& init, double c, const MinimizeOptions& opts) {
  Params p{.c = c};
  CriticalPoint cp = minimize_action(init, p, opts);
  ExperimentRow row{c, init.grid().period(), cp.report.action, cp.residual, cp.classification, cp.converged};
  return {std::move(cp), row};
}

ExperimentResult theorem_E_experiment(double c, double T, int resolution, double R,
                                      const MinimizeOptions& opts) {
  const auto ansatz_params = VortexAnsatz::with_defaults(R);
  const auto grid = TorusGrid::cube(2, resolution, T);
  return theorem_E_experiment(ansatz::vortex_test_function(ansatz_params, grid), c, opts);
}

}  // namespace gptw
