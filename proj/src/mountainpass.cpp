#include "gptw/mountainpass.hpp"

#include "gptw/error.hpp"
#include "gptw/parallel.hpp"
#include "gptw/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

namespace gptw {

using Eigen::VectorXcd;

void Path::validate() const {
  if (nodes.size() < 3) throw InvalidArgument("a path needs at least 3 nodes");
  for (const auto& n : nodes) {
    if (!(n.grid() == nodes.front().grid())) throw GridMismatch();
    if (!n.is_physical()) throw InvalidArgument("path nodes must be physical fields");
  }
}

StraightPathBound straight_path_bound(const ComplexField& end, const Params& p) {
  p.validate();
  if (!end.is_physical()) throw InvalidArgument("path end must be a physical field");
  const auto& grid = end.grid();
  const ComplexField w = end - ComplexField::constant(grid, 1.0);
  const auto& v = w.values();
  const double h = grid.cell_volume();
  StraightPathBound b;
  b.a2 = energy(w).kinetic - p.c * momentum(w) + h * v.real().squaredNorm();
  b.a3 = h * (v.real().array() * v.array().abs2()).sum();
  b.a4 = 0.25 * h * v.array().abs2().square().sum();
  // I'(t) = t (2 a2 + 3 a3 t + 4 a4 t^2)
  std::vector<double> candidates{0.0, 1.0};
  const double qa = 4 * b.a4, qb = 3 * b.a3, qc = 2 * b.a2;
  if (qa != 0.0) {
    const double disc = qb * qb - 4 * qa * qc;
    if (disc >= 0) {
      const double s = std::sqrt(disc);
      candidates.push_back((-qb + s) / (2 * qa));
      candidates.push_back((-qb - s) / (2 * qa));
    }
  } else if (qb != 0.0) {
    candidates.push_back(-qc / qb);
  }
  b.M = -std::numeric_limits<double>::infinity();
  for (double t : candidates) {
    if (!(t >= 0.0 && t <= 1.0)) continue;
    if (b.at(t) > b.M) {
      b.M = b.at(t);
      b.t_max = t;
    }
  }
  return b;
}

Path init_path(double c, const TorusGrid& grid, const VortexAnsatz& shape, int node_count) {
  if (node_count < 3) throw InvalidArgument("node_count must be >= 3");
  const ComplexField end = ansatz::vortex_test_function(shape, grid);
  const ComplexField one = ComplexField::constant(grid, 1.0);
  const ComplexField w = end - one;
  Path path;
  path.nodes.reserve(node_count);
  for (int j = 0; j < node_count; ++j) {
    if (j == 0)
      path.nodes.push_back(one);
    else if (j == node_count - 1)
      path.nodes.push_back(end);
    else
      path.nodes.push_back(one + (double(j) / (node_count - 1)) * w);
  }
  path.upper_bound = straight_path_bound(end, Params{.c = c}).M;
  return path;
}

Path init_path(double c, const TorusGrid& grid, double R, int node_count) {
  return init_path(c, grid, VortexAnsatz::with_defaults(R), node_count);
}

std::vector<double> path_actions(const Path& path, const Params& p) {
  path.validate();
  const ActionModel model(path.grid(), p);
  std::vector<double> out(path.nodes.size());
  parallel_for(static_cast<int>(out.size()),
               [&](int j) { out[j] = model.value_and_gradient(path.nodes[j].values(), nullptr); });
  return out;
}

std::size_t max_node(const std::vector<double>& actions) {
  if (actions.empty()) throw InvalidArgument("no nodes");
  const double top = *std::max_element(actions.begin(), actions.end());
  for (std::size_t j = 0; j < actions.size(); ++j)
    if (actions[j] >= top - 1e-12) return j;
  return 0;
}

void RelaxOptions::validate() const {
  if (max_sweeps < 0) throw InvalidArgument("max_sweeps must be >= 0");
  if (!(step > 0.0) || !(max_step >= step)) throw InvalidArgument("relax steps must satisfy 0 < step <= max_step");
  if (!(rel_tol >= 0.0)) throw InvalidArgument("rel_tol must be >= 0");
  if (patience < 1) throw InvalidArgument("patience must be >= 1");
  if (log_every < 1) throw InvalidArgument("log_every must be >= 1");
}

namespace {

// Equal L2 arclength redistribution by piecewise-linear interpolation.
// Endpoints are taken from `first`/`last` untouched.
std::vector<VectorXcd> reparametrize(const std::vector<VectorXcd>& x, const ActionModel& model) {
  const std::size_t n = x.size();
  std::vector<double> s(n, 0.0);
  for (std::size_t j = 1; j < n; ++j) s[j] = s[j - 1] + model.l2_norm(x[j] - x[j - 1]);
  const double length = s.back();
  if (!(length > 0.0)) return x;
  std::vector<VectorXcd> out(n);
  out.front() = x.front();
  out.back() = x.back();
  std::size_t seg = 0;
  for (std::size_t k = 1; k + 1 < n; ++k) {
    const double target = length * double(k) / double(n - 1);
    while (seg + 2 < n && s[seg + 1] < target) ++seg;
    const double span = s[seg + 1] - s[seg];
    const double a = span > 0.0 ? std::clamp((target - s[seg]) / span, 0.0, 1.0) : 0.0;
    out[k] = (1.0 - a) * x[seg] + a * x[seg + 1];
  }
  return out;
}

// Projects out phase rotation and translations, the near-kernel of the
// Hessian at a nonconstant critical point.
void remove_symmetry_modes(const ComplexField& x, const ActionModel& model, VectorXcd& d) {
  std::vector<VectorXcd> basis{Complex(0, 1) * x.values()};
  for (int a = 0; a < x.grid().dim(); ++a) basis.push_back(spectral_derivative(x, a).values());
  std::vector<VectorXcd> ortho;
  for (auto& v : basis) {
    for (const auto& q : ortho) v -= model.l2(q, v) * q;
    const double norm = model.l2_norm(v);
    if (norm > 1e-8 * std::sqrt(model.grid().volume())) ortho.push_back(v / norm);
  }
  for (const auto& q : ortho) d -= model.l2(q, d) * q;
}

}  // namespace

RelaxResult relax_path(const Path& path, const Params& p, const RelaxOptions& opts) {
  path.validate();
  p.validate();
  opts.validate();
  const ActionModel model(path.grid(), p);
  const std::size_t n = path.nodes.size();
  const int interior = static_cast<int>(n) - 2;

  std::vector<VectorXcd> x(n);
  for (std::size_t j = 0; j < n; ++j) x[j] = path.nodes[j].values();
  std::vector<double> actions(n);
  parallel_for(static_cast<int>(n), [&](int j) { actions[j] = model.value_and_gradient(x[j], nullptr); });
  double gamma = *std::max_element(actions.begin(), actions.end());

  RelaxResult r;
  r.gamma_history.push_back(gamma);
  std::vector<double> trace{gamma};  // gamma after every sweep, accepted or not
  double tau = opts.step;

  for (int sweep = 1; sweep <= opts.max_sweeps; ++sweep) {
    std::vector<VectorXcd> moved = x;
    parallel_for(interior, [&](int i) {
      const std::size_t j = static_cast<std::size_t>(i) + 1;
      VectorXcd g, d;
      model.value_and_gradient(x[j], &g);
      if (opts.precondition)
        model.precondition(g, d);
      else
        d = g;
      moved[j] = x[j] - tau * d;
    });
    std::vector<VectorXcd> candidate = reparametrize(moved, model);
    candidate.front() = x.front();
    candidate.back() = x.back();
    std::vector<double> cand_actions(n);
    cand_actions.front() = actions.front();
    cand_actions.back() = actions.back();
    parallel_for(interior, [&](int i) {
      cand_actions[i + 1] = model.value_and_gradient(candidate[i + 1], nullptr);
    });
    for (double a : cand_actions)
      if (!std::isfinite(a)) throw NonFiniteValue("path relaxation produced a non-finite action");
    const double cand_gamma = *std::max_element(cand_actions.begin(), cand_actions.end());

    r.sweeps = sweep;
    if (cand_gamma <= gamma) {
      x = std::move(candidate);
      actions = std::move(cand_actions);
      gamma = cand_gamma;
      r.gamma_history.push_back(gamma);
      tau = std::min(1.25 * tau, opts.max_step);
    } else {
      tau *= 0.5;
    }
    trace.push_back(gamma);
    if (opts.log && sweep % opts.log_every == 0)
      *opts.log << "sweep " << sweep << " gamma " << gamma << " step " << tau << '\n';

    const auto k = trace.size() - 1;
    if (k >= static_cast<std::size_t>(opts.patience)) {
      const double before = trace[k - opts.patience];
      if (before - gamma <= opts.rel_tol * std::max(std::abs(before), 1e-300)) {
        r.stalled = true;
        break;
      }
    }
    if (tau < 1e-14) {
      r.stalled = true;
      break;
    }
  }

  r.path.upper_bound = path.upper_bound;
  r.path.nodes.reserve(n);
  r.path.nodes.push_back(path.nodes.front());
  for (std::size_t j = 1; j + 1 < n; ++j) r.path.nodes.emplace_back(path.grid(), std::move(x[j]));
  r.path.nodes.push_back(path.nodes.back());
  r.actions = std::move(actions);
  r.gamma = gamma;
  return r;
}

void SaddleOptions::validate() const {
  if (max_newton < 0) throw InvalidArgument("max_newton must be >= 0");
  if (max_minres < 1) throw InvalidArgument("max_minres must be >= 1");
  if (!(minres_tol > 0.0 && minres_tol < 1.0)) throw InvalidArgument("minres_tol must lie in (0, 1)");
  if (probes < 1) throw InvalidArgument("probes must be >= 1");
  if (!(class_tol > 0.0)) throw InvalidArgument("class_tol must be positive");
}

int minres(const ActionModel& model, const VectorXcd& base, const VectorXcd& b, VectorXcd& x, double tol,
           int max_iters) {
  auto dot = [](const VectorXcd& a, const VectorXcd& c) { return a.dot(c).real(); };
  const auto n = b.size();
  x = VectorXcd::Zero(n);
  VectorXcd r1 = b, r2 = b, y(n), v(n), w = VectorXcd::Zero(n), w1(n), w2 = VectorXcd::Zero(n);
  model.precondition(r1, y);
  const double beta1 = std::sqrt(std::max(dot(r1, y), 0.0));
  if (beta1 == 0.0) return 0;
  double oldb = 0.0, beta = beta1, dbar = 0.0, epsln = 0.0, phibar = beta1, cs = -1.0, sn = 0.0;
  int it = 0;
  while (it < max_iters) {
    ++it;
    v = y / beta;
    model.hessian_apply(base, v, y);
    if (it >= 2) y -= (beta / oldb) * r1;
    const double alfa = dot(v, y);
    y -= (alfa / beta) * r2;
    r1 = r2;
    r2 = y;
    model.precondition(r2, y);
    oldb = beta;
    beta = std::sqrt(std::max(dot(r2, y), 0.0));
    const double oldeps = epsln;
    const double delta = cs * dbar + sn * alfa;
    const double gbar = sn * dbar - cs * alfa;
    epsln = sn * beta;
    dbar = -cs * beta;
    const double gamma = std::max(std::hypot(gbar, beta), std::numeric_limits<double>::epsilon());
    cs = gbar / gamma;
    sn = beta / gamma;
    const double phi = cs * phibar;
    phibar = sn * phibar;
    w1 = w2;
    w2 = w;
    w = (v - oldeps * w1 - delta * w2) / gamma;
    x += phi * w;
    if (phibar <= tol * beta1 || beta == 0.0) break;
  }
  return it;
}

SaddleResult find_saddle(const Path& path, const Params& p, const SaddleOptions& opts) {
  path.validate();
  p.validate();
  opts.validate();
  const auto& grid = path.grid();
  const ActionModel model(grid, p);
  const auto actions = path_actions(path, p);

  const std::size_t start = max_node(actions);
  const double gamma = actions[start];
  const double bound = path.upper_bound.value_or(gamma);
  const double tol = opts.grad_tol > 0.0 ? opts.grad_tol : 1e-8 * std::sqrt(grid.volume());

  VectorXcd x = path.nodes[start].values();
  VectorXcd g, g_trial, delta, trial;
  model.value_and_gradient(x, &g);
  double merit = model.l2(g, g);
  bool converged = std::sqrt(merit) <= tol;
  int newton = 0;
  while (!converged && newton < opts.max_newton) {
    ++newton;
    const int inner = minres(model, x, -g, delta, opts.minres_tol, opts.max_minres);
    remove_symmetry_modes(ComplexField(grid, x), model, delta);
    bool accepted = false;
    double s = 1.0;
    for (int k = 0; k < 40; ++k, s *= 0.5) {
      trial = x + s * delta;
      const double value = model.value_and_gradient(trial, &g_trial);
      const double m = model.l2(g_trial, g_trial);
      if (std::isfinite(value) && m <= (1.0 - 2e-4 * s) * merit) {
        accepted = true;
        break;
      }
    }
    if (!accepted) {
      // Fall back to a preconditioned descent step on the merit itself.
      VectorXcd hg, d;
      model.hessian_apply(x, g, hg);
      model.precondition(hg, d);
      const double slope = 2.0 * model.l2(hg, d);
      s = 1.0;
      for (int k = 0; k < 60; ++k, s *= 0.5) {
        trial = x - s * d;
        model.value_and_gradient(trial, &g_trial);
        const double m = model.l2(g_trial, g_trial);
        if (std::isfinite(m) && m <= merit - 1e-4 * s * slope) {
          accepted = true;
          break;
        }
      }
    }
    if (!accepted) break;
    x = trial;
    g = g_trial;
    merit = model.l2(g, g);
    if (!x.allFinite()) throw NonFiniteValue("saddle refinement produced a non-finite field");
    if (opts.log)
      *opts.log << "newton " << newton << " residual " << std::sqrt(merit) << " step " << s << " minres " << inner
                << '\n';
    converged = std::sqrt(merit) <= tol;
  }

  ComplexField field(grid, x);
  CriticalPoint saddle = analyze(field, p, opts.class_tol);
  saddle.converged = converged;
  saddle.iterations = newton;

  // Index witness: the lowest Hessian mode plus random smooth probes.
  std::optional<ComplexField> best;
  double best_q = std::numeric_limits<double>::infinity();
  auto consider = [&](const ComplexField& dir) {
    VectorXcd hd;
    model.hessian_apply(x, dir.values(), hd);
    const double q = model.l2(hd, dir.values()) / model.l2(dir.values(), dir.values());
    if (q < best_q) {
      best_q = q;
      best = dir;
    }
  };
  try {
    EigenOptions eo;
    eo.seed = opts.seed;
    eo.tol = 1e-8;
    consider(lowest_hessian_mode(field, p, eo).direction);
  } catch (const NoConvergence&) {
  }
  for (int k = static_cast<int>(best.has_value()); k < opts.probes; ++k)
    consider(ansatz::perturb(ComplexField::zeros(grid), 1.0, 4, opts.seed + 1000 + static_cast<std::uint64_t>(k)));
  if (!(best_q < 0.0)) throw NotASaddle("no probe direction has a negative Hessian form");
  const double a = saddle.report.action;
  const bool in_range = a > 0.0 && a <= bound + 1e-8;
  return SaddleResult{std::move(saddle), gamma, bound, std::move(*best), best_q, start, in_range};
}

}  // namespace gptw
