#include "gptw/spectrum.hpp"

#include "gptw/csv.hpp"
#include "gptw/error.hpp"
#include "gptw/fft.hpp"
#include "gptw/parallel.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <ostream>
#include <sstream>

namespace gptw {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXcd;
using Eigen::VectorXd;

namespace {

VectorXcd physical_values(const ComplexField& f) {
  return f.is_physical() ? f.values() : transform_inverse(f).values();
}

}  // namespace

Eigen::VectorXd to_real(const VectorXcd& v) {
  VectorXd out(2 * v.size());
  for (Index i = 0; i < v.size(); ++i) {
    out[2 * i] = v[i].real();
    out[2 * i + 1] = v[i].imag();
  }
  return out;
}

Eigen::VectorXcd to_complex(const VectorXd& v) {
  VectorXcd out(v.size() / 2);
  for (Index i = 0; i < out.size(); ++i) out[i] = Complex(v[2 * i], v[2 * i + 1]);
  return out;
}

double SpectrumReport::max_symbol_error() const {
  double worst = 0.0;
  for (const auto& e : smallest_eigenvalues)
    worst = std::max(worst, std::abs(e.value - e.analytic) / std::max(1.0, std::abs(e.analytic)));
  return worst;
}

std::vector<SpectrumEntry> symbol_spectrum(double c, const TorusGrid& grid) {
  const auto& sym = spectral_symbols(grid);
  std::vector<SpectrumEntry> out;
  out.reserve(2 * grid.node_count());
  for (Index flat = 0; flat < grid.node_count(); ++flat) {
    const auto idx = grid.unflatten(flat);
    std::vector<int> mode(grid.dim());
    for (int a = 0; a < grid.dim(); ++a) mode[a] = grid.wavenumber(a, idx[a]);
    if (flat == 0) {
      out.push_back({2.0, 2.0, mode, +1});
      continue;
    }
    const double xi1 = sym.xi[0][flat];
    const double root = std::sqrt(1.0 + c * c * xi1 * xi1);
    const double base = sym.xi_squared[flat] + 1.0;
    out.push_back({base - root, base - root, mode, -1});
    out.push_back({base + root, base + root, mode, +1});
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const SpectrumEntry& a, const SpectrumEntry& b) { return a.value < b.value; });
  return out;
}

MatrixXd dense_hessian(const ComplexField& base, const Params& p) {
  const auto& grid = base.grid();
  const Index n = grid.node_count();
  if (n > 512) throw InvalidArgument("dense_hessian is limited to 512 nodes");
  ActionModel model(grid, p);
  const VectorXcd b = physical_values(base);
  MatrixXd H(2 * n, 2 * n);
  VectorXcd e = VectorXcd::Zero(n), col(n);
  for (Index j = 0; j < 2 * n; ++j) {
    e.setZero();
    e[j / 2] = (j % 2 == 0) ? Complex(1, 0) : Complex(0, 1);
    model.hessian_apply(b, e, col);
    H.col(j) = to_real(col);
  }
  return H;
}

namespace {

BlockOperator columnwise(std::function<void(const VectorXcd&, VectorXcd&)> op) {
  return [op = std::move(op)](const MatrixXd& in, MatrixXd& out) {
    out.resize(in.rows(), in.cols());
    VectorXcd y(in.rows() / 2);
    for (Index j = 0; j < in.cols(); ++j) {
      op(to_complex(in.col(j)), y);
      out.col(j) = to_real(y);
    }
  };
}

}  // namespace

SpectrumReport hessian_spectrum_at_constant(double theta, const Params& p, const TorusGrid& grid, int count,
                                            const EigenOptions& opts) {
  p.validate();
  if (count < 1) throw InvalidArgument("count must be >= 1");
  if (!std::isfinite(theta)) throw InvalidArgument("theta must be finite");
  ActionModel model(grid, p);
  const Index n = grid.node_count();
  const VectorXcd base = VectorXcd::Constant(n, std::polar(1.0, theta));
  const VectorXcd tangent = Complex(0, 1) * base;

  auto A = columnwise([&](const VectorXcd& x, VectorXcd& y) { model.hessian_apply(base, x, y); });
  auto T = columnwise([&](const VectorXcd& x, VectorXcd& y) { model.precondition(x, y); });
  MatrixXd Y = to_real(tangent);
  const auto eig = lobpcg(2 * n, count, A, BlockOperator{}, T, Y, opts);

  SpectrumReport r;
  r.c = p.c;
  r.T = grid.period();
  r.theta = theta;
  r.iterations = eig.iterations;
  VectorXcd h(n);
  model.hessian_apply(base, tangent, h);
  r.degenerate_residual = model.l2_norm(h);

  const auto symbol = symbol_spectrum(p.c, grid);
  r.analytic_min = symbol.front().value;
  for (int i = 0; i < count; ++i) {
    SpectrumEntry e = symbol[i];
    e.value = eig.values[i];
    r.smallest_eigenvalues.push_back(std::move(e));
  }
  r.positivity = r.smallest_eigenvalues.front().value > 0.0;
  return r;
}

LowestMode lowest_hessian_mode(const ComplexField& base, const Params& p, const EigenOptions& opts) {
  p.validate();
  const auto& grid = base.grid();
  ActionModel model(grid, p);
  const VectorXcd b = physical_values(base);
  auto A = columnwise([&](const VectorXcd& x, VectorXcd& y) { model.hessian_apply(b, x, y); });
  auto T = columnwise([&](const VectorXcd& x, VectorXcd& y) { model.precondition(x, y); });
  const auto eig = lobpcg(2 * grid.node_count(), 1, A, BlockOperator{}, T, MatrixXd(), opts);
  return {eig.values[0], ComplexField(grid, to_complex(eig.vectors.col(0)))};
}

PoincareConstant poincare_constant(const TorusGrid& grid) {
  const auto& sym = spectral_symbols(grid);
  double lambda = std::numeric_limits<double>::infinity();
  for (Index i = 1; i < sym.xi_squared.size(); ++i) lambda = std::min(lambda, sym.xi_squared[i]);
  return {lambda, lambda / 4.0};
}

namespace {

void check_weight(const VectorXd& f, const TorusGrid& grid) {
  if (f.size() != grid.node_count()) throw GridMismatch();
  if (!f.allFinite()) throw NonFiniteValue("weight has non-finite entries");
  if (f.minCoeff() < 0.5 || f.maxCoeff() > 2.0) throw WeightOutOfRange("weight must satisfy 1/2 <= f <= 2");
}

void negative_laplacian(const TorusGrid& grid, const VectorXd& x, VectorXd& y) {
  const auto& sym = spectral_symbols(grid);
  VectorXcd hat = fft_forward(grid, x.cast<Complex>());
  hat.array() *= sym.xi_squared.array().cast<Complex>();
  y = fft_inverse(grid, hat).real();
}

}  // namespace

double weighted_eigenvalue(const VectorXd& f, const TorusGrid& grid, const EigenOptions& opts) {
  check_weight(f, grid);
  const auto& sym = spectral_symbols(grid);
  auto A = [&](const MatrixXd& in, MatrixXd& out) {
    out.resize(in.rows(), in.cols());
    VectorXd y;
    for (Index j = 0; j < in.cols(); ++j) {
      negative_laplacian(grid, in.col(j), y);
      out.col(j) = y;
    }
  };
  auto B = [&](const MatrixXd& in, MatrixXd& out) { out = f.asDiagonal() * in; };
  auto T = [&](const MatrixXd& in, MatrixXd& out) {
    out.resize(in.rows(), in.cols());
    for (Index j = 0; j < in.cols(); ++j) {
      VectorXcd hat = fft_forward(grid, in.col(j).cast<Complex>());
      hat.array() /= (1.0 + sym.xi_squared.array()).cast<Complex>();
      out.col(j) = fft_inverse(grid, hat).real();
    }
  };
  MatrixXd Y = VectorXd::Ones(grid.node_count());
  return lobpcg(grid.node_count(), 1, A, B, T, Y, opts).values[0];
}

double weighted_eigenvalue_dense(const VectorXd& f, const TorusGrid& grid) {
  check_weight(f, grid);
  const Index n = grid.node_count();
  if (n > 1024) throw InvalidArgument("dense weighted eigensolve is limited to 1024 nodes");
  MatrixXd K(n, n);
  VectorXd e = VectorXd::Zero(n), y;
  for (Index j = 0; j < n; ++j) {
    e.setZero();
    e[j] = 1.0;
    negative_laplacian(grid, e, y);
    K.col(j) = y;
  }
  MatrixXd F = f.asDiagonal();
  Eigen::GeneralizedSelfAdjointEigenSolver<MatrixXd> eig(0.5 * (K + K.transpose()), F, Eigen::EigenvaluesOnly);
  if (eig.info() != Eigen::Success) throw NoConvergence("dense generalized eigensolve failed");
  // The constant spans the kernel; it is the f-orthogonal complement's bottom.
  return eig.eigenvalues()[1];
}

double case1_bound(double c) { return 2.0 * std::numbers::pi / std::sqrt(8.0 + 4.0 * c * c); }

bool symbol_positivity(double c, double T) {
  const double xi = 2.0 * std::numbers::pi / T;
  return c * c < 2.0 + xi * xi;
}

void ScanOptions::validate() const {
  if (band < 1) throw InvalidArgument("scan band must be >= 1");
  if (!(R > 0.0)) throw InvalidArgument("scan R must be positive");
  minimize.validate();
}

ThresholdReport constancy_scan(double c, const std::vector<double>& T_values, int starts, int resolution,
                               const ScanOptions& opts) {
  if (starts < 1) throw InvalidArgument("starts must be >= 1");
  if (T_values.empty()) throw InvalidArgument("scan needs at least one period");
  opts.validate();
  Params p{.c = c};
  p.validate();

  std::vector<double> Ts = T_values;
  std::sort(Ts.begin(), Ts.end());
  const auto ansatz_shape = VortexAnsatz::with_defaults(opts.R);

  struct Task {
    int row;
    int start;  // -1 for the vortex-pair start
  };
  std::vector<Task> tasks;
  for (int i = 0; i < static_cast<int>(Ts.size()); ++i) {
    TorusGrid(std::vector<int>{resolution, resolution}, Ts[i]);  // validates
    for (int s = 0; s < starts; ++s) tasks.push_back({i, s});
    if (Ts[i] > ansatz_shape.support_diameter()) tasks.push_back({i, -1});
  }

  struct Outcome {
    bool converged = false;
    double action = 0.0;
    Classification cls = Classification::UnitConstant;
  };
  std::vector<Outcome> outcomes(tasks.size());
  constexpr double amplitudes[] = {0.1, 0.5, 1.0};
  parallel_for(static_cast<int>(tasks.size()), [&](int t) {
    const auto& task = tasks[t];
    const auto grid = TorusGrid::cube(2, resolution, Ts[task.row]);
    ComplexField init = task.start < 0
                            ? ansatz::vortex_test_function(ansatz_shape, grid)
                            : ansatz::perturb(ComplexField::zeros(grid), amplitudes[task.start % 3], opts.band,
                                              opts.seed + static_cast<std::uint64_t>(task.start));
    try {
      auto cp = minimize_action(init, p, opts.minimize);
      outcomes[t] = {cp.converged, cp.report.action, cp.classification};
    } catch (const NonFiniteValue&) {
      outcomes[t] = {};
    }
  });

  ThresholdReport r;
  r.c = c;
  r.case1_bound = case1_bound(c);
  r.plane_wave_onset = ansatz::plane_wave_onset(c);
  r.rows.resize(Ts.size());
  for (std::size_t i = 0; i < Ts.size(); ++i) r.rows[i].T = Ts[i];
  std::vector<bool> seen(Ts.size(), false);
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    auto& row = r.rows[tasks[t].row];
    const auto& o = outcomes[t];
    ++row.runs;
    if (!o.converged) {
      ++row.not_converged;
      continue;
    }
    if (!is_constant(o.cls)) {
      ++row.nonconstant;
      row.all_constant = false;
    }
    if (!seen[tasks[t].row] || o.action < row.min_action) {
      row.min_action = o.action;
      row.best = o.cls;
      seen[tasks[t].row] = true;
    }
  }
  for (std::size_t i = 0; i < r.rows.size(); ++i) {
    if (!r.rows[i].all_constant) {
      r.onset_upper = r.rows[i].T;
      if (i > 0) r.empirical_onset = r.rows[i - 1].T;
      break;
    }
  }
  return r;
}

std::string spectrum_csv(const SpectrumReport& r) {
  std::ostringstream os;
  os << "c,T,theta,index,value,analytic,branch,mode,degenerate_residual,positivity\n";
  for (std::size_t i = 0; i < r.smallest_eigenvalues.size(); ++i) {
    const auto& e = r.smallest_eigenvalues[i];
    std::string mode;
    for (std::size_t a = 0; a < e.mode.size(); ++a) mode += (a ? ";" : "") + std::to_string(e.mode[a]);
    os << fmt17(r.c) << ',' << fmt17(r.T) << ',' << fmt17(r.theta) << ',' << i << ',' << fmt17(e.value) << ','
       << fmt17(e.analytic) << ',' << e.branch << ',' << mode << ',' << fmt17(r.degenerate_residual) << ','
       << (r.positivity ? 1 : 0) << '\n';
  }
  return os.str();
}

std::string threshold_csv(const ThresholdReport& r) {
  std::ostringstream os;
  os << "T,all_constant,runs,nonconstant,not_converged,min_action,best\n";
  for (const auto& row : r.rows)
    os << fmt17(row.T) << ',' << (row.all_constant ? 1 : 0) << ',' << row.runs << ',' << row.nonconstant << ','
       << row.not_converged << ',' << fmt17(row.min_action) << ',' << to_string(row.best) << '\n';
  return os.str();
}

std::string threshold_summary_csv(const ThresholdReport& r) {
  auto opt = [](const std::optional<double>& v) { return v ? fmt17(*v) : std::string(); };
  std::ostringstream os;
  os << "c,case1_bound,plane_wave_onset,empirical_onset,onset_upper\n";
  os << fmt17(r.c) << ',' << fmt17(r.case1_bound) << ',' << fmt17(r.plane_wave_onset) << ','
     << opt(r.empirical_onset) << ',' << opt(r.onset_upper) << '\n';
  return os.str();
}

std::vector<std::vector<bool>> positivity_lattice(const std::vector<double>& c_values,
                                                  const std::vector<double>& T_values, int resolution) {
  const int nc = static_cast<int>(c_values.size());
  const int nt = static_cast<int>(T_values.size());
  std::vector<std::vector<bool>> out(nc, std::vector<bool>(nt));
  std::vector<char> flags(static_cast<std::size_t>(nc) * nt);
  parallel_for(nc * nt, [&](int i) {
    const auto grid = TorusGrid::cube(2, resolution, T_values[i % nt]);
    flags[i] = hessian_spectrum_at_constant(0.0, Params{.c = c_values[i / nt]}, grid, 1).positivity;
  });
  for (int i = 0; i < nc * nt; ++i) out[i / nt][i % nt] = flags[i];
  return out;
}

void write_positivity_pgm(std::ostream& os, const std::vector<std::vector<bool>>& lattice) {
  const std::size_t h = lattice.size();
  const std::size_t w = h ? lattice.front().size() : 0;
  os << "P2\n" << w << ' ' << h << "\n255\n";
  for (const auto& row : lattice) {
    if (row.size() != w) throw InvalidArgument("ragged positivity lattice");
    for (std::size_t j = 0; j < w; ++j) os << (j ? " " : "") << (row[j] ? 255 : 0);
    os << '\n';
  }
}

}  // namespace gptw
