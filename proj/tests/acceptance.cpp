// Acceptance suite: one PASS/FAIL line per criterion. Optional arguments
// select criteria by number, e.g. `acceptance 1 4 9`.

#include "gptw/mountainpass.hpp"
#include "gptw/spectrum.hpp"
#include "random_fields.hpp"

#include <Eigen/Eigenvalues>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <string>

using namespace gptw;
using gptw::testing::random_field;
using std::numbers::pi;

namespace {

struct Verdict {
  bool pass;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

Verdict functional_exactness() {
  double worst_zero = 0, worst_unit = 0;
  for (auto [N, T, M] : {std::tuple{2, 2 * pi, 32}, {2, 40.0, 64}, {3, 2 * pi, 16}}) {
    const auto grid = TorusGrid::cube(N, M, T);
    const double vol = std::pow(T, N);
    for (double c : {0.0, 1.0}) {
      const double zero = action(ComplexField::zeros(grid), Params{.c = c}).action;
      worst_zero = std::max(worst_zero, std::abs(zero - vol / 4) / (vol / 4));
      for (double theta : {0.0, 1.0, 2.5, pi}) {
        const double unit = action(ansatz::constant(theta, grid), Params{.c = c}).action;
        worst_unit = std::max(worst_unit, std::abs(unit) / (vol / 4));
      }
    }
  }
  return {worst_zero <= 1e-12 && worst_unit <= 1e-12,
          fmt("max rel err I(0) %.2e, max |I(e^{i theta})|/(T^N/4) %.2e", worst_zero, worst_unit)};
}

Verdict oracle_solutions() {
  const auto grid = TorusGrid::cube(2, 128, 4 * pi);
  const Params p{.c = 1.0};
  const auto pw = ansatz::plane_wave(-1, 1.0, grid);
  const double residual = l2_norm(gradient(pw, p));
  const double expected = 16 * pi * pi * (-9.0 / 64.0);
  const double rel = std::abs(action(pw, p).action - expected) / std::abs(expected);
  return {residual <= 1e-10 && rel <= 1e-10, fmt("residual %.2e, action rel err %.2e", residual, rel)};
}

Verdict derivative_consistency() {
  const auto grid = TorusGrid::cube(2, 16, 2 * pi);
  double worst_g = 0, worst_h = 0;
  for (std::uint64_t seed = 0; seed < 25; ++seed) {
    const Params p{.c = 0.1 * (seed % 15)};
    const auto f = random_field(grid, 1000 + seed, 0.8);
    const auto phi = random_field(grid, 2000 + seed, 0.5);
    const double h1 = 1e-5;
    const double fd = (action(f + h1 * phi, p).action - action(f - h1 * phi, p).action) / (2 * h1);
    const double exact = l2_product(gradient(f, p), phi);
    worst_g = std::max(worst_g, std::abs(fd - exact) / std::abs(exact));
    const double h2 = 1e-4;
    const auto fdh = (1.0 / (2 * h2)) * (gradient(f + h2 * phi, p) - gradient(f - h2 * phi, p));
    const auto hex = hessian_apply(f, phi, p);
    worst_h = std::max(worst_h, l2_norm(fdh - hex) / l2_norm(hex));
  }
  return {worst_g <= 1e-6 && worst_h <= 1e-5,
          fmt("25 cases: gradient max rel err %.2e, hessian max rel err %.2e", worst_g, worst_h)};
}

Verdict constant_spectrum() {
  const double symbol = 2 + 1 - std::sqrt(2.0);  // |xi|^2 + 1 - sqrt(1 + c^2 xi_1^2) at xi = (1, 0)
  const auto report = hessian_spectrum_at_constant(0.0, Params{.c = 1.0}, TorusGrid::cube(2, 32, 2 * pi), 5);
  const double iterative = report.smallest_eigenvalues.front().value;
  auto H = dense_hessian(ComplexField::constant(TorusGrid::cube(2, 8, 2 * pi), 1.0), Params{.c = 1.0});
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (H + H.transpose()), Eigen::EigenvaluesOnly);
  const double dense = eig.eigenvalues()[1];  // [0] is the degenerate direction
  const double expected = 2 - std::sqrt(2.0);
  std::vector<double> cs, Ts;
  for (int i = 0; i < 10; ++i) cs.push_back(0.15 + 0.3 * i);
  for (int j = 0; j < 10; ++j) Ts.push_back(1.0 + 1.1 * j);
  const auto lattice = positivity_lattice(cs, Ts);
  int mismatches = 0;
  for (int i = 0; i < 10; ++i)
    for (int j = 0; j < 10; ++j) mismatches += lattice[i][j] != symbol_positivity(cs[i], Ts[j]);
  const double e1 = std::abs(iterative - expected), e2 = std::abs(dense - expected),
               e3 = std::abs(symbol - 1 - expected);
  return {e1 <= 1e-8 && e2 <= 1e-8 && e3 <= 1e-12 && mismatches == 0,
          fmt("iterative %.15f (err %.1e), dense 8^2 err %.1e, symbol err %.1e, lattice mismatches %d/100",
              iterative, e1, e2, e3, mismatches)};
}

Verdict descent_minimizer() {
  const double T = 40.0;
  const auto result = theorem_E_experiment(1.0, T, 256, 8.0);
  const auto& cp = result.point;
  const double integral = std::abs(cp.certificates.integral);
  const bool pass = cp.converged && cp.residual <= 1e-6 * T && !is_constant(cp.classification) &&
                    cp.report.action < 0 && integral <= 1e-6;
  return {pass, fmt("action %.10f, residual %.2e, |int (1-|psi|^2) psi| %.2e, class %s, %d iterations",
                    cp.report.action, cp.residual, integral, to_string(cp.classification).c_str(), cp.iterations)};
}

Verdict mountain_pass() {
  const Params p{.c = 1.0};
  const double h = 40.0 / 256;
  const auto path40 = init_path(1.0, TorusGrid::cube(2, 256, 40.0), 8.0);
  const double M = *path40.upper_bound;
  std::string gammas;
  bool gamma_ok = true;
  std::optional<SaddleResult> saddle;
  for (double T : {30.0, 40.0, 50.0}) {
    const auto grid = TorusGrid::cube(2, static_cast<int>(std::lround(T / h)), T);
    const auto path = T == 40.0 ? path40 : init_path(1.0, grid, 8.0);
    const auto relaxed = relax_path(path, p);
    gamma_ok = gamma_ok && relaxed.gamma > 0 && relaxed.gamma <= M;
    gammas += fmt(" gamma(%g)=%.6f", T, relaxed.gamma);
    if (T == 40.0) saddle = find_saddle(relaxed.path, p);
  }
  const auto& s = *saddle;
  const double a = s.saddle.report.action;
  const bool pass = gamma_ok && s.saddle.converged && a > 0 && a <= M + 1e-8 && s.saddle.residual <= 1e-6 * 40.0 &&
                    s.witness_quotient < 0;
  return {pass, fmt("M %.8f, saddle action %.10f, residual %.2e, witness quotient %.4f;", M, a, s.saddle.residual,
                    s.witness_quotient) +
                    gammas};
}

Verdict small_period_constancy() {
  const double c = 1.0;
  const auto small = constancy_scan(c, {1.0, 1.5, 1.8}, 20, 32);
  bool all_constant = true;
  for (const auto& row : small.rows) all_constant = all_constant && row.all_constant && row.not_converged == 0;
  const auto scan = constancy_scan(
      c, {1.0, 1.5, 1.8, 2.0, 2.5, 3.0, 3.5, 3.8, 3.9, 4.0, 4.25, 4.5, 4.75, 5.0, 5.5, 6.0, 7.0, 8.0}, 20, 32);
  const double lo = case1_bound(c), hi = 3.884;
  const bool onset_ok = scan.empirical_onset && *scan.empirical_onset >= lo && *scan.empirical_onset <= hi;
  std::string onset = scan.empirical_onset ? fmt("%.4g", *scan.empirical_onset) : std::string("none");
  std::string upper = scan.onset_upper ? fmt("%.4g", *scan.onset_upper) : std::string("none");
  return {all_constant && onset_ok,
          fmt("T in {1.0,1.5,1.8} all constant: %s; empirical onset %s (first nonconstant at T=%s), window [%.4f, %.4f]",
              all_constant ? "yes" : "no", onset.c_str(), upper.c_str(), lo, hi)};
}

Verdict scaling() {
  const auto rows = ansatz::scaling_table({4.0, 8.0, 16.0, 32.0}, 1.0);
  std::vector<double> R, P, K;
  for (const auto& r : rows) {
    R.push_back(r.R);
    P.push_back(r.report.momentum);
    K.push_back(r.report.kinetic);
  }
  const double slope = ansatz::loglog_slope(R, P);
  // A log R growth: increments per doubling stay comparable, ratios shrink toward 1.
  bool kinetic_ok = true;
  double inc_min = 1e300, inc_max = 0;
  for (int i = 1; i < 4; ++i) {
    const double inc = K[i] - K[i - 1];
    kinetic_ok = kinetic_ok && inc > 0;
    inc_min = std::min(inc_min, inc);
    inc_max = std::max(inc_max, inc);
    if (i >= 2) kinetic_ok = kinetic_ok && K[i] / K[i - 1] < K[i - 1] / K[i - 2];
  }
  kinetic_ok = kinetic_ok && inc_max / inc_min < 1.5 && K[3] / K[2] < 1.35;
  return {slope >= 0.85 && slope <= 1.15 && kinetic_ok,
          fmt("momentum slope %.4f, kinetic %.3f %.3f %.3f %.3f (increments %.3f..%.3f)", slope, K[0], K[1], K[2],
              K[3], inc_min, inc_max)};
}

Verdict weighted_eigenvalue_identities() {
  const auto grid = TorusGrid::cube(2, 32, 5.0);
  const double lambda = poincare_constant(grid).lambda;
  const auto n = grid.node_count();
  const double two = weighted_eigenvalue(Eigen::VectorXd::Constant(n, 2.0), grid);
  const double rel = std::abs(two - lambda / 2) / (lambda / 2);
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> u(0.5, 2.0);
  double worst = 1e300;
  for (int k = 0; k < 20; ++k) {
    Eigen::VectorXd w(n);
    for (auto& x : w) x = u(rng);
    worst = std::min(worst, weighted_eigenvalue(w, grid) - lambda / 2);
  }
  bool halving = true;
  for (double T : {0.5, 2 * pi, 5.0, 40.0})
    halving = halving && poincare_constant(TorusGrid::cube(2, 32, T / 2)).lambda ==
                             4 * poincare_constant(TorusGrid::cube(2, 32, T)).lambda;
  return {rel <= 1e-12 && worst >= -1e-10 && halving,
          fmt("lambda(2)/(lambda(1)/2) - 1 = %.1e, min over 20 weights of lambda(f) - lambda(2) = %.4f, "
              "lambda(T/2) == 4 lambda(T): %s",
              rel, worst, halving ? "yes" : "no")};
}

}  // namespace

int main(int argc, char** argv) {
  const std::vector<std::pair<std::string, std::function<Verdict()>>> criteria = {
      {"functional exactness", functional_exactness},
      {"oracle solutions", oracle_solutions},
      {"derivative consistency", derivative_consistency},
      {"Hessian spectrum at constants", constant_spectrum},
      {"minimizer from 1 + w_R", descent_minimizer},
      {"mountain-pass saddle", mountain_pass},
      {"small-period constancy", small_period_constancy},
      {"test-function scalings", scaling},
      {"weighted eigenvalue", weighted_eigenvalue_identities},
  };
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::atoi(argv[i]));
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const int id = static_cast<int>(k) + 1;
    if (!selected.empty() && !selected.count(id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Verdict v;
    try {
      v = criteria[k].second();
    } catch (const std::exception& e) {
      v = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    std::printf("%s %d %s: %s [%.1fs]\n", v.pass ? "PASS" : "FAIL", id, criteria[k].first.c_str(), v.detail.c_str(),
                secs);
    std::fflush(stdout);
    failures += !v.pass;
  }
  return failures == 0 ? 0 : 1;
}
