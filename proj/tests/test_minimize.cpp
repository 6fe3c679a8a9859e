#include "gptw/error.hpp"
#include "gptw/minimize.hpp"
#include "random_fields.hpp"

#include <doctest.h>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>
#include <sstream>

using namespace gptw;
using std::numbers::pi;

TEST_CASE("options validation") {
  MinimizeOptions o;
  CHECK_NOTHROW(o.validate());
  o.max_iters = 0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  o.backtrack = 1.0;
  CHECK_THROWS_AS(o.validate(), InvalidArgument);
  o = {};
  CHECK(o.resolved_grad_tol(TorusGrid::cube(2, 8, 40.0)) == doctest::Approx(4e-7));
}

TEST_CASE("classification") {
  const auto grid = TorusGrid::cube(2, 64, 4 * pi);
  CHECK(classify(ComplexField::zeros(grid)) == Classification::ZeroConstant);
  CHECK(classify(ansatz::constant(1.2, grid)) == Classification::UnitConstant);
  CHECK(classify(ansatz::plane_wave(-1, 1.0, grid)) == Classification::PlaneWave);
  CHECK(classify(ComplexField::constant(grid, 0.5)) == Classification::OtherNonconstant);
  auto pair = ansatz::vortex_test_function(VortexAnsatz::with_defaults(2), TorusGrid::cube(2, 64, 8.0));
  CHECK(classify(pair) == Classification::Vortexful);
  auto bump = ComplexField::sample(grid, [](std::span<const double> x) { return 1.0 + 0.2 * std::sin(x[1]); });
  CHECK(classify(bump) == Classification::OtherNonconstant);
  CHECK(to_string(Classification::PlaneWave) == "PlaneWave");
}

TEST_CASE("constants are returned unchanged") {
  const auto grid = TorusGrid::cube(2, 32, 5.0);
  Params p{.c = 1.0};
  for (double theta : {0.0, 2.0}) {
    auto init = ansatz::constant(theta, grid);
    auto cp = minimize_action(init, p);
    CHECK(cp.converged);
    CHECK(cp.iterations == 0);
    CHECK(cp.field.values() == init.values());
    CHECK(cp.classification == Classification::UnitConstant);
  }
  auto zero = minimize_action(ComplexField::zeros(grid), p);
  CHECK(zero.iterations == 0);
  CHECK(zero.classification == Classification::ZeroConstant);

  // r = 0.5 is not critical: descent must move to the unit circle.
  auto half = minimize_action(ComplexField::constant(grid, 0.5), p);
  CHECK(half.converged);
  CHECK(half.iterations > 0);
  CHECK(half.classification == Classification::UnitConstant);
}

TEST_CASE("descent is monotone and reports a consistent residual") {
  const auto grid = TorusGrid::cube(2, 32, 8.0);
  Params p{.c = 1.0};
  auto init = ansatz::perturb(ComplexField::zeros(grid), 0.5, 4, 7);
  std::ostringstream log;
  MinimizeOptions o;
  o.log = &log;
  o.log_every = 1;
  auto cp = minimize_action(init, p, o);
  CHECK(cp.converged);
  CHECK(cp.residual <= o.resolved_grad_tol(grid));
  CHECK(std::abs(cp.residual - l2_norm(gradient(cp.field, p))) <= 1e-12);
  for (std::size_t i = 1; i < cp.action_history.size(); ++i) REQUIRE(cp.action_history[i] <= cp.action_history[i - 1]);
  CHECK(cp.action_history.back() == doctest::Approx(cp.report.action).epsilon(1e-9));
  CHECK_FALSE(log.str().empty());
}

TEST_CASE("perturbed stable plane wave relaxes back") {
  const auto grid = TorusGrid::cube(2, 32, 4 * pi);
  Params p{.c = 1.0};
  auto pw = ansatz::plane_wave(-1, 1.0, grid);

  // Local minimality: dense Hessian on a 16^2 copy has no negative eigenvalue
  // (zero modes from phase/translation only).
  const auto small = TorusGrid::cube(2, 16, 4 * pi);
  auto pw_small = ansatz::plane_wave(-1, 1.0, small);
  const Eigen::Index n = small.node_count();
  Eigen::MatrixXd dense(2 * n, 2 * n);
  for (Eigen::Index j = 0; j < 2 * n; ++j) {
    Eigen::VectorXcd e = Eigen::VectorXcd::Zero(n);
    e[j / 2] = (j % 2 == 0) ? Complex(1, 0) : Complex(0, 1);
    auto col = hessian_apply(pw_small, ComplexField(small, e), p).values();
    for (Eigen::Index i = 0; i < n; ++i) {
      dense(2 * i, j) = col[i].real();
      dense(2 * i + 1, j) = col[i].imag();
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (dense + dense.transpose()), Eigen::EigenvaluesOnly);
  CHECK(eig.eigenvalues()[0] > -1e-10);
  CHECK(eig.eigenvalues()[1] > 1e-3);

  for (std::uint64_t seed : {1u, 2u, 3u}) {
    auto cp = minimize_action(ansatz::perturb(pw, 1e-3, 3, seed), p);
    CHECK(cp.converged);
    CHECK(std::abs(cp.report.action - ansatz::plane_wave_action(-1, 1.0, grid)) <= 1e-6);
    CHECK(cp.classification == Classification::PlaneWave);
  }
}

TEST_CASE("phase equivariance of the descent") {
  const auto grid = TorusGrid::cube(2, 32, 9.0);
  Params p{.c = 0.8};
  auto init = ansatz::perturb(ansatz::constant(0.0, grid), 0.8, 3, 11);
  const double base = minimize_action(init, p).report.action;
  for (double theta : {pi / 7, 1.0, 2.0}) {
    auto cp = minimize_action(std::polar(1.0, theta) * init, p);
    CHECK(std::abs(cp.report.action - base) <= 1e-8);
  }
}

TEST_CASE("zero speed keeps real data real and momentum zero") {
  const auto grid = TorusGrid::cube(2, 32, 10.0);
  auto noise = ansatz::perturb(ComplexField::zeros(grid), 0.6, 3, 5);
  ComplexField init(grid, (1.0 + noise.values().real().array()).cast<Complex>().matrix());
  auto cp = minimize_action(init, Params{.c = 0.0});
  CHECK(cp.converged);
  CHECK(cp.field.values().imag().cwiseAbs().maxCoeff() < 1e-12);
  CHECK(std::abs(cp.report.momentum) < 1e-10);
}

TEST_CASE("below the case-1 bound every start lands on a constant") {
  const double c = 1.0;
  const double bound = 2 * pi / std::sqrt(8 + 4 * c * c);
  CHECK(bound == doctest::Approx(1.8138).epsilon(1e-4));
  const auto grid = TorusGrid::cube(2, 32, 1.5);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double amplitude = std::array{0.1, 0.5, 1.0}[seed % 3];
    auto cp = minimize_action(ansatz::perturb(ComplexField::zeros(grid), amplitude, 4, seed), Params{.c = c});
    CHECK(cp.converged);
    CHECK(is_constant(cp.classification));
  }
}

TEST_CASE("small-period experiment from a noisy zero field") {
  auto init = ansatz::perturb(ComplexField::zeros(TorusGrid::cube(2, 64, 3.0)), 0.5, 4, 2024);
  auto result = theorem_E_experiment(init, 1.0);
  CHECK(result.point.converged);
  CHECK(is_constant(result.row.classification));
  CHECK(result.row.T == 3.0);
}

TEST_CASE("vortex-pair start reaches a nonconstant negative-action critical point") {
  auto result = theorem_E_experiment(1.0, 40.0, 128, 8.0);
  CHECK(result.point.converged);
  CHECK(result.row.action < 0.0);
  CHECK_FALSE(is_constant(result.row.classification));
  CHECK(std::abs(result.point.certificates.integral) <= 1e-6);
  CHECK(to_csv(result.row).find("1,40,") == 0);
  CHECK(experiment_csv_header() == "c,T,action,residual,classification,converged");
}

TEST_CASE("non-finite iterates are reported") {
  const auto grid = TorusGrid::cube(2, 16, 4.0);
  // A huge field makes the quartic term overflow.
  auto cp = ComplexField::constant(grid, 1e160);
  CHECK_THROWS_AS(minimize_action(cp, Params{.c = 0.0}), NonFiniteValue);
}
