#pragma once

#include "gptw/field.hpp"

#include <optional>
#include <string>

namespace gptw {

/// Wave speed and the tolerances used when judging critical points.
struct Params {
  double c = 0.0;
  double grad_tol = 1e-8;
  double cert_tol = 1e-9;
  /// Two-thirds-rule filtering of the nonlinear term (convergence studies).
  bool dealias = false;

  void validate() const;
};

struct Energy {
  double kinetic = 0.0;    // (1/2) int |grad psi|^2
  double potential = 0.0;  // (1/4) int (1 - |psi|^2)^2
};

struct ActionReport {
  double kinetic = 0.0;
  double potential = 0.0;
  double momentum = 0.0;
  double action = 0.0;  // kinetic + potential - c * momentum
};

/// Outcome of checking the integral identities every solution satisfies.
struct Certificate {
  double residual = 0.0;        // ||gradient||_{L2}
  Complex integral{0.0, 0.0};   // int (1 - |psi|^2) psi
  std::optional<double> lifted; // lifted energy identity, empty when vortexful
  std::string note;

  /// Largest certificate magnitude (lifted identity included when present).
  double worst() const;
};

Energy energy(const ComplexField& f, bool dealias = false);
double momentum(const ComplexField& f);
ActionReport action(const ComplexField& f, const Params& p);

/// L2 gradient of the action: -Lap f - c i d_1 f - (1 - |f|^2) f.
ComplexField gradient(const ComplexField& f, const Params& p);

/// Second variation at `base` applied to `dir`:
/// -Lap phi - c i d_1 phi - (1 - |psi|^2) phi + 2 (psi . phi) psi.
ComplexField hessian_apply(const ComplexField& base, const ComplexField& dir, const Params& p);

Certificate certify(const ComplexField& f, const Params& p);

/// Vectorized evaluation of the action on one grid, used by the solvers.
///
/// Works on raw node vectors in physical representation and keeps the FFT
/// count per evaluation minimal. All products are real L2 products.
class ActionModel {
 public:
  ActionModel(TorusGrid grid, Params params);

  const TorusGrid& grid() const { return grid_; }
  const Params& params() const { return params_; }

  ActionReport report(const Eigen::VectorXcd& f) const;
  /// Action value; fills `grad` with the L2 gradient when non-null.
  double value_and_gradient(const Eigen::VectorXcd& f, Eigen::VectorXcd* grad,
                            ActionReport* report = nullptr) const;
  void hessian_apply(const Eigen::VectorXcd& base, const Eigen::VectorXcd& dir,
                     Eigen::VectorXcd& out) const;
  /// Applies (1 - Lap)^{-1}.
  void precondition(const Eigen::VectorXcd& g, Eigen::VectorXcd& out) const;

  double l2(const Eigen::VectorXcd& a, const Eigen::VectorXcd& b) const {
    return grid_.cell_volume() * a.dot(b).real();
  }
  double l2_norm(const Eigen::VectorXcd& a) const { return std::sqrt(l2(a, a)); }

  /// Accurate I(f + s d) - I(f) along a fixed line, free of the cancellation
  /// a difference of two action values suffers near convergence.
  class Line {
   public:
    Line(const ActionModel& model, const Eigen::VectorXcd& f, const Eigen::VectorXcd& d);
    double delta(double s) const;
    /// d/ds at s = 0.
    double slope() const { return linear_; }
    /// d^2/ds^2 at s = 0, i.e. the Hessian quadratic form along d.
    double curvature() const { return curvature_; }

   private:
    const ActionModel* model_;
    Eigen::VectorXd dot_fd_;  // f . d per node
    Eigen::VectorXd abs_d2_;  // |d|^2
    Eigen::VectorXd gap_;     // 1 - |f|^2
    double linear_ = 0.0;     // B(f, d) of the quadratic part plus the potential slope
    double quad_linear_ = 0.0;
    double quad_d_ = 0.0;     // Q(d)
    double curvature_ = 0.0;
  };

 private:
  Eigen::VectorXcd dealiased(const Eigen::VectorXcd& f) const;

  TorusGrid grid_;
  Params params_;
  const SpectralSymbols* symbols_;
  Eigen::VectorXd linear_symbol_;  // |xi|^2 + c xi_1
};

}  // namespace gptw
