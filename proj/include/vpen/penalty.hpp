#pragma once

#include <functional>
#include <optional>
#include <string>

#include <Eigen/Core>

#include "vpen/cones.hpp"
#include "vpen/simple_set.hpp"

namespace vpen {

using Point = Eigen::VectorXd;

/// x -> f(x), may return +inf.
using Objective = std::function<double(const Point&)>;
/// x -> phi(x) in K, or the improper element.
using PenaltyTerm = std::function<ConeElement(const Point&)>;
/// Closed-form projection onto M intersected with Q, where one is known.
using FeasibleProjection = std::function<std::optional<Point>(const Point&)>;

/// Known solution of the constrained problem.
struct ReferenceOptimum {
  Point x;
  double f = 0.0;
  /// Accuracy of the stored value.
  double tol = 1e-4;
};

/**
 * minimize f(x) subject to x in M and x in Q, with M encoded by a cone-valued
 * penalty term (phi(x) = 0 iff x in M) and Q a SimpleSet.
 *
 * Evaluators must be pure and reentrant. Instances are immutable once built.
 */
struct ProblemInstance {
  std::string name;
  /// "nlp", "sdp", "control", or "custom" for hand-built fixtures.
  std::string family = "custom";
  Objective objective;
  PenaltyTerm penalty_term;
  SimpleSet feasible_set;
  ConeSpace cone;
  std::optional<ReferenceOptimum> reference;
  /// A penalty parameter recorded as globally exact for this instance.
  std::optional<Eigen::VectorXd> exact_tau;
  FeasibleProjection feasible_projection;

  int dim() const { return feasible_set.dim(); }
};

/// Phi_tau(x) = f(x) + <tau, phi(x)>.
double eval_penalized(const ProblemInstance& inst, const PenaltyParameter& tau, const Point& x);

/// Psi_c(x) = f(x) + c ||phi(x)||. Requires c >= 0.
double eval_scalar_penalty(const ProblemInstance& inst, double c, const Point& x);

/// ||phi(x)||.
double infeasibility(const ProblemInstance& inst, const Point& x);

struct Sandwich {
  double lower;  ///< Psi_{p_K(tau)}(x)
  double value;  ///< Phi_tau(x)
  double upper;  ///< Psi_{||tau||_*}(x)
};

/// Two-sided comparison of Phi_tau with scalar penalties. Requires p_K(tau) > 0.
Sandwich sandwich_bounds(const ProblemInstance& inst, const PenaltyParameter& tau, const Point& x);

/// Checks that tau lives in the instance's cone space.
void require_parameter_space(const ProblemInstance& inst, const PenaltyParameter& tau);

/**
 * The same problem with the scalar penalty term ||phi(x)|| on a one-
 * dimensional orthant, so that Phi_(c) of the result is Psi_c of `inst`.
 */
ProblemInstance scalarized(const ProblemInstance& inst);

}  // namespace vpen
