#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "vpen/penalty.hpp"

namespace vpen {

/// x' Q x + q' x + r.
struct Quadratic {
  Eigen::MatrixXd Q;
  Eigen::VectorXd q;
  double r = 0.0;

  static Quadratic linear(Eigen::VectorXd q, double r = 0.0);
  double operator()(const Eigen::VectorXd& x) const;
};

/// Data shared by every instance family.
struct InstanceMeta {
  std::string name;
  std::optional<ReferenceOptimum> reference;
  std::optional<Eigen::VectorXd> exact_tau;
  std::string note;
};

/**
 * Nonlinear program with quadratic data:
 *   min f(x)  s.t.  g_i(x) <= 0 (i in I),  g_j(x) = 0 (j in J),  x in box.
 * phi(x) = (max(0, g_i(x))..., |g_j(x)|...) on the orthant R^{|I|+|J|}.
 */
struct NlpSpec {
  InstanceMeta meta;
  Eigen::VectorXd lo, hi;
  Quadratic objective;
  std::vector<Quadratic> inequalities;
  std::vector<Quadratic> equalities;
  /// "unit_circle" enables radial projection onto M; empty otherwise.
  std::string projection_hint;
};

/**
 * Nonlinear semidefinite program with an affine matrix map:
 *   min f(x)  s.t.  G(x) = A0 + sum_i x_i A_i  negative semidefinite,  x in box.
 * phi(x) = [G(x)]_+ on the PSD cone.
 */
struct SdpSpec {
  InstanceMeta meta;
  Eigen::VectorXd lo, hi;
  Quadratic objective;
  Eigen::MatrixXd a0;
  std::vector<Eigen::MatrixXd> a;
};

/**
 * Scalar state-constrained control problem on [0, T], discretized with N
 * piecewise-constant controls and forward Euler:
 *   min  int_0^T weight * u^2 dt
 *   s.t. x' = u,  x(0) = x0,  x(T) = xT,  u in [u_lo, u_hi],
 *        x(t) <= state_bound  for t <= bound_until.
 * The state is eliminated: the decision vector is u in R^N, the endpoint
 * condition is the affine row (T/N) sum_k u_k = xT - x0, and phi_k is the
 * violation at node t_k = k T / N on a weighted grid with weights T/N.
 */
struct ControlSpec {
  InstanceMeta meta;
  double horizon = 1.0;
  int nodes = 20;
  double x0 = 0.0;
  double xT = 1.0;
  double u_lo = -4.0;
  double u_hi = 4.0;
  double weight = 1.0;
  double state_bound = 0.6;
  double bound_until = 0.5;

  /// States x_0..x_N reproduced from controls by forward Euler.
  Eigen::VectorXd states(const Eigen::VectorXd& u) const;
};

using InstanceSpec = std::variant<NlpSpec, SdpSpec, ControlSpec>;

const InstanceMeta& meta_of(const InstanceSpec& spec);
const char* family_of(const InstanceSpec& spec);

ProblemInstance build_instance(const InstanceSpec& spec);

/// f = x1 + x2, x1^2 + x2^2 = 1, Q = [-2, 2]^2.
NlpSpec nlp_circle_spec();
/// f = (x1-2)^2 + (x2-1)^2, x1^2 - x2 <= 0, x1 + x2 - 2 <= 0, Q = [-3, 3]^2.
NlpSpec nlp_mixed_spec();
/// f = x1 + 2 x2, G = [[x1-1, x2], [x2, x1-1]], Q = [-2, 2]^2. Constraint inactive at the optimum.
SdpSpec sdp_small_spec();
/// Same matrix map with f = -2 x1 - x2; the optimum sits on the PSD boundary.
SdpSpec sdp_active_spec();
/// N = 20, bound x(t) <= 0.6 on [0, 0.5]. Constraint inactive at the optimum.
ControlSpec control_toy_spec();
/// N = 20, bound x(t) <= 0.4 on [0, 0.5]. Constraint active at the optimum.
ControlSpec control_active_spec();

ProblemInstance build_nlp_circle();
ProblemInstance build_nlp_mixed();
ProblemInstance build_sdp_small();
ProblemInstance build_sdp_active();
ProblemInstance build_control_toy();
ProblemInstance build_control_active();

/// Names accepted by bundled_spec(), in listing order.
std::vector<std::string> bundled_names();
/// Throws PreconditionError for unknown names.
InstanceSpec bundled_spec(const std::string& name);

}  // namespace vpen
