#include "vpen/instances.hpp"

#include <cmath>

#include "vpen/errors.hpp"

namespace vpen {

namespace {

void check_quadratic(const Quadratic& g, Eigen::Index d, const std::string& what) {
  if (g.Q.rows() != d || g.Q.cols() != d || g.q.size() != d) {
    throw StructuralError(what + ": coefficient shapes do not match dimension " +
                          std::to_string(d));
  }
}

ProblemInstance base_instance(const InstanceMeta& meta, const char* family, SimpleSet q,
                              ConeSpace cone) {
  ProblemInstance inst{meta.name, family, {}, {}, std::move(q), std::move(cone),
                       meta.reference, meta.exact_tau, {}};
  return inst;
}

ProblemInstance build_nlp(const NlpSpec& spec) {
  const Eigen::Index d = spec.lo.size();
  check_quadratic(spec.objective, d, spec.meta.name + " objective");
  for (const auto& g : spec.inequalities) check_quadratic(g, d, spec.meta.name + " inequality");
  for (const auto& g : spec.equalities) check_quadratic(g, d, spec.meta.name + " equality");
  const auto m = static_cast<int>(spec.inequalities.size() + spec.equalities.size());
  if (m < 1) throw StructuralError(spec.meta.name + ": an nlp instance needs a constraint");

  ProblemInstance inst = base_instance(spec.meta, "nlp", SimpleSet(spec.lo, spec.hi),
                                       ConeSpace::orthant(m));
  inst.objective = [f = spec.objective](const Point& x) { return f(x); };
  inst.penalty_term = [ineq = spec.inequalities, eq = spec.equalities,
                       space = inst.cone](const Point& x) {
    Eigen::VectorXd phi(space.dim());
    Eigen::Index k = 0;
    for (const auto& g : ineq) phi[k++] = std::max(0.0, g(x));
    for (const auto& g : eq) phi[k++] = std::abs(g(x));
    return ConeElement(space, std::move(phi));
  };
  if (spec.projection_hint == "unit_circle") {
    inst.feasible_projection = [q = inst.feasible_set](const Point& x) -> std::optional<Point> {
      const double r = x.norm();
      if (r == 0.0) return std::nullopt;
      Point z = x / r;
      if (!q.contains(z)) return std::nullopt;
      return z;
    };
  } else if (!spec.projection_hint.empty()) {
    throw StructuralError(spec.meta.name + ": unknown projection hint '" + spec.projection_hint +
                          "'");
  }
  return inst;
}

ProblemInstance build_sdp(const SdpSpec& spec) {
  const Eigen::Index d = spec.lo.size();
  check_quadratic(spec.objective, d, spec.meta.name + " objective");
  const Eigen::Index l = spec.a0.rows();
  if (l < 1 || spec.a0.cols() != l) throw StructuralError(spec.meta.name + ": A0 must be square");
  if (static_cast<Eigen::Index>(spec.a.size()) != d) {
    throw StructuralError(spec.meta.name + ": need one matrix A_i per decision variable");
  }
  for (const auto& ai : spec.a) {
    if (ai.rows() != l || ai.cols() != l) {
      throw StructuralError(spec.meta.name + ": every A_i must match the order of A0");
    }
  }
  ProblemInstance inst = base_instance(spec.meta, "sdp", SimpleSet(spec.lo, spec.hi),
                                       ConeSpace::psd(static_cast<int>(l)));
  inst.objective = [f = spec.objective](const Point& x) { return f(x); };
  inst.penalty_term = [a0 = spec.a0, a = spec.a, space = inst.cone](const Point& x) {
    Eigen::MatrixXd g = a0;
    for (std::size_t i = 0; i < a.size(); ++i) g += x[static_cast<Eigen::Index>(i)] * a[i];
    return project(space, g);
  };
  return inst;
}

ProblemInstance build_control(const ControlSpec& spec) {
  if (spec.nodes < 1) throw StructuralError(spec.meta.name + ": need at least one node");
  if (!(spec.horizon > 0.0)) throw StructuralError(spec.meta.name + ": horizon must be > 0");
  const int n = spec.nodes;
  const double dt = spec.horizon / n;
  AffineRow row{Eigen::VectorXd::Constant(n, dt), spec.xT - spec.x0};
  SimpleSet q(Eigen::VectorXd::Constant(n, spec.u_lo), Eigen::VectorXd::Constant(n, spec.u_hi),
              std::move(row));
  ProblemInstance inst = base_instance(spec.meta, "control", std::move(q),
                                       ConeSpace::weighted_grid(Eigen::VectorXd::Constant(n, dt)));
  inst.objective = [dt, w = spec.weight](const Point& u) { return w * dt * u.squaredNorm(); };
  inst.penalty_term = [spec, space = inst.cone](const Point& u) {
    const Eigen::VectorXd x = spec.states(u);
    const int n = spec.nodes;
    Eigen::VectorXd phi = Eigen::VectorXd::Zero(n);
    for (int k = 1; k <= n; ++k) {
      const double t = spec.horizon * k / n;
      if (t <= spec.bound_until + 1e-12) phi[k - 1] = std::max(0.0, x[k] - spec.state_bound);
    }
    return ConeElement(space, std::move(phi));
  };
  return inst;
}

Eigen::MatrixXd sdp_map_matrix(double a, double b, double c) {
  Eigen::MatrixXd m(2, 2);
  m << a, b, b, c;
  return m;
}

Quadratic quadratic(Eigen::MatrixXd Q, Eigen::VectorXd q, double r) {
  return Quadratic{std::move(Q), std::move(q), r};
}

Eigen::VectorXd vec2(double a, double b) { return Eigen::Vector2d(a, b); }

}  // namespace

Quadratic Quadratic::linear(Eigen::VectorXd q, double r) {
  const Eigen::Index d = q.size();
  return Quadratic{Eigen::MatrixXd::Zero(d, d), std::move(q), r};
}

double Quadratic::operator()(const Eigen::VectorXd& x) const {
  return x.dot(Q * x) + q.dot(x) + r;
}

Eigen::VectorXd ControlSpec::states(const Eigen::VectorXd& u) const {
  if (u.size() != nodes) throw StructuralError("ControlSpec::states: wrong control length");
  const double dt = horizon / nodes;
  Eigen::VectorXd x(nodes + 1);
  x[0] = x0;
  for (int k = 0; k < nodes; ++k) x[k + 1] = x[k] + dt * u[k];
  return x;
}

const InstanceMeta& meta_of(const InstanceSpec& spec) {
  return std::visit([](const auto& s) -> const InstanceMeta& { return s.meta; }, spec);
}

const char* family_of(const InstanceSpec& spec) {
  struct Visitor {
    const char* operator()(const NlpSpec&) const { return "nlp"; }
    const char* operator()(const SdpSpec&) const { return "sdp"; }
    const char* operator()(const ControlSpec&) const { return "control"; }
  };
  return std::visit(Visitor{}, spec);
}

ProblemInstance build_instance(const InstanceSpec& spec) {
  struct Visitor {
    ProblemInstance operator()(const NlpSpec& s) const { return build_nlp(s); }
    ProblemInstance operator()(const SdpSpec& s) const { return build_sdp(s); }
    ProblemInstance operator()(const ControlSpec& s) const { return build_control(s); }
  };
  return std::visit(Visitor{}, spec);
}

NlpSpec nlp_circle_spec() {
  NlpSpec s;
  const double h = std::sqrt(2.0) / 2.0;
  s.meta = {"nlp_circle", ReferenceOptimum{vec2(-h, -h), -std::sqrt(2.0), 1e-4},
            Eigen::VectorXd::Constant(1, 10.0),
            "coefficients are artifact choices; f* from the Lagrange conditions"};
  s.lo = vec2(-2, -2);
  s.hi = vec2(2, 2);
  s.objective = Quadratic::linear(vec2(1, 1));
  s.equalities.push_back(quadratic(Eigen::MatrixXd::Identity(2, 2), vec2(0, 0), -1.0));
  s.projection_hint = "unit_circle";
  return s;
}

NlpSpec nlp_mixed_spec() {
  NlpSpec s;
  s.meta = {"nlp_mixed", ReferenceOptimum{vec2(1, 1), 1.0, 1e-4}, vec2(10, 10),
            "coefficients are artifact choices; optimum at the vertex x1^2 = x2, x1 + x2 = 2"};
  s.lo = vec2(-3, -3);
  s.hi = vec2(3, 3);
  s.objective = quadratic(Eigen::MatrixXd::Identity(2, 2), vec2(-4, -2), 5.0);
  Eigen::MatrixXd q1 = Eigen::MatrixXd::Zero(2, 2);
  q1(0, 0) = 1.0;
  s.inequalities.push_back(quadratic(q1, vec2(0, -1), 0.0));
  s.inequalities.push_back(Quadratic::linear(vec2(1, 1), -2.0));
  return s;
}

SdpSpec sdp_small_spec() {
  SdpSpec s;
  s.meta = {"sdp_small", ReferenceOptimum{vec2(-2, -2), -6.0, 1e-4},
            Eigen::VectorXd(Eigen::Vector3d(1, 0, 1)),
            "coefficients are artifact choices; the PSD constraint is inactive at the box corner"};
  s.lo = vec2(-2, -2);
  s.hi = vec2(2, 2);
  s.objective = Quadratic::linear(vec2(1, 2));
  s.a0 = sdp_map_matrix(-1, 0, -1);
  s.a = {sdp_map_matrix(1, 0, 1), sdp_map_matrix(0, 1, 0)};
  return s;
}

SdpSpec sdp_active_spec() {
  SdpSpec s = sdp_small_spec();
  s.meta = {"sdp_active", ReferenceOptimum{vec2(1, 0), -2.0, 1e-4},
            Eigen::VectorXd(Eigen::Vector3d(5, 0, 5)),
            "coefficients are artifact choices; optimum where G(x) = 0, threshold c = 1.5 along c*I"};
  s.objective = Quadratic::linear(vec2(-2, -1));
  return s;
}

ControlSpec control_toy_spec() {
  ControlSpec s;
  s.meta = {"control_toy",
            ReferenceOptimum{Eigen::VectorXd::Ones(20), 1.0, 1e-4},
            Eigen::VectorXd::Ones(20),
            "discretization is an artifact choice; u = 1 is optimal and the state bound is slack"};
  return s;
}

ControlSpec control_active_spec() {
  ControlSpec s;
  s.state_bound = 0.4;
  Eigen::VectorXd u(20);
  u << Eigen::VectorXd::Constant(10, 0.8), Eigen::VectorXd::Constant(10, 1.2);
  s.meta = {"control_active", ReferenceOptimum{u, 1.04, 1e-4},
            Eigen::VectorXd::Constant(20, 100.0),
            "discretization is an artifact choice; the bound binds at t = 0.5 with multiplier 0.8"};
  return s;
}

ProblemInstance build_nlp_circle() { return build_instance(nlp_circle_spec()); }
ProblemInstance build_nlp_mixed() { return build_instance(nlp_mixed_spec()); }
ProblemInstance build_sdp_small() { return build_instance(sdp_small_spec()); }
ProblemInstance build_sdp_active() { return build_instance(sdp_active_spec()); }
ProblemInstance build_control_toy() { return build_instance(control_toy_spec()); }
ProblemInstance build_control_active() { return build_instance(control_active_spec()); }

std::vector<std::string> bundled_names() {
  return {"nlp_circle", "nlp_mixed", "sdp_small", "sdp_active", "control_toy", "control_active"};
}

InstanceSpec bundled_spec(const std::string& name) {
  if (name == "nlp_circle") return nlp_circle_spec();
  if (name == "nlp_mixed") return nlp_mixed_spec();
  if (name == "sdp_small") return sdp_small_spec();
  if (name == "sdp_active") return sdp_active_spec();
  if (name == "control_toy") return control_toy_spec();
  if (name == "control_active") return control_active_spec();
  std::string known;
  for (const auto& n : bundled_names()) known += (known.empty() ? "" : ", ") + n;
  throw PreconditionError("unknown bundled instance '" + name + "' (known: " + known + ")");
}

}  // namespace vpen
