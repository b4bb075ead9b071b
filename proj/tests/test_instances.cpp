#include "doctest.h"

#include <cmath>
#include <fstream>

#include <Eigen/Dense>

#include "support.hpp"
#include "vpen/errors.hpp"
#include "vpen/instance_io.hpp"
#include "vpen/instances.hpp"

using namespace vpen;
using testing::vec;

namespace {

// lambda_max of [[x1 - 1, x2], [x2, x1 - 1]] by Jacobi, independent of the library eigensolver.
double sdp_lambda_max(const Point& x) {
  Eigen::MatrixXd g(2, 2);
  g << x[0] - 1, x[1], x[1], x[0] - 1;
  return testing::jacobi_eigen(g).first[1];
}

nlohmann::json circle_doc() { return serialize_instance(nlp_circle_spec()); }

std::string parse_error_where(const nlohmann::json& doc) {
  try {
    deserialize_instance(doc);
  } catch (const ParseError& e) {
    return e.where();
  }
  return "<no error>";
}

}  // namespace

TEST_CASE("bundled names and lookup") {
  CHECK(bundled_names() ==
        std::vector<std::string>{"nlp_circle", "nlp_mixed", "sdp_small", "sdp_active", "control_toy", "control_active"});
  for (const auto& n : bundled_names()) CHECK(build_instance(bundled_spec(n)).name == n);
  CHECK_THROWS_WITH_AS(bundled_spec("nope"), doctest::Contains("nlp_circle"), PreconditionError);
}

TEST_CASE("phi examples") {
  const ProblemInstance circle = build_nlp_circle();
  CHECK(circle.penalty_term(vec({0, 0})).coords() == vec({1}));
  CHECK(circle.penalty_term(vec({2, 0})).coords() == vec({3}));
  CHECK(circle.cone == ConeSpace::orthant(1));

  const ProblemInstance mixed = build_nlp_mixed();
  CHECK(mixed.penalty_term(vec({2, 2})).coords() == vec({2, 2}));
  CHECK(mixed.penalty_term(vec({0, 0})).coords() == vec({0, 0}));
  CHECK(mixed.objective(vec({2, 1})) == 0.0);

  // G(2, 0) = I: [G]_+ = I, Frobenius norm sqrt(2).
  const ProblemInstance sdp = build_sdp_small();
  CHECK(sdp.cone == ConeSpace::psd(2));
  CHECK((sdp.penalty_term(vec({2, 0})).matrix() - Eigen::MatrixXd::Identity(2, 2)).norm() <= 1e-12);
  CHECK(infeasibility(sdp, vec({2, 0})) == doctest::Approx(std::sqrt(2.0)));
  // G(1, 1) has eigenvalues 1 and -1 with eigenvector (1, 1)/sqrt(2) for +1.
  const Eigen::MatrixXd half = Eigen::MatrixXd::Constant(2, 2, 0.5);
  CHECK((sdp.penalty_term(vec({1, 1})).matrix() - half).norm() <= 1e-12);
  CHECK(sdp.objective(vec({1, 1})) == 3.0);

  const ProblemInstance ctl = build_control_toy();
  CHECK(ctl.dim() == 20);
  CHECK(ctl.cone.kind() == ConeKind::WeightedGrid);
  CHECK(ctl.cone.weights() == Eigen::VectorXd::Constant(20, 0.05));
  // u = 2 for ten steps reaches x = 1 at t = 0.5: nodes t = 0.35..0.5 exceed 0.6.
  Eigen::VectorXd u = Eigen::VectorXd::Zero(20);
  u.head(10).setConstant(2.0);
  const Eigen::VectorXd phi = ctl.penalty_term(u).coords();
  for (int k = 1; k <= 20; ++k) {
    const double x = 0.1 * std::min(k, 10);
    const double expect = k <= 10 ? std::max(0.0, x - 0.6) : 0.0;
    CHECK(phi[k - 1] == doctest::Approx(expect).epsilon(1e-12));
  }
  CHECK(ctl.objective(u) == doctest::Approx(0.05 * 40));
}

TEST_CASE("circle reference matches an angle sweep") {
  const ProblemInstance inst = build_nlp_circle();
  double best = 1e300;
  for (int k = 0; k < 1000000; ++k) {
    const double t = 2 * M_PI * k / 1000000;
    best = std::min(best, std::cos(t) + std::sin(t));
  }
  CHECK(std::abs(best - inst.reference->f) <= 1e-9);
  CHECK(inst.objective(inst.reference->x) == doctest::Approx(inst.reference->f));
  CHECK(infeasibility(inst, inst.reference->x) <= 1e-15);
}

TEST_CASE("mixed reference satisfies KKT with multipliers 2/3") {
  const ProblemInstance inst = build_nlp_mixed();
  const Point x = inst.reference->x;
  const Eigen::Vector2d grad_f(2 * (x[0] - 2), 2 * (x[1] - 1));
  Eigen::Matrix2d jac;
  jac << 2 * x[0], 1, -1, 1;  // columns: grad g1, grad g2
  const Eigen::Vector2d mu = jac.colPivHouseholderQr().solve(-grad_f);
  CHECK(mu[0] == doctest::Approx(2.0 / 3));
  CHECK(mu[1] == doctest::Approx(2.0 / 3));
  CHECK((grad_f + jac * mu).norm() <= 1e-12);
  CHECK(inst.penalty_term(x).coords() == vec({0, 0}));
  CHECK(inst.objective(x) == inst.reference->f);
  // Both constraints convex and f convex: a coarse grid over the feasible region cannot beat f*.
  const auto g = testing::grid_min(vec({-3, -3}), vec({3, 3}), 601, [&](const Point& z) {
    return infeasibility(inst, z) == 0.0 ? inst.objective(z) : 1e300;
  });
  CHECK(g.value >= inst.reference->f - 1e-12);
  CHECK(g.value <= inst.reference->f + 1e-3);
}

TEST_CASE("sdp references against a Jacobi feasibility oracle") {
  for (const ProblemInstance& inst : {build_sdp_small(), build_sdp_active()}) {
    INFO(inst.name);
    CHECK(sdp_lambda_max(inst.reference->x) <= 1e-12);
    CHECK(infeasibility(inst, inst.reference->x) <= 1e-12);
    const auto g = testing::grid_min(inst.feasible_set.lo(), inst.feasible_set.hi(), 401, [&](const Point& z) {
      return sdp_lambda_max(z) <= 1e-12 ? inst.objective(z) : 1e300;
    });
    CHECK(g.value >= inst.reference->f - 1e-12);
    CHECK(g.value <= inst.reference->f + 1e-12);
  }
}

TEST_CASE("control_active reference: Euler states and KKT") {
  const ControlSpec spec = control_active_spec();
  const ProblemInstance inst = build_instance(spec);
  const Point u = inst.reference->x;
  const double dt = 0.05;
  const auto x = testing::euler_states(u, 0.0, dt);
  CHECK(x.back() == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(x[10] == doctest::Approx(0.4).epsilon(1e-14));
  for (int k = 1; k < 10; ++k) CHECK(x[static_cast<std::size_t>(k)] < 0.4);
  const Eigen::VectorXd lib = spec.states(u);
  for (int k = 0; k <= 20; ++k) CHECK(lib[k] == doctest::Approx(x[static_cast<std::size_t>(k)]).epsilon(1e-15));
  CHECK(infeasibility(inst, u) <= 1e-14);
  CHECK(inst.feasible_set.contains(u, 1e-12));
  CHECK(inst.objective(u) == doctest::Approx(1.04));

  // 2 dt u_k + mu dt [k < 10] + lambda dt = 0 with mu >= 0: the problem is convex, so KKT is sufficient.
  const double lambda = -2 * u[19];
  const double mu = -2 * u[0] - lambda;
  CHECK(lambda == doctest::Approx(-2.4));
  CHECK(mu == doctest::Approx(0.8));
  for (int k = 0; k < 20; ++k) CHECK(2 * u[k] + (k < 10 ? mu : 0.0) + lambda == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("control_toy reference is the unconstrained optimum on the slice") {
  const ProblemInstance inst = build_control_toy();
  const Point u = inst.reference->x;
  CHECK(infeasibility(inst, u) == 0.0);
  CHECK(inst.objective(u) == doctest::Approx(1.0));
  // Any other point on the slice costs more: f(u + v) = f(u) + 2 dt <u, v> + dt |v|^2 with sum v = 0.
  testing::Rand r(51);
  for (int s = 0; s < 200; ++s) {
    const Point z = inst.feasible_set.project(r.vec(20, -4, 4));
    CHECK(inst.objective(z) >= inst.objective(u) - 1e-12);
  }
}

TEST_CASE("property: phi vanishes exactly on the constraint set") {
  testing::Rand r(52);
  for (int s = 0; s < 1000; ++s) {
    const ProblemInstance mixed = build_nlp_mixed();
    const Point x = r.box_point(mixed.feasible_set.lo(), mixed.feasible_set.hi());
    const bool feasible = x[0] * x[0] - x[1] <= 0 && x[0] + x[1] - 2 <= 0;
    CHECK((infeasibility(mixed, x) == 0.0) == feasible);
  }
  const ProblemInstance sdp = build_sdp_small();
  for (int s = 0; s < 1000; ++s) {
    const Point x = r.box_point(sdp.feasible_set.lo(), sdp.feasible_set.hi());
    const double lmax = sdp_lambda_max(x);
    if (std::abs(lmax) < 1e-9) continue;
    CHECK((infeasibility(sdp, x) <= 1e-12) == (lmax < 0));
  }
  const ControlSpec spec = control_active_spec();
  const ProblemInstance ctl = build_instance(spec);
  for (int s = 0; s < 1000; ++s) {
    const Point u = ctl.feasible_set.project(r.vec(20, -4, 4));
    const auto x = testing::euler_states(u, 0.0, 0.05);
    bool feasible = true;
    for (int k = 1; k <= 10; ++k) feasible = feasible && x[static_cast<std::size_t>(k)] <= 0.4;
    CHECK((infeasibility(ctl, u) == 0.0) == feasible);
  }
}

TEST_CASE("malformed specs are structural errors") {
  NlpSpec s = nlp_circle_spec();
  s.equalities.clear();
  CHECK_THROWS_AS(build_instance(s), StructuralError);
  s = nlp_circle_spec();
  s.objective.q = vec({1, 2, 3});
  CHECK_THROWS_AS(build_instance(s), StructuralError);
  s = nlp_circle_spec();
  s.projection_hint = "sphere";
  CHECK_THROWS_AS(build_instance(s), StructuralError);
  SdpSpec d = sdp_small_spec();
  d.a.pop_back();
  CHECK_THROWS_AS(build_instance(d), StructuralError);
  ControlSpec c = control_toy_spec();
  c.nodes = 0;
  CHECK_THROWS_AS(build_instance(c), StructuralError);
}

TEST_CASE("JSON round trip preserves every bundled instance bitwise") {
  testing::Rand r(53);
  for (const auto& name : bundled_names()) {
    INFO(name);
    const InstanceSpec spec = bundled_spec(name);
    const nlohmann::json doc = serialize_instance(spec);
    const InstanceSpec back = deserialize_instance(nlohmann::json::parse(doc.dump()));
    CHECK(serialize_instance(back) == doc);
    CHECK(std::string(family_of(back)) == family_of(spec));
    const InstanceMeta& a = meta_of(spec);
    const InstanceMeta& b = meta_of(back);
    CHECK(b.name == a.name);
    REQUIRE(b.reference.has_value());
    CHECK(b.reference->x == a.reference->x);
    CHECK(b.reference->f == a.reference->f);
    CHECK(b.reference->tol == a.reference->tol);
    CHECK(*b.exact_tau == *a.exact_tau);

    const ProblemInstance p = build_instance(spec);
    const ProblemInstance q = build_instance(back);
    for (int s = 0; s < 50; ++s) {
      const Point x = p.feasible_set.project(r.box_point(p.feasible_set.lo(), p.feasible_set.hi()));
      CHECK(p.objective(x) == q.objective(x));
      CHECK(p.penalty_term(x).coords() == q.penalty_term(x).coords());
    }
  }
}

TEST_CASE("instance documents round trip through a file") {
  const auto path = std::filesystem::temp_directory_path() / "vpen_test_instance.json";
  {
    std::ofstream out(path);
    out << serialize_instance(sdp_active_spec()).dump(2);
  }
  const ProblemInstance inst = build_instance(load_instance_file(path));
  CHECK(inst.name == "sdp_active");
  CHECK(inst.reference->f == -2.0);
  std::filesystem::remove(path);
  CHECK_THROWS_AS(load_instance_file(path), ParseError);
}

TEST_CASE("parse errors carry the JSON pointer of the offending field") {
  nlohmann::json doc = circle_doc();
  doc.erase("family");
  CHECK(parse_error_where(doc) == "/family");

  doc = circle_doc();
  doc["family"] = "qp";
  CHECK(parse_error_where(doc) == "/family");
  CHECK_THROWS_WITH_AS(deserialize_instance(doc), doctest::Contains("unknown family"), ParseError);

  doc = circle_doc();
  doc["box"]["lo"] = {1.0};
  CHECK(parse_error_where(doc) == "/box/lo");

  doc = circle_doc();
  doc["equalities"][0]["Q"][1] = {1.0, "x"};
  CHECK(parse_error_where(doc) == "/equalities/0/Q/1/1");

  doc = circle_doc();
  doc["dim"] = 1.5;
  CHECK(parse_error_where(doc) == "/dim");

  doc = serialize_instance(sdp_small_spec());
  doc["matrix_map"]["A"].erase(1);
  CHECK(parse_error_where(doc) == "/matrix_map/A");

  doc = serialize_instance(control_toy_spec());
  doc["control"].erase("nodes");
  CHECK(parse_error_where(doc) == "/control/nodes");

  doc = circle_doc();
  doc["reference"]["x"] = "far";
  CHECK(parse_error_where(doc) == "/reference/x");
}
