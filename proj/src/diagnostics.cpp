#include "vpen/diagnostics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <random>
#include <sstream>

#include "vpen/errors.hpp"
#include "vpen/trace_io.hpp"

namespace vpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kPi = 3.14159265358979323846;

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

double standard_normal(std::mt19937_64& rng) {
  // Box-Muller on the open interval (0, 1].
  const double u1 = 1.0 - uniform01(rng);
  const double u2 = uniform01(rng);
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * kPi * u2);
}

// Uniform in the ball, then projected onto Q. Projection onto the convex set Q
// does not increase the distance to a center that lies in Q.
Point sample_ball(const SimpleSet& q, const Point& center, double radius, std::mt19937_64& rng) {
  const Eigen::Index d = center.size();
  Point dir(d);
  for (Eigen::Index i = 0; i < d; ++i) dir[i] = standard_normal(rng);
  const double norm = dir.norm();
  if (norm == 0.0) return center;
  const double r = radius * std::pow(uniform01(rng), 1.0 / static_cast<double>(d));
  return q.project(center + (r / norm) * dir);
}

Point sample_box(const SimpleSet& q, std::mt19937_64& rng) {
  Point x(q.dim());
  for (int i = 0; i < q.dim(); ++i) x[i] = q.lo()[i] + (q.hi()[i] - q.lo()[i]) * uniform01(rng);
  return q.project(x);
}

const ReferenceOptimum& require_reference(const ProblemInstance& inst, const char* check) {
  if (!inst.reference) {
    throw PreconditionError(std::string(check) + ": instance '" + inst.name +
                            "' has no reference optimum");
  }
  return *inst.reference;
}

std::string fmt_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

}  // namespace

const char* to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass:
      return "pass";
    case CheckStatus::Fail:
      return "fail";
    case CheckStatus::Inconclusive:
      return "inconclusive";
  }
  return "?";
}

bool DiagnosticsReport::all_passed() const {
  return std::all_of(checks.begin(), checks.end(),
                     [](const CheckResult& c) { return c.status != CheckStatus::Fail; });
}

nlohmann::json DiagnosticsReport::to_json() const {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& c : checks) {
    out.push_back({{"name", c.name},
                   {"status", to_string(c.status)},
                   {"pass", c.passed()},
                   {"slack", format_double(c.slack)},
                   {"samples", c.samples},
                   {"notes", c.notes}});
  }
  return nlohmann::json{{"checks", std::move(out)}, {"all_passed", all_passed()}};
}

std::string DiagnosticsReport::render_table() const {
  std::ostringstream os;
  char line[256];
  std::snprintf(line, sizeof line, "%-22s %-13s %-14s %-8s %s\n", "check", "status", "slack",
                "samples", "notes");
  os << line;
  for (const auto& c : checks) {
    std::snprintf(line, sizeof line, "%-22s %-13s %-14s %-8ld ", c.name.c_str(),
                  to_string(c.status), fmt_num(c.slack).c_str(), c.samples);
    os << line << c.notes << '\n';
  }
  return os.str();
}

std::vector<std::string> check_names() {
  return {"lemma2",         "exactness_by_value",   "error_bound",   "local_exactness",
          "sublevel_empty", "comparison_principle", "theorem4_limit"};
}

CheckResult check_lemma2(const RunTrace& trace) {
  if (!std::holds_alternative<Geometric>(trace.strategy)) {
    throw PreconditionError("lemma2: requires a geometric-strategy trace, got " +
                            strategy_name(trace.strategy));
  }
  if (trace.records.empty()) throw PreconditionError("lemma2: empty trace");
  CheckResult r{"lemma2", CheckStatus::Pass, kInf, static_cast<long>(trace.records.size()), ""};
  for (std::size_t k = 0; k + 1 < trace.records.size(); ++k) {
    const double gap =
        trace.records[k + 1].f_value - trace.records[k].f_value + kLemma2MonotoneTol;
    if (gap < r.slack) r.slack = gap;
    if (gap < 0.0 && r.status == CheckStatus::Pass) {
      r.status = CheckStatus::Fail;
      r.notes = "f decreased between iterates " + std::to_string(trace.records[k].n) + " and " +
                std::to_string(trace.records[k + 1].n);
    }
  }
  const double infeas_gap = trace.records.front().infeas - trace.last().infeas;
  r.slack = std::min(r.slack, infeas_gap);
  if (infeas_gap < 0.0) {
    r.status = CheckStatus::Fail;
    r.notes += (r.notes.empty() ? "" : "; ") + std::string("final infeasibility exceeds first");
  }
  if (r.status == CheckStatus::Pass && trace.records.size() == 1) r.notes = "single iterate";
  return r;
}

CheckResult check_exactness_by_value(const ProblemInstance& inst, const PenaltyParameter& tau,
                                     const SubsolverConfig& sub) {
  const ReferenceOptimum& ref = require_reference(inst, "exactness_by_value");
  const SubsolverResult res = global_minimize(inst, tau, sub);
  const double gap = std::abs(res.value - ref.f);
  CheckResult r{"exactness_by_value", gap <= kExactValueTol ? CheckStatus::Pass : CheckStatus::Fail,
                kExactValueTol - gap, res.evaluations, ""};
  r.notes = "min Phi = " + fmt_num(res.value) + ", f* = " + fmt_num(ref.f) +
            ", infeas(x) = " + fmt_num(infeasibility(inst, res.x_best));
  return r;
}

std::optional<double> distance_to_feasible(const ProblemInstance& inst, const Point& x,
                                           const SubsolverConfig& sub) {
  const double phin = infeasibility(inst, x);
  if (phin <= 1e-12) return 0.0;
  const double accept = std::max(1e-9, 1e-4 * phin);

  std::optional<double> best;
  Point start = x;
  if (inst.feasible_projection) {
    if (auto z = inst.feasible_projection(x); z && infeasibility(inst, *z) <= accept) {
      best = (x - *z).norm();
      start = *z;
    }
  }
  constexpr double rho = 1e3;
  const auto fn = [&](const Point& z) { return (z - x).norm() + rho * infeasibility(inst, z); };
  const Point z = refine_over(inst.feasible_set, fn, start, sub);
  if (infeasibility(inst, z) <= accept) {
    const double d = (x - z).norm();
    if (!best || d < *best) best = d;
  }
  return best;
}

LocalExactnessEstimate estimate_error_bound(const ProblemInstance& inst, const Point& x_star,
                                            double radius, int samples,
                                            const std::optional<PenaltyParameter>& tau1,
                                            std::uint64_t seed) {
  if (!(radius > 0.0)) throw PreconditionError("estimate_error_bound: radius must be > 0");
  if (samples < 1) throw PreconditionError("estimate_error_bound: need at least one sample");
  if (infeasibility(inst, x_star) > 1e-9) {
    throw PreconditionError("estimate_error_bound: x_star must be feasible");
  }
  const PenaltyParameter t1 = tau1 ? *tau1 : unit_parameter(inst.cone);
  require_parameter_space(inst, t1);

  SubsolverConfig local;
  local.local_iters = 100;

  std::mt19937_64 rng(seed);
  std::vector<Point> pts;
  std::vector<double> ratio1, ratio2;
  bool any_infeasible = false;
  for (int s = 0; s < samples; ++s) {
    Point x = sample_ball(inst.feasible_set, x_star, radius, rng);
    const double phin = infeasibility(inst, x);
    if (phin > 1e-12) {
      any_infeasible = true;
      const auto dist = distance_to_feasible(inst, x, local);
      if (dist && *dist > 1e-12) {
        ratio1.push_back(phin / *dist);
        ratio2.push_back(phin / (*dist * *dist));
      }
    }
    pts.push_back(std::move(x));
  }

  LocalExactnessEstimate est;
  est.x_star = x_star;
  est.radius = radius;
  est.samples = samples;

  if (!any_infeasible) {
    est.vacuous = true;
    est.eta = std::numeric_limits<double>::quiet_NaN();
    est.c_required = 0.0;
    return est;
  }
  if (ratio1.empty()) {
    throw NumericalError("estimate_error_bound: no infeasible sample could be anchored to a "
                         "feasible point");
  }

  auto spread = [](const std::vector<double>& r) {
    const auto [lo, hi] = std::minmax_element(r.begin(), r.end());
    return std::log(*hi) - std::log(*lo);
  };
  const bool quadratic = spread(ratio2) < spread(ratio1);
  est.alpha = quadratic ? 2.0 : 1.0;
  const auto& ratios = quadratic ? ratio2 : ratio1;
  est.eta = *std::min_element(ratios.begin(), ratios.end());

  double lip = 0.0;
  auto pair_ratio = [&](const Point& a, const Point& b) {
    const double dist = (a - b).norm();
    if (dist < 1e-12) return;
    const double df = std::abs(inst.objective(a) - inst.objective(b));
    lip = std::max(lip, df / std::pow(dist, est.alpha));
  };
  for (std::size_t k = 0; k < pts.size(); ++k) {
    pair_ratio(pts[k], x_star);
    if (k + 1 < pts.size()) pair_ratio(pts[k], pts[k + 1]);
  }
  est.lipschitz = lip;
  est.c_required = lip / (est.eta * p_k(t1));
  return est;
}

CheckResult check_local_exactness(const ProblemInstance& inst, const PenaltyParameter& tau_star,
                                  const Point& x_star, double radius, int samples,
                                  std::uint64_t seed) {
  require_parameter_space(inst, tau_star);
  if (infeasibility(inst, x_star) > 1e-9) {
    throw PreconditionError("local_exactness: x_star must be feasible");
  }
  const double f_star = inst.objective(x_star);
  std::mt19937_64 rng(seed);
  double worst = kInf;
  Point worst_x = x_star;
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_ball(inst.feasible_set, x_star, radius, rng);
    const double gap = eval_penalized(inst, tau_star, x) - f_star;
    if (gap < worst) {
      worst = gap;
      worst_x = x;
    }
  }
  const double slack = worst + kLocalExactTol;
  CheckResult r{"local_exactness", slack >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail, slack,
                samples, ""};
  r.notes = "p_K(tau) = " + fmt_num(p_k(tau_star)) + ", min Phi - f(x*) = " + fmt_num(worst);
  return r;
}

CheckResult check_sublevel_empty(const ProblemInstance& inst, const PenaltyParameter& tau0,
                                 const SubsolverConfig& sub) {
  const ReferenceOptimum& ref = require_reference(inst, "sublevel_empty");
  const SubsolverResult res = global_minimize(inst, tau0, sub);
  const double slack = res.value - ref.f + kSublevelTol;
  CheckResult r{"sublevel_empty", slack >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail, slack,
                res.evaluations, ""};
  r.notes = "min Phi = " + fmt_num(res.value) + " vs f* = " + fmt_num(ref.f) +
            " (Q is a compact box, so only emptiness is informative)";
  return r;
}

CheckResult check_comparison_principle(const ProblemInstance& inst, const PenaltyParameter& tau,
                                       const SubsolverConfig& sub, std::optional<double> c_star,
                                       int samples, std::uint64_t seed) {
  require_parameter_space(inst, tau);
  if (!is_strictly_positive(tau)) {
    throw PreconditionError("comparison_principle: p_K(tau) must be positive");
  }
  CheckResult r{"comparison_principle", CheckStatus::Pass, kInf, samples, ""};

  std::mt19937_64 rng(seed);
  for (int s = 0; s < samples; ++s) {
    const Point x = sample_box(inst.feasible_set, rng);
    const Sandwich b = sandwich_bounds(inst, tau, x);
    const double scale = 1e-12 * (1.0 + std::abs(b.value));
    const double gap = std::min(b.value - b.lower, b.upper - b.value) + scale;
    r.slack = std::min(r.slack, gap);
  }
  if (r.slack < 0.0) {
    r.status = CheckStatus::Fail;
    r.notes = "sandwich ordering violated";
    return r;
  }
  r.notes = "sandwich ordering holds";
  if (!inst.reference) return r;

  const double f_star = inst.reference->f;
  const double pk = p_k(tau);
  const double c = c_star.value_or(pk);
  const ProblemInstance scalar = scalarized(inst);
  auto scalar_exact = [&](double coef) {
    const PenaltyParameter t(scalar.cone, Eigen::VectorXd::Constant(1, coef));
    const SubsolverResult res = global_minimize(scalar, t, sub);
    r.samples += res.evaluations;
    return std::abs(res.value - f_star) <= kExactValueTol;
  };
  const SubsolverResult vec = global_minimize(inst, tau, sub);
  r.samples += vec.evaluations;
  const double vec_gap = std::abs(vec.value - f_star);
  const bool vector_exact = vec_gap <= kExactValueTol;
  r.slack = std::min(r.slack, kExactValueTol - vec_gap);

  if (pk >= c && scalar_exact(c)) {
    r.notes += "; Psi_" + fmt_num(c) + " exact";
    if (!vector_exact) {
      r.status = CheckStatus::Fail;
      r.notes += " but Phi_tau is not (p_K(tau) = " + fmt_num(pk) + ")";
      return r;
    }
    r.notes += " => Phi_tau exact";
  } else if (pk < c) {
    r.notes += "; p_K(tau) < c*, scalar-to-vector transfer not applicable";
  } else {
    r.notes += "; Psi_" + fmt_num(c) + " not exact, transfer vacuous";
  }
  if (vector_exact) {
    const double dn = dual_norm(tau);
    if (!scalar_exact(dn)) {
      r.status = CheckStatus::Fail;
      r.notes += "; Phi_tau exact but Psi_||tau||* = Psi_" + fmt_num(dn) + " is not";
      return r;
    }
    r.notes += "; Psi_" + fmt_num(dn) + " exact";
  }
  return r;
}

CheckResult check_theorem4_limit(const RunTrace& trace, const ProblemInstance& inst,
                                 const SubsolverConfig& sub) {
  if (!std::holds_alternative<Adaptive>(trace.strategy)) {
    throw PreconditionError("theorem4_limit: requires an adaptive-strategy trace, got " +
                            strategy_name(trace.strategy));
  }
  if (inst.cone.kind() != ConeKind::Orthant) {
    throw PreconditionError("theorem4_limit: only established for orthant cones, instance '" +
                            inst.name + "' uses " + inst.cone.describe());
  }
  if (trace.records.empty()) throw PreconditionError("theorem4_limit: empty trace");
  const ReferenceOptimum& ref = require_reference(inst, "theorem4_limit");

  CheckResult r{"theorem4_limit", CheckStatus::Inconclusive, 0.0,
                static_cast<long>(trace.records.size()), ""};
  if (trace.outcome == Outcome::MaxItersReached) {
    r.notes = "run hit max_iters: tau may be unbounded, nothing to conclude";
    return r;
  }
  const PenaltyParameter& tau_final = trace.last().tau;
  if (dual_norm(tau_final) >= kTheorem4TauCap) {
    r.notes = "||tau_final|| exceeds the boundedness cap";
    return r;
  }
  const SubsolverResult res = global_minimize(inst, 2.0 * tau_final, sub);
  r.samples += res.evaluations;
  const double gap = std::abs(res.value - ref.f);
  const double feas_slack = trace.eps_feas - trace.last().infeas;
  r.slack = std::min(kExactValueTol - gap, feas_slack);
  r.status = r.slack >= 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
  r.notes = "||tau_final|| = " + fmt_num(dual_norm(tau_final)) +
            ", |min Phi_{2 tau_final} - f*| = " + fmt_num(gap) +
            ", final infeas = " + fmt_num(trace.last().infeas);
  return r;
}

}  // namespace vpen
