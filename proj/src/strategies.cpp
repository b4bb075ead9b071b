#include "vpen/strategies.hpp"

#include <cmath>
#include <sstream>

#include "vpen/errors.hpp"

namespace vpen {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

}  // namespace

std::string strategy_name(const Strategy& s) {
  return std::visit(Overloaded{[](const Geometric&) { return std::string("geometric"); },
                               [](const Adaptive&) { return std::string("adaptive"); },
                               [](const Combined&) { return std::string("combined"); },
                               [](const PeriodicCombined&) {
                                 return std::string("periodic_combined");
                               }},
                    s);
}

std::string scaling_name(const Scaling& s) {
  return std::holds_alternative<UnitScaling>(s) ? "unit" : "inverse_violation";
}

const char* to_string(Outcome o) {
  switch (o) {
    case Outcome::ConvergedFeasible:
      return "converged_feasible";
    case Outcome::StoppedPhiEqual:
      return "stopped_phi_equal";
    case Outcome::MaxItersReached:
      return "max_iters_reached";
  }
  return "?";
}

void MethodConfig::validate() const {
  std::visit(Overloaded{[](const Geometric& g) {
                          if (!(g.theta > 1.0)) {
                            throw PreconditionError("method.theta: require θ > 1, got " +
                                                    std::to_string(g.theta));
                          }
                        },
                        [](const Adaptive&) {},
                        [](const Combined& c) {
                          if (!(c.delta > 0.0)) {
                            throw PreconditionError("method.delta: require δ > 0");
                          }
                        },
                        [](const PeriodicCombined& c) {
                          if (!(c.delta > 0.0)) {
                            throw PreconditionError("method.delta: require δ > 0");
                          }
                          if (c.period < 1) {
                            throw PreconditionError("method.period: require ℓ >= 1");
                          }
                        }},
             strategy);
  if (const auto* iv = std::get_if<InverseViolation>(&scaling); iv && !(iv->gamma > 0.0)) {
    throw PreconditionError("method.gamma: require γ > 0");
  }
  if (!(eps_feas > 0.0)) throw PreconditionError("method.eps_feas: must be > 0");
  if (!(eps_phi > 0.0)) throw PreconditionError("method.eps_phi: must be > 0");
  if (max_iters < 1) throw PreconditionError("method.max_iters: must be >= 1");
  if (!is_strictly_positive(tau1)) {
    throw PreconditionError("method.tau1: require p_K(τ1) > 0");
  }
}

MethodConfig default_method(const ConeSpace& space, Strategy strategy) {
  return MethodConfig{std::move(strategy), InverseViolation{}, unit_parameter(space)};
}

long RunTrace::total_evaluations() const {
  long total = 0;
  for (const auto& r : records) total += r.subsolver_evals;
  return total;
}

PenaltyParameter step_geometric(const PenaltyParameter& tau, double theta) {
  if (!(theta > 1.0)) throw PreconditionError("step_geometric: require θ > 1");
  return theta * tau;
}

PenaltyParameter step_adaptive(const PenaltyParameter& tau, const ConeElement& phi, double s) {
  if (!(s > 0.0)) throw PreconditionError("step_adaptive: require s_n > 0");
  return tau + s * embed(phi);
}

PenaltyParameter step_combined(const PenaltyParameter& tau, const PenaltyParameter& tau1,
                               const ConeElement& phi, double s, double delta) {
  if (!(delta > 0.0)) throw PreconditionError("step_combined: require δ > 0");
  if (!(s > 0.0)) throw PreconditionError("step_combined: require s_n > 0");
  return tau + delta * tau1 + s * embed(phi);
}

double compute_scaling(const Scaling& scaling, const ConeElement& phi, double min_norm) {
  if (std::holds_alternative<UnitScaling>(scaling)) return 1.0;
  const double norm = cone_norm(phi);
  if (!(norm >= min_norm) || !std::isfinite(norm)) {
    std::ostringstream os;
    os << "compute_scaling: ||phi|| = " << norm
       << " is below the feasibility tolerance; the run should have stopped";
    throw DomainError(os.str());
  }
  return std::get<InverseViolation>(scaling).gamma / norm;
}

RunTrace run_method(const ProblemInstance& inst, const MethodConfig& cfg,
                    const SubsolverConfig& sub) {
  cfg.validate();
  sub.validate();
  require_parameter_space(inst, cfg.tau1);

  RunTrace trace;
  trace.strategy = cfg.strategy;
  trace.eps_feas = cfg.eps_feas;
  PenaltyParameter tau = cfg.tau1;

  for (int n = 1;; ++n) {
    SubsolverResult res;
    try {
      res = global_minimize(inst, tau, sub);
    } catch (const Error& e) {
      if (!trace.records.empty()) trace.final_x = trace.last().x;
      throw RunError(std::string("iteration ") + std::to_string(n) + ": " + e.what(),
                     std::move(trace));
    }
    const ConeElement phi = inst.penalty_term(res.x_best);
    IterateRecord rec{n,
                      res.x_best,
                      tau,
                      res.value,
                      inst.objective(res.x_best),
                      cone_norm(phi),
                      std::nullopt,
                      res.evaluations};
    trace.final_x = rec.x;

    if (rec.infeas <= cfg.eps_feas) {
      trace.outcome = Outcome::ConvergedFeasible;
      trace.records.push_back(std::move(rec));
      break;
    }
    if (std::holds_alternative<Geometric>(cfg.strategy) && n >= 2) {
      const double prev = trace.last().phi_value;
      if (std::abs(rec.phi_value - prev) <= cfg.eps_phi * (1.0 + std::abs(rec.phi_value))) {
        trace.outcome = Outcome::StoppedPhiEqual;
        trace.records.push_back(std::move(rec));
        break;
      }
    }
    if (n >= cfg.max_iters) {
      trace.outcome = Outcome::MaxItersReached;
      trace.records.push_back(std::move(rec));
      break;
    }

    PenaltyParameter next = std::visit(
        Overloaded{[&](const Geometric& g) { return step_geometric(tau, g.theta); },
                   [&](const Adaptive&) {
                     rec.s_n = compute_scaling(cfg.scaling, phi, cfg.eps_feas);
                     return step_adaptive(tau, phi, *rec.s_n);
                   },
                   [&](const Combined& c) {
                     rec.s_n = compute_scaling(cfg.scaling, phi, cfg.eps_feas);
                     return step_combined(tau, cfg.tau1, phi, *rec.s_n, c.delta);
                   },
                   [&](const PeriodicCombined& c) {
                     rec.s_n = compute_scaling(cfg.scaling, phi, cfg.eps_feas);
                     if (n % c.period == 0) {
                       return step_combined(tau, cfg.tau1, phi, *rec.s_n, c.delta);
                     }
                     return step_adaptive(tau, phi, *rec.s_n);
                   }},
        cfg.strategy);
    trace.records.push_back(std::move(rec));
    tau = std::move(next);
  }
  return trace;
}

}  // namespace vpen
