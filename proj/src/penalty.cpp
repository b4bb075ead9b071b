#include "vpen/penalty.hpp"

#include <cmath>
#include <limits>

#include "vpen/errors.hpp"

namespace vpen {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

void require_parameter_space(const ProblemInstance& inst, const PenaltyParameter& tau) {
  if (tau.space() != inst.cone) {
    throw StructuralError("penalty parameter lives in " + tau.space().describe() +
                          " but instance '" + inst.name + "' uses " + inst.cone.describe());
  }
}

double eval_penalized(const ProblemInstance& inst, const PenaltyParameter& tau, const Point& x) {
  const double f = inst.objective(x);
  if (f == kInf) return kInf;
  const ConeElement phi = inst.penalty_term(x);
  return f + pairing(tau, phi);
}

double eval_scalar_penalty(const ProblemInstance& inst, double c, const Point& x) {
  if (!(c >= 0.0)) throw PreconditionError("scalar penalty parameter must be >= 0");
  const double f = inst.objective(x);
  if (f == kInf) return kInf;
  const double norm = cone_norm(inst.penalty_term(x));
  if (norm == kInf) return kInf;
  // 0 * inf is avoided above; c = 0 leaves f untouched.
  return c == 0.0 ? f : f + c * norm;
}

double infeasibility(const ProblemInstance& inst, const Point& x) {
  return cone_norm(inst.penalty_term(x));
}

Sandwich sandwich_bounds(const ProblemInstance& inst, const PenaltyParameter& tau, const Point& x) {
  require_parameter_space(inst, tau);
  const double pk = p_k(tau);
  if (!(pk > 0.0)) throw PreconditionError("sandwich_bounds: p_K(tau) must be positive");
  const double f = inst.objective(x);
  const ConeElement phi = inst.penalty_term(x);
  if (f == kInf || phi.is_infinite()) return {kInf, kInf, kInf};
  const double norm = cone_norm(phi);
  return {f + pk * norm, f + pairing(tau, phi), f + dual_norm(tau) * norm};
}

ProblemInstance scalarized(const ProblemInstance& inst) {
  ProblemInstance out = inst;
  out.name = inst.name + "/scalar";
  out.cone = ConeSpace::orthant(1);
  out.exact_tau.reset();
  const ConeSpace space = out.cone;
  out.penalty_term = [term = inst.penalty_term, space](const Point& x) {
    const ConeElement phi = term(x);
    if (phi.is_infinite()) return ConeElement::infinity(space);
    return ConeElement(space, Eigen::VectorXd::Constant(1, cone_norm(phi)));
  };
  return out;
}

}  // namespace vpen
