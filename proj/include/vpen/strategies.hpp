#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "vpen/errors.hpp"
#include "vpen/penalty.hpp"
#include "vpen/subsolver.hpp"

namespace vpen {

/// tau <- theta * tau.
struct Geometric {
  double theta = 10.0;
};
/// tau <- tau + s_n i(phi(x_n)).
struct Adaptive {};
/// tau <- tau + delta tau_1 + s_n i(phi(x_n)).
struct Combined {
  double delta = 0.1;
};
/// Adaptive steps, with the delta tau_1 correction added when n is a multiple of `period`.
struct PeriodicCombined {
  double delta = 0.1;
  int period = 5;
};

using Strategy = std::variant<Geometric, Adaptive, Combined, PeriodicCombined>;

/// s_n = 1.
struct UnitScaling {};
/// s_n = gamma / ||phi(x_n)||.
struct InverseViolation {
  double gamma = 1.0;
};

using Scaling = std::variant<UnitScaling, InverseViolation>;

std::string strategy_name(const Strategy& s);
std::string scaling_name(const Scaling& s);

struct MethodConfig {
  Strategy strategy = Geometric{};
  Scaling scaling = InverseViolation{};
  PenaltyParameter tau1;
  double eps_feas = 1e-6;
  double eps_phi = 1e-8;
  int max_iters = 100;

  /// Throws PreconditionError naming the violated constraint.
  void validate() const;
};

/// Defaults with tau_1 = unit_parameter(space) and s_n = 1 / ||phi(x_n)||.
MethodConfig default_method(const ConeSpace& space, Strategy strategy = Geometric{});

struct IterateRecord {
  int n = 0;
  Point x;
  PenaltyParameter tau;
  double phi_value = 0.0;
  double f_value = 0.0;
  double infeas = 0.0;
  /// Scaling used to form tau_{n+1}; empty on the last record and for Geometric.
  std::optional<double> s_n;
  long subsolver_evals = 0;
};

enum class Outcome { ConvergedFeasible, StoppedPhiEqual, MaxItersReached };

const char* to_string(Outcome o);

struct RunTrace {
  std::vector<IterateRecord> records;
  Outcome outcome = Outcome::MaxItersReached;
  Point final_x;
  Strategy strategy = Geometric{};
  double eps_feas = 1e-6;

  const IterateRecord& last() const { return records.back(); }
  long total_evaluations() const;
};

/// Subsolver failure during a run; carries the iterates computed so far.
class RunError : public Error {
 public:
  RunError(const std::string& what, RunTrace partial)
      : Error(what), partial_(std::move(partial)) {}
  const RunTrace& partial() const { return partial_; }

 private:
  RunTrace partial_;
};

PenaltyParameter step_geometric(const PenaltyParameter& tau, double theta);
PenaltyParameter step_adaptive(const PenaltyParameter& tau, const ConeElement& phi, double s);
PenaltyParameter step_combined(const PenaltyParameter& tau, const PenaltyParameter& tau1,
                               const ConeElement& phi, double s, double delta);

/**
 * s_n for the given rule. InverseViolation raises DomainError when
 * ||phi|| < min_norm, since the run loop stops before that point.
 */
double compute_scaling(const Scaling& scaling, const ConeElement& phi, double min_norm = 1e-6);

RunTrace run_method(const ProblemInstance& inst, const MethodConfig& cfg,
                    const SubsolverConfig& sub);

}  // namespace vpen
