#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "vpen/strategies.hpp"
#include "vpen/subsolver.hpp"

namespace vpen {

enum class CheckStatus { Pass, Fail, Inconclusive };

const char* to_string(CheckStatus s);

/// Outcome of one executable property. `slack` >= 0 means the property held with that margin.
struct CheckResult {
  std::string name;
  CheckStatus status = CheckStatus::Fail;
  double slack = 0.0;
  long samples = 0;
  std::string notes;

  bool passed() const { return status == CheckStatus::Pass; }
};

struct DiagnosticsReport {
  std::vector<CheckResult> checks;

  /// True when every check that is not inconclusive passed.
  bool all_passed() const;
  nlohmann::json to_json() const;
  /// Fixed-width pass/fail table.
  std::string render_table() const;
};

/// Sampled estimate of the local error bound ||phi(x)|| >= eta dist(x, M & Q)^alpha.
struct LocalExactnessEstimate {
  Point x_star;
  double radius = 0.0;
  double eta = 0.0;
  double alpha = 1.0;
  double lipschitz = 0.0;
  /// L / (eta p_K(tau1)): multiples of tau1 at least this large are locally exact.
  double c_required = 0.0;
  long samples = 0;
  /// Every sample was feasible: the bound holds trivially and eta is undefined.
  bool vacuous = false;
};

/// Tolerances pinned by the checks.
inline constexpr double kLemma2MonotoneTol = 1e-6;
inline constexpr double kExactValueTol = 1e-3;
inline constexpr double kLocalExactTol = 1e-8;
inline constexpr double kSublevelTol = 1e-6;
inline constexpr double kTheorem4TauCap = 1e8;

/// f(x_n) nondecreasing within 1e-6 and final infeasibility <= first. Geometric traces only.
CheckResult check_lemma2(const RunTrace& trace);

/// |min_Q Phi_tau - f*| <= 1e-3. Requires a reference optimum.
CheckResult check_exactness_by_value(const ProblemInstance& inst, const PenaltyParameter& tau,
                                     const SubsolverConfig& sub);

/**
 * Distance from x to M & Q: zero on feasible points, otherwise the nearest
 * feasible point found from the instance's closed-form projection (if any)
 * and a projected local search on ||z - x|| + rho ||phi(z)||. Returns nullopt
 * when no feasible point could be located.
 */
std::optional<double> distance_to_feasible(const ProblemInstance& inst, const Point& x,
                                           const SubsolverConfig& sub);

/**
 * Samples `samples` points of the ball B(x_star, radius) & Q, fits the lower
 * envelope ||phi|| >= eta dist^alpha with alpha in {1, 2} (the exponent whose
 * log-ratio spread is smallest wins), estimates the Hölder constant of f for
 * that exponent from sampled pairs, and reports c_required = L / (eta p_K(tau1)).
 * tau1 defaults to the unit parameter. Throws NumericalError when no sample
 * could be anchored to a feasible point.
 */
LocalExactnessEstimate estimate_error_bound(const ProblemInstance& inst, const Point& x_star,
                                            double radius, int samples,
                                            const std::optional<PenaltyParameter>& tau1 = std::nullopt,
                                            std::uint64_t seed = 7);

/// Phi_tau(x) >= f(x_star) - 1e-8 on sampled points of B(x_star, radius) & Q.
CheckResult check_local_exactness(const ProblemInstance& inst, const PenaltyParameter& tau_star,
                                  const Point& x_star, double radius, int samples,
                                  std::uint64_t seed = 11);

/// {x in Q : Phi_tau0(x) < f*} is empty, i.e. min_Q Phi_tau0 >= f* - 1e-6.
CheckResult check_sublevel_empty(const ProblemInstance& inst, const PenaltyParameter& tau0,
                                 const SubsolverConfig& sub);

/**
 * (a) Psi_{p_K(tau)} <= Phi_tau <= Psi_{||tau||_*} on sampled points of Q;
 * (b) if Psi_{c*} is exact by value then so is Phi_tau (p_K(tau) >= c*), and
 *     if Phi_tau is exact then so is Psi_{||tau||_*}. c* defaults to p_K(tau).
 * Part (b) runs only when the instance has a reference optimum.
 */
CheckResult check_comparison_principle(const ProblemInstance& inst, const PenaltyParameter& tau,
                                       const SubsolverConfig& sub,
                                       std::optional<double> c_star = std::nullopt,
                                       int samples = 1000, std::uint64_t seed = 13);

/**
 * For an Adaptive trace on an orthant instance: inconclusive when the run hit
 * max_iters or tau grew past kTheorem4TauCap; otherwise pass iff the final
 * infeasibility is below eps_feas and 2 tau_final is exact by value.
 */
CheckResult check_theorem4_limit(const RunTrace& trace, const ProblemInstance& inst,
                                 const SubsolverConfig& sub);

/// Names accepted by the diagnose command, in listing order.
std::vector<std::string> check_names();

}  // namespace vpen
