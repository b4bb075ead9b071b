#pragma once

#include <cstdint>
#include <functional>
#include <optional>

#include "vpen/penalty.hpp"

namespace vpen {

/**
 * Budget and seeding for the desk-scale global minimizer.
 *
 * The grid scan is used up to six dimensions. Without an explicit
 * grid_points_per_dim the scan uses 25 points per axis for d <= 3 and 9 for
 * d <= 6.
 */
struct SubsolverConfig {
  std::optional<int> grid_points_per_dim;
  int multistart_count = 20;
  int local_iters = 200;
  double local_tol = 1e-8;
  std::uint64_t rng_seed = 20240601;

  /// Throws PreconditionError naming the offending field.
  void validate() const;
  /// Points per axis for a problem of dimension `dim`; 0 disables the scan.
  int grid_points_for(int dim) const;
};

struct SubsolverResult {
  Point x_best;
  double value = 0.0;
  long evaluations = 0;
  /// True when the full grid scan over Q was part of the search.
  bool certified_on_grid = false;
};

using ScalarFunction = std::function<double(const Point&)>;

/// Minimize Phi_tau over Q: grid scan plus multistart projected local descent.
SubsolverResult global_minimize(const ProblemInstance& inst, const PenaltyParameter& tau,
                                const SubsolverConfig& cfg);

/// Local descent on Phi_tau from x0 in Q. Never returns a worse point.
Point local_refine(const ProblemInstance& inst, const PenaltyParameter& tau, const Point& x0,
                   const SubsolverConfig& cfg);

/// The same machinery for an arbitrary function over a SimpleSet.
SubsolverResult minimize_over(const SimpleSet& q, const ScalarFunction& fn,
                              const SubsolverConfig& cfg);

/// Local descent for an arbitrary function. `evaluations` is incremented per call to fn.
Point refine_over(const SimpleSet& q, const ScalarFunction& fn, const Point& x0,
                  const SubsolverConfig& cfg, long* evaluations = nullptr);

}  // namespace vpen
