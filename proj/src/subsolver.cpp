#include "vpen/subsolver.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/SVD>

#include "vpen/errors.hpp"

namespace vpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
// Number of best local results that also get the valley phase.
constexpr int kValleyStarts = 3;

// Counts evaluations and maps NaN to +inf so comparisons stay total.
class CountedFunction {
 public:
  CountedFunction(const ScalarFunction& fn, long* counter) : fn_(fn), counter_(counter) {}

  double operator()(const Point& x) const {
    ++*counter_;
    const double v = fn_(x);
    return std::isnan(v) ? kInf : v;
  }

 private:
  const ScalarFunction& fn_;
  long* counter_;
};

bool lex_less(const Point& a, const Point& b) {
  return std::lexicographical_compare(a.data(), a.data() + a.size(), b.data(), b.data() + b.size());
}

// (value, x) ordering used for every deterministic reduction.
bool better(double va, const Point& a, double vb, const Point& b) {
  if (va != vb) return va < vb;
  return lex_less(a, b);
}

double uniform01(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

std::vector<Point> latin_hypercube(const SimpleSet& q, int count, std::mt19937_64& rng) {
  const int d = q.dim();
  std::vector<Point> pts(static_cast<std::size_t>(count), Point(d));
  std::vector<int> strata(static_cast<std::size_t>(count));
  for (int j = 0; j < d; ++j) {
    for (int k = 0; k < count; ++k) strata[static_cast<std::size_t>(k)] = k;
    for (int k = count - 1; k > 0; --k) {
      const auto r = static_cast<int>(rng() % static_cast<std::uint64_t>(k + 1));
      std::swap(strata[static_cast<std::size_t>(k)], strata[static_cast<std::size_t>(r)]);
    }
    const double width = q.hi()[j] - q.lo()[j];
    for (int k = 0; k < count; ++k) {
      const double u = (strata[static_cast<std::size_t>(k)] + uniform01(rng)) / count;
      pts[static_cast<std::size_t>(k)][j] = q.lo()[j] + width * u;
    }
  }
  for (Point& p : pts) p = q.project(p);
  return pts;
}

Point grid_node(const SimpleSet& q, long index, int per_dim) {
  const int d = q.dim();
  Point x(d);
  for (int j = d - 1; j >= 0; --j) {
    const long k = index % per_dim;
    index /= per_dim;
    x[j] = q.lo()[j] + (q.hi()[j] - q.lo()[j]) * static_cast<double>(k) / (per_dim - 1);
  }
  return x;
}

Point fd_gradient(const CountedFunction& fn, const Point& x) {
  Point g(x.size());
  Point probe = x;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double h = 1e-6 * (1.0 + std::abs(x[i]));
    probe[i] = x[i] + h;
    const double fp = fn(probe);
    probe[i] = x[i] - h;
    const double fm = fn(probe);
    probe[i] = x[i];
    g[i] = (std::isfinite(fp) && std::isfinite(fm)) ? (fp - fm) / (2.0 * h) : 0.0;
  }
  return g;
}

std::vector<Point> poll_directions(int d) {
  std::vector<Point> dirs;
  for (int i = 0; i < d; ++i) {
    for (double s : {1.0, -1.0}) {
      Point e = Point::Zero(d);
      e[i] = s;
      dirs.push_back(e);
    }
  }
  const double r = 1.0 / std::sqrt(2.0);
  for (int i = 0; i < d; ++i) {
    for (int j = i + 1; j < d; ++j) {
      for (double si : {1.0, -1.0}) {
        for (double sj : {1.0, -1.0}) {
          Point e = Point::Zero(d);
          e[i] = si * r;
          e[j] = sj * r;
          dirs.push_back(e);
        }
      }
    }
  }
  return dirs;
}

// Projected steepest descent on central differences with Armijo backtracking.
void gradient_phase(const SimpleSet& q, const CountedFunction& fn, const SubsolverConfig& cfg,
                    double diameter, Point& x, double& fx) {
  double alpha = 0.0;
  for (int it = 0; it < cfg.local_iters; ++it) {
    const Point g = fd_gradient(fn, x);
    const double gnorm = g.norm();
    if (!(gnorm > 0.0) || !std::isfinite(gnorm)) return;
    alpha = alpha > 0.0 ? 2.0 * alpha : 0.1 * diameter / gnorm;

    bool accepted = false;
    while (true) {
      const Point trial = q.project(x - alpha * g);
      const double step = (trial - x).norm();
      if (step < cfg.local_tol) return;
      const double ft = fn(trial);
      if (ft <= fx - 1e-4 * g.dot(x - trial)) {
        x = trial;
        fx = ft;
        accepted = true;
        if (step < cfg.local_tol) return;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) return;
  }
}

// Opportunistic pattern search over coordinate and pairwise-diagonal
// directions; the step halves after every unsuccessful poll.
void pattern_phase(const SimpleSet& q, const CountedFunction& fn, const SubsolverConfig& cfg,
                   double diameter, Point& x, double& fx) {
  const std::vector<Point> dirs = poll_directions(q.dim());
  double h = 0.01 * diameter;
  std::size_t last = 0;
  const long max_polls = 20L * cfg.local_iters;
  for (long poll = 0; poll < max_polls && h >= cfg.local_tol; ++poll) {
    bool improved = false;
    for (std::size_t k = 0; k < dirs.size(); ++k) {
      const std::size_t idx = (last + k) % dirs.size();
      const Point trial = q.project(x + h * dirs[idx]);
      const double ft = fn(trial);
      if (ft < fx) {
        x = trial;
        fx = ft;
        last = idx;
        improved = true;
        break;
      }
    }
    if (!improved) h *= 0.5;
  }
}

// Pattern search restricted to span(basis), starting at step h.
void subspace_search(const SimpleSet& q, const CountedFunction& fn, const Eigen::MatrixXd& basis,
                     double h, double tol, long max_polls, Point& x, double& fx) {
  for (long poll = 0; poll < max_polls && h >= tol; ++poll) {
    bool improved = false;
    for (Eigen::Index j = 0; j < basis.cols() && !improved; ++j) {
      for (double s : {1.0, -1.0}) {
        const Point trial = q.project(x + s * h * basis.col(j));
        const double ft = fn(trial);
        if (ft < fx) {
          x = trial;
          fx = ft;
          improved = true;
          break;
        }
      }
    }
    h = improved ? 2.0 * h : 0.5 * h;
  }
}

/*
 * Follows a curved kink of the objective. Jumps of the gradient across x
 * give the normal space N of the kink; the search then moves along the
 * tangent space U and returns to the kink along N after every trial step,
 * so the outer search sees the objective restricted to the kink.
 */
void valley_phase(const SimpleSet& q, const CountedFunction& fn, const SubsolverConfig& cfg,
                  double diameter, Point& x, double& fx) {
  const int d = q.dim();
  if (d < 2 || d > 6) return;
  auto gradient_at = [&](const Point& y) {
    Point g(d);
    Point probe = y;
    for (int i = 0; i < d; ++i) {
      const double h = 1e-8 * (1.0 + std::abs(y[i]));
      probe[i] = y[i] + h;
      const double fp = fn(probe);
      probe[i] = y[i] - h;
      const double fm = fn(probe);
      probe[i] = y[i];
      g[i] = (fp - fm) / (2.0 * h);
    }
    return g;
  };

  for (int outer = 0; outer < cfg.local_iters; ++outer) {
    const double eps = 1e-6 * (1.0 + x.cwiseAbs().maxCoeff());
    Eigen::MatrixXd jumps = Eigen::MatrixXd::Zero(d, d);
    for (int i = 0; i < d; ++i) {
      Point a = x, b = x;
      a[i] += eps;
      b[i] -= eps;
      if ((q.project(a) - a).norm() > 0.0 || (q.project(b) - b).norm() > 0.0) continue;
      jumps.col(i) = gradient_at(a) - gradient_at(b);
    }
    if (!jumps.allFinite()) return;
    const Eigen::JacobiSVD<Eigen::MatrixXd> svd(jumps, Eigen::ComputeFullU);
    const Eigen::VectorXd& sigma = svd.singularValues();
    if (!(sigma[0] > 1e-3)) return;
    int rank = 0;
    while (rank < d && sigma[rank] > 1e-2 * sigma[0]) ++rank;
    if (rank >= d) return;
    const Eigen::MatrixXd normal = svd.matrixU().leftCols(rank);
    const Eigen::MatrixXd tangent = svd.matrixU().rightCols(d - rank);

    const double start = fx;
    double h = 1e-3 * diameter;
    long budget = 40L * cfg.local_iters;
    while (h >= cfg.local_tol && budget > 0) {
      bool improved = false;
      for (Eigen::Index j = 0; j < tangent.cols() && !improved; ++j) {
        for (double s : {1.0, -1.0}) {
          Point y = q.project(x + s * h * tangent.col(j));
          double fy = fn(y);
          subspace_search(q, fn, normal, std::max(h * h, 1e-3 * h), 1e-2 * cfg.local_tol, 100, y, fy);
          budget -= 1;
          if (fy < fx) {
            x = y;
            fx = fy;
            improved = true;
            break;
          }
        }
      }
      h = improved ? 2.0 * h : 0.5 * h;
      if (improved && fx < start - 1e-3 * diameter) break;
    }
    if (!(fx < start)) return;
  }
}

// Gradient and pattern phases, optionally followed by the valley phase.
Point descend(const SimpleSet& q, const CountedFunction& counted, const Point& x0,
              const SubsolverConfig& cfg, bool follow_valleys) {
  const double f0 = counted(x0);
  if (!std::isfinite(f0)) return x0;

  const double diameter = (q.hi() - q.lo()).norm();
  Point x = q.project(x0);
  double fx = counted(x);
  if (!(fx <= f0)) {
    x = x0;
    fx = f0;
  }
  gradient_phase(q, counted, cfg, diameter, x, fx);
  pattern_phase(q, counted, cfg, diameter, x, fx);
  if (follow_valleys) valley_phase(q, counted, cfg, diameter, x, fx);
  return fx <= f0 ? x : x0;
}

}  // namespace

void SubsolverConfig::validate() const {
  if (grid_points_per_dim && *grid_points_per_dim < 2) {
    throw PreconditionError("subsolver.grid_points_per_dim: must be >= 2");
  }
  if (multistart_count < 1) throw PreconditionError("subsolver.multistart_count: must be >= 1");
  if (local_iters < 1) throw PreconditionError("subsolver.local_iters: must be >= 1");
  if (!(local_tol > 0.0)) throw PreconditionError("subsolver.local_tol: must be > 0");
}

int SubsolverConfig::grid_points_for(int dim) const {
  if (dim > 6) return 0;
  if (grid_points_per_dim) return *grid_points_per_dim;
  return dim <= 3 ? 25 : 9;
}

Point refine_over(const SimpleSet& q, const ScalarFunction& fn, const Point& x0,
                  const SubsolverConfig& cfg, long* evaluations) {
  long local_count = 0;
  const CountedFunction counted(fn, evaluations ? evaluations : &local_count);
  return descend(q, counted, x0, cfg, true);
}

SubsolverResult minimize_over(const SimpleSet& q, const ScalarFunction& fn,
                              const SubsolverConfig& cfg) {
  cfg.validate();
  SubsolverResult result;
  const CountedFunction counted(fn, &result.evaluations);
  const int d = q.dim();

  std::vector<Point> seeds;
  const int per_dim = cfg.grid_points_for(d);
  double grid_min = kInf;
  if (per_dim > 0) {
    long total = 1;
    for (int j = 0; j < d; ++j) total *= per_dim;
    std::vector<std::pair<double, long>> scored;
    scored.reserve(static_cast<std::size_t>(total));
    for (long idx = 0; idx < total; ++idx) {
      const double v = counted(q.project(grid_node(q, idx, per_dim)));
      scored.emplace_back(v, idx);
      grid_min = std::min(grid_min, v);
    }
    const auto want = static_cast<std::size_t>((cfg.multistart_count + 1) / 2);
    const std::size_t take = std::min(scored.size(), 4 * want + 8);
    std::partial_sort(scored.begin(), scored.begin() + static_cast<long>(take), scored.end());
    for (std::size_t k = 0; k < take && seeds.size() < want; ++k) {
      if (!std::isfinite(scored[k].first)) break;
      Point p = q.project(grid_node(q, scored[k].second, per_dim));
      const bool dup = std::any_of(seeds.begin(), seeds.end(),
                                   [&](const Point& s) { return (s - p).norm() == 0.0; });
      if (!dup) seeds.push_back(std::move(p));
    }
    result.certified_on_grid = true;
  }

  std::mt19937_64 rng(cfg.rng_seed);
  const int random_count = cfg.multistart_count - static_cast<int>(seeds.size());
  if (random_count > 0) {
    for (Point& p : latin_hypercube(q, random_count, rng)) seeds.push_back(std::move(p));
  }

  std::vector<std::pair<double, Point>> finals;
  for (const Point& seed : seeds) {
    Point x = descend(q, counted, seed, cfg, false);
    const double v = counted(x);
    finals.emplace_back(v, std::move(x));
  }
  std::sort(finals.begin(), finals.end(),
            [](const auto& a, const auto& b) { return better(a.first, a.second, b.first, b.second); });
  double best_value = kInf;
  Point best_x;
  int followed = 0;
  for (auto& [v, x] : finals) {
    if (followed < kValleyStarts && std::isfinite(v)) {
      ++followed;
      x = descend(q, counted, x, cfg, true);
      v = counted(x);
    }
    if (best_x.size() == 0 || better(v, x, best_value, best_x)) {
      best_value = v;
      best_x = x;
    }
  }
  if (!std::isfinite(best_value)) {
    throw NumericalError("global_minimize: every evaluation was +inf (unbounded or infeasible model)");
  }
  if (best_value > grid_min) {
    throw NumericalError("global_minimize: result worse than the best grid node");
  }
  result.x_best = std::move(best_x);
  result.value = best_value;
  return result;
}

SubsolverResult global_minimize(const ProblemInstance& inst, const PenaltyParameter& tau,
                                const SubsolverConfig& cfg) {
  require_parameter_space(inst, tau);
  return minimize_over(
      inst.feasible_set, [&](const Point& x) { return eval_penalized(inst, tau, x); }, cfg);
}

Point local_refine(const ProblemInstance& inst, const PenaltyParameter& tau, const Point& x0,
                   const SubsolverConfig& cfg) {
  require_parameter_space(inst, tau);
  return refine_over(
      inst.feasible_set, [&](const Point& x) { return eval_penalized(inst, tau, x); }, x0, cfg);
}

}  // namespace vpen
