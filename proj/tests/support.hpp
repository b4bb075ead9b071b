// Test-only oracles and generators. Nothing here calls into the library's
// numerical kernels, so agreement with the library is meaningful.
#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "vpen/cones.hpp"
#include "vpen/penalty.hpp"

namespace testing {

struct Rand {
  explicit Rand(std::uint64_t seed) : gen(seed) {}

  double uniform(double a = 0.0, double b = 1.0) {
    return std::uniform_real_distribution<double>(a, b)(gen);
  }
  int integer(int a, int b) { return std::uniform_int_distribution<int>(a, b)(gen); }

  Eigen::VectorXd vec(Eigen::Index n, double a, double b) {
    Eigen::VectorXd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = uniform(a, b);
    return v;
  }

  Eigen::VectorXd box_point(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi) {
    Eigen::VectorXd v(lo.size());
    for (Eigen::Index i = 0; i < lo.size(); ++i) v[i] = uniform(lo[i], hi[i]);
    return v;
  }

  Eigen::MatrixXd symmetric(Eigen::Index n, double scale = 1.0) {
    Eigen::MatrixXd a(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) a(i, j) = uniform(-scale, scale);
    return 0.5 * (a + a.transpose());
  }

  Eigen::MatrixXd positive_definite(Eigen::Index n, double floor = 0.05) {
    Eigen::MatrixXd b(n, n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) b(i, j) = uniform(-1.0, 1.0);
    return b * b.transpose() + floor * Eigen::MatrixXd::Identity(n, n);
  }

  std::mt19937_64 gen;
};

/// Cyclic Jacobi rotations. Returns ascending eigenvalues and matching eigenvectors (columns).
inline std::pair<Eigen::VectorXd, Eigen::MatrixXd> jacobi_eigen(Eigen::MatrixXd a) {
  const Eigen::Index n = a.rows();
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (Eigen::Index p = 0; p < n; ++p)
      for (Eigen::Index q = p + 1; q < n; ++q) off += a(p, q) * a(p, q);
    if (off < 1e-30) break;
    for (Eigen::Index p = 0; p < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        if (std::abs(a(p, q)) < 1e-300) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
        const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;
        for (Eigen::Index k = 0; k < n; ++k) {
          const double akp = a(k, p), akq = a(k, q);
          a(k, p) = c * akp - s * akq;
          a(k, q) = s * akp + c * akq;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double apk = a(p, k), aqk = a(q, k);
          a(p, k) = c * apk - s * aqk;
          a(q, k) = s * apk + c * aqk;
        }
        for (Eigen::Index k = 0; k < n; ++k) {
          const double vkp = v(k, p), vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
    }
  }
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) order[static_cast<std::size_t>(i)] = i;
  std::sort(order.begin(), order.end(), [&](auto i, auto j) { return a(i, i) < a(j, j); });
  Eigen::VectorXd values(n);
  Eigen::MatrixXd vectors(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    values[k] = a(order[static_cast<std::size_t>(k)], order[static_cast<std::size_t>(k)]);
    vectors.col(k) = v.col(order[static_cast<std::size_t>(k)]);
  }
  return {values, vectors};
}

inline Eigen::MatrixXd psd_projection_oracle(const Eigen::MatrixXd& a) {
  auto [values, vectors] = jacobi_eigen(a);
  const Eigen::VectorXd clipped = values.cwiseMax(0.0);
  return vectors * clipped.asDiagonal() * vectors.transpose();
}

struct GridMin {
  double value = std::numeric_limits<double>::infinity();
  Eigen::VectorXd x;
};

/// Brute force over a tensor grid with `n` points per axis on [lo, hi].
inline GridMin grid_min(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int n,
                        const std::function<double(const Eigen::VectorXd&)>& fn) {
  const Eigen::Index d = lo.size();
  std::vector<int> idx(static_cast<std::size_t>(d), 0);
  GridMin best;
  Eigen::VectorXd x(d);
  while (true) {
    for (Eigen::Index i = 0; i < d; ++i) {
      x[i] = lo[i] + (hi[i] - lo[i]) * idx[static_cast<std::size_t>(i)] / (n - 1);
    }
    const double v = fn(x);
    if (v < best.value) {
      best.value = v;
      best.x = x;
    }
    Eigen::Index k = 0;
    while (k < d && ++idx[static_cast<std::size_t>(k)] == n) idx[static_cast<std::size_t>(k++)] = 0;
    if (k == d) break;
  }
  return best;
}

/**
 * Brute-force grid of `n` points per axis, then `levels` re-gridded passes
 * of 81 points per axis over a window of +-`zoom` spacings around the
 * incumbent (clipped to the box). Each pass halves the spacing.
 */
inline GridMin zoomed_grid_min(const Eigen::VectorXd& lo, const Eigen::VectorXd& hi, int n,
                               const std::function<double(const Eigen::VectorXd&)>& fn,
                               int levels = 14, double zoom = 20.0) {
  GridMin best = grid_min(lo, hi, n, fn);
  Eigen::VectorXd h = (hi - lo) / (n - 1);
  for (int level = 0; level < levels; ++level) {
    const Eigen::VectorXd a = (best.x - zoom * h).cwiseMax(lo);
    const Eigen::VectorXd b = (best.x + zoom * h).cwiseMin(hi);
    const GridMin g = grid_min(a, b, 81, fn);
    if (g.value < best.value) best = g;
    h = (b - a) / 80.0;
  }
  return best;
}

/// Projection onto {lo <= x <= hi, a.x = b} by bisection on the multiplier.
inline Eigen::VectorXd slice_projection_oracle(const Eigen::VectorXd& y, const Eigen::VectorXd& lo,
                                               const Eigen::VectorXd& hi, const Eigen::VectorXd& a,
                                               double b) {
  auto x_of = [&](double lambda) { return (y - lambda * a).cwiseMax(lo).cwiseMin(hi).eval(); };
  double l = -1.0, r = 1.0;
  while (a.dot(x_of(l)) < b) l *= 2.0;
  while (a.dot(x_of(r)) > b) r *= 2.0;
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (l + r);
    if (a.dot(x_of(m)) > b) {
      l = m;
    } else {
      r = m;
    }
  }
  return x_of(0.5 * (l + r));
}

/// x_0 = x0, x_{k+1} = x_k + dt u_k.
inline std::vector<double> euler_states(const Eigen::VectorXd& u, double x0, double dt) {
  std::vector<double> x{x0};
  for (Eigen::Index k = 0; k < u.size(); ++k) x.push_back(x.back() + dt * u[k]);
  return x;
}

/// Hand-built instance from closures; `affine` optional.
inline vpen::ProblemInstance custom_instance(std::function<double(const vpen::Point&)> f,
                                             std::function<vpen::ConeElement(const vpen::Point&)> phi,
                                             vpen::SimpleSet q, vpen::ConeSpace cone,
                                             std::string name = "fixture") {
  vpen::ProblemInstance inst{std::move(name), "custom", std::move(f), std::move(phi), std::move(q),
                             std::move(cone), std::nullopt, std::nullopt, {}};
  return inst;
}

inline vpen::SimpleSet box(std::initializer_list<double> lo, std::initializer_list<double> hi) {
  Eigen::VectorXd l(static_cast<Eigen::Index>(lo.size())), h(static_cast<Eigen::Index>(hi.size()));
  Eigen::Index i = 0;
  for (double v : lo) l[i++] = v;
  i = 0;
  for (double v : hi) h[i++] = v;
  return vpen::SimpleSet(l, h);
}

inline Eigen::VectorXd vec(std::initializer_list<double> xs) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

}  // namespace testing
