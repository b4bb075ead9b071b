#include "doctest.h"

#include "support.hpp"
#include "vpen/errors.hpp"
#include "vpen/simple_set.hpp"

using namespace vpen;
using testing::vec;

TEST_CASE("box projection clamps") {
  const SimpleSet q = testing::box({-1, 0}, {1, 2});
  CHECK(q.project(vec({3, -5})) == vec({1, 0}));
  CHECK(q.project(vec({0.5, 1})) == vec({0.5, 1}));
  CHECK(q.contains(vec({1, 2})));
  CHECK_FALSE(q.contains(vec({1.1, 2})));
}

TEST_CASE("malformed sets are structural errors") {
  CHECK_THROWS_AS(testing::box({0, 0}, {1, 0}), StructuralError);
  CHECK_THROWS_AS(testing::box({0}, {1, 2}), StructuralError);
  CHECK_THROWS_AS(SimpleSet(vec({0, 0}), vec({1, 1}), AffineRow{vec({1, 1}), 5.0}), StructuralError);
  CHECK_THROWS_AS(SimpleSet(vec({0, 0}), vec({1, 1}), AffineRow{vec({0, 0}), 0.0}), StructuralError);
  CHECK_THROWS_AS(SimpleSet(vec({0, 0}), vec({1, 1}), AffineRow{vec({1}), 0.0}), StructuralError);
  CHECK_THROWS_AS(testing::box({0, 0}, {1, 1}).project(vec({1, 2, 3})), StructuralError);
}

TEST_CASE("hyperplane touching a box corner leaves a single point") {
  const SimpleSet q(vec({0, 0}), vec({1, 1}), AffineRow{vec({1, 1}), 2.0});
  CHECK((q.project(vec({-3, 0.2})) - vec({1, 1})).norm() < 1e-12);
}

TEST_CASE("projection onto box and hyperplane, small example") {
  // Unclamped solution y - lambda a with lambda = (a.y - b) / |a|^2 = 0.5.
  const SimpleSet q(vec({-5, -5}), vec({5, 5}), AffineRow{vec({1, 1}), 1.0});
  CHECK((q.project(vec({1, 1})) - vec({0.5, 0.5})).norm() < 1e-14);
  // Clamping x2 at 0.2 pushes the remainder to x1.
  const SimpleSet q2(vec({-5, -5}), vec({5, 0.2}), AffineRow{vec({1, 1}), 1.0});
  CHECK((q2.project(vec({0, 3})) - vec({0.8, 0.2})).norm() < 1e-14);
}

TEST_CASE("property: slice projection matches the bisection oracle") {
  testing::Rand r(21);
  for (int s = 0; s < 1000; ++s) {
    const int d = r.integer(1, 20);
    const Eigen::VectorXd lo = r.vec(d, -3, 0);
    const Eigen::VectorXd hi = lo + r.vec(d, 0.1, 4);
    Eigen::VectorXd a = r.vec(d, -2, 2);
    for (Eigen::Index i = 0; i < d; ++i)
      if (r.uniform() < 0.2) a[i] = 0.0;
    if (a.cwiseAbs().maxCoeff() == 0.0) a[0] = 1.0;
    const double b = a.dot(r.box_point(lo, hi));
    const SimpleSet q(lo, hi, AffineRow{a, b});
    const Eigen::VectorXd y = r.vec(d, -6, 6);
    const Eigen::VectorXd p = q.project(y);
    const Eigen::VectorXd oracle = testing::slice_projection_oracle(y, lo, hi, a, b);
    CHECK((p - oracle).norm() <= 1e-8 * (1.0 + y.norm()));
    CHECK(q.contains(p, 1e-9));
    CHECK(std::abs(a.dot(p) - b) <= 1e-10 * (1.0 + std::abs(b)));
  }
}

TEST_CASE("property: projection is idempotent and satisfies the obtuse-angle condition") {
  testing::Rand r(22);
  for (int s = 0; s < 300; ++s) {
    const int d = r.integer(2, 8);
    const Eigen::VectorXd lo = r.vec(d, -2, 0);
    const Eigen::VectorXd hi = lo + r.vec(d, 0.5, 3);
    const Eigen::VectorXd a = r.vec(d, 0.1, 1.5);
    const SimpleSet q(lo, hi, AffineRow{a, a.dot(r.box_point(lo, hi))});
    const Eigen::VectorXd y = r.vec(d, -5, 5);
    const Eigen::VectorXd p = q.project(y);
    CHECK((q.project(p) - p).norm() <= 1e-10);
    for (int k = 0; k < 10; ++k) {
      const Eigen::VectorXd z = q.project(r.vec(d, -5, 5));
      CHECK((y - p).dot(z - p) <= 1e-8);
    }
  }
}
