#include "vpen/simple_set.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "vpen/errors.hpp"

namespace vpen {

SimpleSet::SimpleSet(Eigen::VectorXd lo, Eigen::VectorXd hi, std::optional<AffineRow> affine)
    : lo_(std::move(lo)), hi_(std::move(hi)), affine_(std::move(affine)) {
  if (lo_.size() < 1 || lo_.size() != hi_.size()) {
    throw StructuralError("SimpleSet: box bounds must be nonempty and of equal length");
  }
  for (Eigen::Index i = 0; i < lo_.size(); ++i) {
    if (!(lo_[i] < hi_[i]) || !std::isfinite(lo_[i]) || !std::isfinite(hi_[i])) {
      throw StructuralError("SimpleSet: require finite lo < hi in every coordinate");
    }
  }
  if (affine_) {
    const Eigen::VectorXd& a = affine_->a;
    if (a.size() != lo_.size()) throw StructuralError("SimpleSet: affine row has wrong length");
    if (a.cwiseAbs().maxCoeff() == 0.0) throw StructuralError("SimpleSet: affine row is zero");
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      slice_max_ += a[i] > 0 ? a[i] * hi_[i] : a[i] * lo_[i];
      slice_min_ += a[i] > 0 ? a[i] * lo_[i] : a[i] * hi_[i];
    }
    const double slack = 1e-12 * (1.0 + std::abs(affine_->b));
    if (affine_->b < slice_min_ - slack || affine_->b > slice_max_ + slack) {
      throw StructuralError("SimpleSet: the hyperplane misses the box, Q is empty");
    }
  }
}

Eigen::VectorXd SimpleSet::project(const Eigen::VectorXd& y) const {
  if (y.size() != lo_.size()) throw StructuralError("SimpleSet::project: dimension mismatch");
  if (!affine_) return y.cwiseMax(lo_).cwiseMin(hi_);
  return project_onto_slice(y);
}

// x(lambda) = clamp(y - lambda a) and h(lambda) = a . x(lambda) is piecewise
// linear and nonincreasing. Locate the piece containing h = b, then solve on
// that piece's free set.
Eigen::VectorXd SimpleSet::project_onto_slice(const Eigen::VectorXd& y) const {
  const Eigen::VectorXd& a = affine_->a;
  const double b = affine_->b;
  const Eigen::Index d = y.size();

  auto x_at = [&](double lambda) { return (y - lambda * a).cwiseMax(lo_).cwiseMin(hi_); };
  auto h_at = [&](double lambda) { return a.dot(x_at(lambda)); };

  std::vector<double> breaks;
  breaks.reserve(2 * static_cast<std::size_t>(d));
  for (Eigen::Index i = 0; i < d; ++i) {
    if (a[i] == 0.0) continue;
    breaks.push_back((y[i] - lo_[i]) / a[i]);
    breaks.push_back((y[i] - hi_[i]) / a[i]);
  }
  std::sort(breaks.begin(), breaks.end());

  if (b >= h_at(breaks.front())) return x_at(breaks.front());
  if (b <= h_at(breaks.back())) return x_at(breaks.back());

  double left = breaks.front();
  for (std::size_t k = 1; k < breaks.size(); ++k) {
    const double right = breaks[k];
    if (h_at(right) > b) {
      left = right;
      continue;
    }
    const double mid = 0.5 * (left + right);
    const Eigen::VectorXd xm = x_at(mid);
    double num = -b;
    double den = 0.0;
    for (Eigen::Index i = 0; i < d; ++i) {
      const double free_value = y[i] - mid * a[i];
      if (a[i] != 0.0 && free_value > lo_[i] && free_value < hi_[i]) {
        num += a[i] * y[i];
        den += a[i] * a[i];
      } else {
        num += a[i] * xm[i];
      }
    }
    const double lambda = den > 0.0 ? num / den : mid;
    return x_at(std::clamp(lambda, left, right));
  }
  return x_at(breaks.back());
}

bool SimpleSet::contains(const Eigen::VectorXd& x, double tol) const {
  if (x.size() != lo_.size()) return false;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x[i] < lo_[i] - tol || x[i] > hi_[i] + tol) return false;
  }
  if (affine_) {
    const double scale = 1.0 + std::abs(affine_->b) + affine_->a.cwiseAbs().dot(x.cwiseAbs());
    if (std::abs(affine_->a.dot(x) - affine_->b) > tol * scale) return false;
  }
  return true;
}

}  // namespace vpen
