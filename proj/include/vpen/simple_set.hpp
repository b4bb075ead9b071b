#pragma once

#include <optional>

#include <Eigen/Core>

namespace vpen {

/// One affine equation a . x = b.
struct AffineRow {
  Eigen::VectorXd a;
  double b = 0.0;
};

/**
 * The simple feasible set Q: a box [lo, hi], optionally intersected with a
 * single hyperplane. Euclidean projection onto Q is exact.
 */
class SimpleSet {
 public:
  SimpleSet(Eigen::VectorXd lo, Eigen::VectorXd hi, std::optional<AffineRow> affine = std::nullopt);

  int dim() const { return static_cast<int>(lo_.size()); }
  const Eigen::VectorXd& lo() const { return lo_; }
  const Eigen::VectorXd& hi() const { return hi_; }
  const std::optional<AffineRow>& affine() const { return affine_; }

  /// Euclidean projection onto Q.
  Eigen::VectorXd project(const Eigen::VectorXd& y) const;

  bool contains(const Eigen::VectorXd& x, double tol = 1e-12) const;

 private:
  Eigen::VectorXd project_onto_slice(const Eigen::VectorXd& y) const;

  Eigen::VectorXd lo_;
  Eigen::VectorXd hi_;
  std::optional<AffineRow> affine_;
  double slice_min_ = 0.0;  // range of a . x over the box
  double slice_max_ = 0.0;
};

}  // namespace vpen
