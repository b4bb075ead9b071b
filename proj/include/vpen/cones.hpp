#pragma once

#include <memory>
#include <string>

#include <Eigen/Core>

namespace vpen {

/// Smallest eigenvalue accepted as "nonnegative" for PSD membership tests.
inline constexpr double kPsdTolerance = 1e-9;

enum class ConeKind { Orthant, PsdMatrices, WeightedGrid };

const char* to_string(ConeKind kind);

/**
 * A finite-dimensional ordered space Y together with a proper cone K.
 *
 * Orthant(m):        Y = R^m, K = R^m_+, Euclidean norm.
 * PsdMatrices(l):    Y = symmetric l x l matrices, K = PSD cone, Frobenius
 *                    norm. Coordinates are the packed upper triangle, row by
 *                    row: (0,0), (0,1), ..., (0,l-1), (1,1), ...
 * WeightedGrid(w):   Y = R^m read as samples of a function on a grid with
 *                    quadrature weights w, K = nonnegative samples, weighted
 *                    L1 norm sum_k w_k |y_k|.
 *
 * ConeSpace is an immutable handle; copies share the same description.
 */
class ConeSpace {
 public:
  static ConeSpace orthant(int m);
  static ConeSpace psd(int order);
  static ConeSpace weighted_grid(Eigen::VectorXd weights);

  ConeKind kind() const { return data_->kind; }
  /// Number of stored coordinates.
  int dim() const { return data_->dim; }
  /// Matrix order for PSD spaces, dim() otherwise.
  int order() const { return data_->order; }
  /// Quadrature weights; empty unless kind() == WeightedGrid.
  const Eigen::VectorXd& weights() const { return data_->weights; }

  std::string describe() const;

  /// Packed coordinates -> full symmetric matrix. PSD spaces only.
  Eigen::MatrixXd unpack(const Eigen::VectorXd& coords) const;
  /// Upper triangle of a square matrix -> packed coordinates. PSD spaces only.
  Eigen::VectorXd pack(const Eigen::MatrixXd& matrix) const;

  friend bool operator==(const ConeSpace& a, const ConeSpace& b);
  friend bool operator!=(const ConeSpace& a, const ConeSpace& b) { return !(a == b); }

 private:
  struct Data {
    ConeKind kind;
    int dim;
    int order;
    Eigen::VectorXd weights;
  };
  explicit ConeSpace(std::shared_ptr<const Data> data) : data_(std::move(data)) {}

  std::shared_ptr<const Data> data_;
};

/// A point of Y (normally of K), or the improper element "infinity".
class ConeElement {
 public:
  ConeElement(ConeSpace space, Eigen::VectorXd coords);

  static ConeElement zero(const ConeSpace& space);
  static ConeElement infinity(const ConeSpace& space);
  static ConeElement from_matrix(const ConeSpace& space, const Eigen::MatrixXd& m);

  const ConeSpace& space() const { return space_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  bool is_infinite() const { return infinite_; }
  /// Full symmetric matrix. PSD spaces only.
  Eigen::MatrixXd matrix() const { return space_.unpack(coords_); }

 private:
  ConeElement(ConeSpace space, Eigen::VectorXd coords, bool infinite);

  ConeSpace space_;
  Eigen::VectorXd coords_;
  bool infinite_ = false;
};

/// An element of the dual space Y*. Penalty parameters live here.
class DualElement {
 public:
  DualElement(ConeSpace space, Eigen::VectorXd coords);

  static DualElement from_matrix(const ConeSpace& space, const Eigen::MatrixXd& m);

  const ConeSpace& space() const { return space_; }
  const Eigen::VectorXd& coords() const { return coords_; }
  Eigen::MatrixXd matrix() const { return space_.unpack(coords_); }

 private:
  ConeSpace space_;
  Eigen::VectorXd coords_;
};

using PenaltyParameter = DualElement;

DualElement operator*(double alpha, const DualElement& tau);
DualElement operator+(const DualElement& a, const DualElement& b);

/// The "unit" parameter: all-ones for Orthant/WeightedGrid, identity for PSD.
DualElement unit_parameter(const ConeSpace& space);

/// <tau, y>. +inf when y is the improper element.
double pairing(const DualElement& tau, const ConeElement& y);

/// ||y|| in Y. +inf for the improper element.
double cone_norm(const ConeElement& y);

/// ||tau|| in Y*: Euclidean, Frobenius, or max_k |tau_k| for WeightedGrid.
double dual_norm(const DualElement& tau);

/**
 * Largest c with <tau, y> >= c ||y|| on K.
 *
 * min_i tau_i for the orthant and the weighted grid, lambda_min(tau) for PSD.
 * A nonpositive result means tau is not in K*_{++}.
 */
double p_k(const DualElement& tau);

/// Metric projection of an ambient vector (packed coordinates for PSD) onto K.
ConeElement project(const ConeSpace& space, const Eigen::VectorXd& ambient);
/// PSD convenience overload taking a full symmetric matrix.
ConeElement project(const ConeSpace& space, const Eigen::MatrixXd& ambient);

/// Embedding i: K -> K*. Coordinate identity for all supported cones.
DualElement embed(const ConeElement& y);

/// tau1 - tau2 in K* (componentwise, or lambda_min >= -tol for PSD).
bool dual_geq(const DualElement& tau1, const DualElement& tau2, double tol = kPsdTolerance);

/// y in K (coords >= -tol, or lambda_min >= -tol for PSD). False for infinity.
bool in_cone(const ConeElement& y, double tol = kPsdTolerance);

/// tau in K*_{++}, i.e. p_k(tau) > 0.
bool is_strictly_positive(const DualElement& tau);

/// Eigenvalues of a symmetric matrix in ascending order.
Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m);

}  // namespace vpen
