#include "vpen/cones.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "vpen/errors.hpp"

namespace vpen {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_same_space(const ConeSpace& a, const ConeSpace& b, const char* op) {
  if (a != b) {
    throw StructuralError(std::string(op) + ": operands live in different spaces (" +
                          a.describe() + " vs " + b.describe() + ")");
  }
}

void require_dim(const ConeSpace& space, Eigen::Index n, const char* what) {
  if (n != space.dim()) {
    std::ostringstream os;
    os << what << ": expected " << space.dim() << " coordinates for " << space.describe()
       << ", got " << n;
    throw StructuralError(os.str());
  }
}

Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigensolve(const Eigen::MatrixXd& m,
                                                          bool vectors) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(
      m, vectors ? Eigen::ComputeEigenvectors : Eigen::EigenvaluesOnly);
  if (es.info() != Eigen::Success) {
    throw NumericalError("symmetric eigensolver did not converge");
  }
  return es;
}

}  // namespace

const char* to_string(ConeKind kind) {
  switch (kind) {
    case ConeKind::Orthant:
      return "orthant";
    case ConeKind::PsdMatrices:
      return "psd";
    case ConeKind::WeightedGrid:
      return "weighted_grid";
  }
  return "?";
}

ConeSpace ConeSpace::orthant(int m) {
  if (m < 1) throw StructuralError("orthant dimension must be >= 1");
  return ConeSpace(std::make_shared<const Data>(Data{ConeKind::Orthant, m, m, {}}));
}

ConeSpace ConeSpace::psd(int order) {
  if (order < 1) throw StructuralError("PSD matrix order must be >= 1");
  const int dim = order * (order + 1) / 2;
  return ConeSpace(std::make_shared<const Data>(Data{ConeKind::PsdMatrices, dim, order, {}}));
}

ConeSpace ConeSpace::weighted_grid(Eigen::VectorXd weights) {
  if (weights.size() < 1) throw StructuralError("weighted grid needs at least one node");
  for (Eigen::Index k = 0; k < weights.size(); ++k) {
    if (!(weights[k] > 0.0) || !std::isfinite(weights[k])) {
      throw StructuralError("weighted grid weights must be finite and strictly positive");
    }
  }
  const int m = static_cast<int>(weights.size());
  return ConeSpace(
      std::make_shared<const Data>(Data{ConeKind::WeightedGrid, m, m, std::move(weights)}));
}

std::string ConeSpace::describe() const {
  std::ostringstream os;
  os << to_string(kind()) << "(" << order() << ")";
  return os.str();
}

bool operator==(const ConeSpace& a, const ConeSpace& b) {
  if (a.data_ == b.data_) return true;
  return a.kind() == b.kind() && a.dim() == b.dim() && a.order() == b.order() &&
         a.weights() == b.weights();
}

Eigen::MatrixXd ConeSpace::unpack(const Eigen::VectorXd& coords) const {
  if (kind() != ConeKind::PsdMatrices) throw StructuralError("unpack: not a PSD space");
  require_dim(*this, coords.size(), "unpack");
  const int l = order();
  Eigen::MatrixXd m(l, l);
  int k = 0;
  for (int i = 0; i < l; ++i) {
    for (int j = i; j < l; ++j, ++k) {
      m(i, j) = coords[k];
      m(j, i) = coords[k];
    }
  }
  return m;
}

Eigen::VectorXd ConeSpace::pack(const Eigen::MatrixXd& matrix) const {
  if (kind() != ConeKind::PsdMatrices) throw StructuralError("pack: not a PSD space");
  const int l = order();
  if (matrix.rows() != l || matrix.cols() != l) {
    throw StructuralError("pack: matrix order does not match " + describe());
  }
  Eigen::VectorXd v(dim());
  int k = 0;
  for (int i = 0; i < l; ++i) {
    for (int j = i; j < l; ++j, ++k) v[k] = matrix(i, j);
  }
  return v;
}

ConeElement::ConeElement(ConeSpace space, Eigen::VectorXd coords)
    : ConeElement(std::move(space), std::move(coords), false) {}

ConeElement::ConeElement(ConeSpace space, Eigen::VectorXd coords, bool infinite)
    : space_(std::move(space)), coords_(std::move(coords)), infinite_(infinite) {
  if (!infinite_) require_dim(space_, coords_.size(), "ConeElement");
}

ConeElement ConeElement::zero(const ConeSpace& space) {
  return ConeElement(space, Eigen::VectorXd::Zero(space.dim()));
}

ConeElement ConeElement::infinity(const ConeSpace& space) {
  return ConeElement(space, Eigen::VectorXd(), true);
}

ConeElement ConeElement::from_matrix(const ConeSpace& space, const Eigen::MatrixXd& m) {
  return ConeElement(space, space.pack(m));
}

DualElement::DualElement(ConeSpace space, Eigen::VectorXd coords)
    : space_(std::move(space)), coords_(std::move(coords)) {
  require_dim(space_, coords_.size(), "DualElement");
}

DualElement DualElement::from_matrix(const ConeSpace& space, const Eigen::MatrixXd& m) {
  return DualElement(space, space.pack(m));
}

DualElement operator*(double alpha, const DualElement& tau) {
  return DualElement(tau.space(), alpha * tau.coords());
}

DualElement operator+(const DualElement& a, const DualElement& b) {
  require_same_space(a.space(), b.space(), "operator+");
  return DualElement(a.space(), a.coords() + b.coords());
}

DualElement unit_parameter(const ConeSpace& space) {
  if (space.kind() == ConeKind::PsdMatrices) {
    return DualElement::from_matrix(space, Eigen::MatrixXd::Identity(space.order(), space.order()));
  }
  return DualElement(space, Eigen::VectorXd::Ones(space.dim()));
}

double pairing(const DualElement& tau, const ConeElement& y) {
  require_same_space(tau.space(), y.space(), "pairing");
  if (y.is_infinite()) return kInf;
  const Eigen::VectorXd& t = tau.coords();
  const Eigen::VectorXd& v = y.coords();
  switch (tau.space().kind()) {
    case ConeKind::Orthant:
      return t.dot(v);
    case ConeKind::WeightedGrid:
      return (tau.space().weights().array() * t.array() * v.array()).sum();
    case ConeKind::PsdMatrices: {
      // trace(tau * y) over the packed upper triangle: off-diagonals count twice.
      const int l = tau.space().order();
      double s = 0.0;
      int k = 0;
      for (int i = 0; i < l; ++i) {
        for (int j = i; j < l; ++j, ++k) s += (i == j ? 1.0 : 2.0) * t[k] * v[k];
      }
      return s;
    }
  }
  return 0.0;
}

double cone_norm(const ConeElement& y) {
  if (y.is_infinite()) return kInf;
  const Eigen::VectorXd& v = y.coords();
  switch (y.space().kind()) {
    case ConeKind::Orthant:
      return v.norm();
    case ConeKind::WeightedGrid:
      return (y.space().weights().array() * v.array().abs()).sum();
    case ConeKind::PsdMatrices:
      return y.matrix().norm();
  }
  return 0.0;
}

double dual_norm(const DualElement& tau) {
  switch (tau.space().kind()) {
    case ConeKind::Orthant:
      return tau.coords().norm();
    case ConeKind::WeightedGrid:
      return tau.coords().cwiseAbs().maxCoeff();
    case ConeKind::PsdMatrices:
      return tau.matrix().norm();
  }
  return 0.0;
}

double p_k(const DualElement& tau) {
  switch (tau.space().kind()) {
    case ConeKind::Orthant:
    case ConeKind::WeightedGrid:
      return tau.coords().minCoeff();
    case ConeKind::PsdMatrices:
      return symmetric_eigenvalues(tau.matrix())[0];
  }
  return 0.0;
}

ConeElement project(const ConeSpace& space, const Eigen::VectorXd& ambient) {
  require_dim(space, ambient.size(), "project");
  if (space.kind() == ConeKind::PsdMatrices) return project(space, space.unpack(ambient));
  return ConeElement(space, ambient.cwiseMax(0.0));
}

ConeElement project(const ConeSpace& space, const Eigen::MatrixXd& ambient) {
  if (space.kind() != ConeKind::PsdMatrices) {
    throw StructuralError("project: matrix argument requires a PSD space");
  }
  if (ambient.rows() != space.order() || ambient.cols() != space.order()) {
    throw StructuralError("project: matrix order does not match " + space.describe());
  }
  const auto es = eigensolve(ambient, true);
  const Eigen::VectorXd clipped = es.eigenvalues().cwiseMax(0.0);
  const Eigen::MatrixXd& v = es.eigenvectors();
  const Eigen::MatrixXd p = v * clipped.asDiagonal() * v.transpose();
  // Symmetrize before packing so the stored triangle is exact.
  return ConeElement::from_matrix(space, 0.5 * (p + p.transpose()));
}

DualElement embed(const ConeElement& y) {
  if (y.is_infinite()) throw DomainError("embed: the improper element has no dual image");
  return DualElement(y.space(), y.coords());
}

bool dual_geq(const DualElement& tau1, const DualElement& tau2, double tol) {
  require_same_space(tau1.space(), tau2.space(), "dual_geq");
  const Eigen::VectorXd diff = tau1.coords() - tau2.coords();
  if (tau1.space().kind() == ConeKind::PsdMatrices) {
    return symmetric_eigenvalues(tau1.space().unpack(diff))[0] >= -tol;
  }
  return diff.minCoeff() >= 0.0;
}

bool in_cone(const ConeElement& y, double tol) {
  if (y.is_infinite()) return false;
  if (y.space().kind() == ConeKind::PsdMatrices) {
    return symmetric_eigenvalues(y.matrix())[0] >= -tol;
  }
  return y.coords().minCoeff() >= -tol;
}

bool is_strictly_positive(const DualElement& tau) { return p_k(tau) > 0.0; }

Eigen::VectorXd symmetric_eigenvalues(const Eigen::MatrixXd& m) {
  return eigensolve(m, false).eigenvalues();
}

}  // namespace vpen
