#include "subproj/core.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace subproj {

namespace {

Eigen::VectorXd checked(Eigen::VectorXd v) {
  if (v.size() < 1) fail(ErrorKind::InvalidArgument, "vector dimension must be >= 1");
  if (!v.allFinite()) fail(ErrorKind::NonFiniteValue, "vector has a non-finite component");
  return v;
}

Eigen::VectorXd from_span(std::span<const double> values) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(values.size()));
  for (std::size_t i = 0; i < values.size(); ++i) v[static_cast<Eigen::Index>(i)] = values[i];
  return v;
}

}  // namespace

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::ZeroVector: return "ZeroVector";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::EmptySubdifferential: return "EmptySubdifferential";
    case ErrorKind::NotTwiceDifferentiable: return "NotTwiceDifferentiable";
    case ErrorKind::NotDifferentiableHere: return "NotDifferentiableHere";
    case ErrorKind::NegativeBaseError: return "NegativeBaseError";
    case ErrorKind::NonMonotonePhi: return "NonMonotonePhi";
    case ErrorKind::NotScaledOrthogonal: return "NotScaledOrthogonal";
    case ErrorKind::InconsistentMinimizer: return "InconsistentMinimizer";
    case ErrorKind::JointSelectionUnavailable: return "JointSelectionUnavailable";
    case ErrorKind::UnsupportedAtom: return "UnsupportedAtom";
    case ErrorKind::ZeroSubgradient: return "ZeroSubgradient";
    case ErrorKind::RelaxationOutOfRange: return "RelaxationOutOfRange";
    case ErrorKind::InfeasibleWitness: return "InfeasibleWitness";
    case ErrorKind::DegenerateMoreau: return "DegenerateMoreau";
    case ErrorKind::NotPositiveHere: return "NotPositiveHere";
    case ErrorKind::ZeroFunctionValue: return "ZeroFunctionValue";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::NoLevelSetOracle: return "NoLevelSetOracle";
    case ErrorKind::InvalidControl: return "InvalidControl";
    case ErrorKind::StalledStep: return "StalledStep";
    case ErrorKind::SchemaError: return "SchemaError";
    case ErrorKind::NotSerializable: return "NotSerializable";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail), kind_(kind) {}

void fail(ErrorKind kind, const std::string& detail) { throw Error(kind, detail); }

Vector::Vector(Eigen::VectorXd values) : values_(checked(std::move(values))) {}

Vector::Vector(std::initializer_list<double> values)
    : values_(checked(from_span(std::span<const double>(values.begin(), values.size())))) {}

Vector::Vector(std::span<const double> values) : values_(checked(from_span(values))) {}

Vector Vector::zeros(std::size_t dim) {
  return Vector(Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim)));
}

Vector Vector::unit(std::size_t dim, std::size_t i) {
  if (i >= dim) fail(ErrorKind::InvalidArgument, "unit vector index out of range");
  Eigen::VectorXd v = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(dim));
  v[static_cast<Eigen::Index>(i)] = 1.0;
  return Vector(std::move(v));
}

double Vector::operator[](std::size_t i) const {
  if (i >= dim()) fail(ErrorKind::InvalidArgument, "vector index out of range");
  return values_[static_cast<Eigen::Index>(i)];
}

std::vector<double> Vector::to_std() const {
  return std::vector<double>(values_.data(), values_.data() + values_.size());
}

double Vector::dot(const Vector& other) const {
  require_same_dim(*this, other, "dot");
  return values_.dot(other.values_);
}

Vector operator+(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "operator+");
  return Vector(a.values_ + b.values_);
}

Vector operator-(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "operator-");
  return Vector(a.values_ - b.values_);
}

Vector operator-(const Vector& a) { return Vector(-a.values_); }

Vector operator*(double s, const Vector& a) { return Vector(s * a.values_); }

Vector operator/(const Vector& a, double s) { return Vector(a.values_ / s); }

Vector operator*(const Matrix& m, const Vector& a) {
  if (m.cols() != a.values_.size()) {
    fail(ErrorKind::DimensionMismatch, "matrix columns do not match vector dimension");
  }
  return Vector(Eigen::VectorXd(m * a.values_));
}

Vector lerp(const Vector& a, const Vector& b, double t) {
  require_same_dim(a, b, "lerp");
  return Vector((1.0 - t) * a.values() + t * b.values());
}

double distance(const Vector& a, const Vector& b) {
  require_same_dim(a, b, "distance");
  return (a.values() - b.values()).norm();
}

void require_same_dim(const Vector& a, const Vector& b, const char* where) {
  if (a.dim() != b.dim()) {
    fail(ErrorKind::DimensionMismatch, std::string(where) + ": " + std::to_string(a.dim()) +
                                           " vs " + std::to_string(b.dim()));
  }
}

void require_dim(const Vector& x, std::size_t dim, const char* where) {
  if (x.dim() != dim) {
    fail(ErrorKind::DimensionMismatch, std::string(where) + ": expected dimension " +
                                           std::to_string(dim) + ", got " +
                                           std::to_string(x.dim()));
  }
}

std::string to_string(const Vector& x) {
  std::ostringstream os;
  os.precision(17);
  os << '(';
  for (std::size_t i = 0; i < x.dim(); ++i) os << (i ? ", " : "") << x[i];
  os << ')';
  return os.str();
}

ExtReal::ExtReal(double value) : value_(value), finite_(std::isfinite(value)) {
  if (std::isnan(value) || value == -std::numeric_limits<double>::infinity()) {
    fail(ErrorKind::NonFiniteValue, "extended real must be finite or +inf");
  }
  if (!finite_) value_ = 0.0;
}

double ExtReal::value() const {
  if (!finite_) fail(ErrorKind::DomainError, "value is +inf");
  return value_;
}

double ExtReal::as_double() const noexcept {
  return finite_ ? value_ : std::numeric_limits<double>::infinity();
}

ExtReal operator+(const ExtReal& a, const ExtReal& b) {
  if (!a.finite_ || !b.finite_) return ExtReal::infinity();
  return ExtReal(a.value_ + b.value_);
}

ExtReal operator*(double s, const ExtReal& a) {
  if (!(s > 0.0)) fail(ErrorKind::InvalidArgument, "extended reals scale by positive factors only");
  if (!a.finite_) return ExtReal::infinity();
  return ExtReal(s * a.value_);
}

std::string to_string(const ExtReal& v) {
  if (!v.is_finite()) return "+inf";
  std::ostringstream os;
  os.precision(17);
  os << v.value();
  return os.str();
}

Vector inv(const Vector& x, double eps) {
  const double n2 = x.squared_norm();
  if (std::sqrt(n2) <= eps) fail(ErrorKind::ZeroVector, "Inv is undefined at 0");
  return x / n2;
}

Matrix inv_jacobian(const Vector& x, double eps) {
  const Vector ix = inv(x, eps);
  const auto n = static_cast<Eigen::Index>(x.dim());
  return Matrix::Identity(n, n) / x.squared_norm() -
         2.0 * ix.values() * ix.values().transpose();
}

Matrix fd_jacobian(const VectorMap& g, const Vector& x, double h) {
  if (!(h > 0.0)) fail(ErrorKind::InvalidArgument, "finite-difference step must be positive");
  const std::size_t n = x.dim();
  Matrix jac;
  for (std::size_t i = 0; i < n; ++i) {
    const Vector e = h * Vector::unit(n, i);
    const Vector col = (g(x + e) - g(x - e)) / (2.0 * h);
    if (i == 0) jac = Matrix::Zero(static_cast<Eigen::Index>(col.dim()), static_cast<Eigen::Index>(n));
    jac.col(static_cast<Eigen::Index>(i)) = col.values();
  }
  return jac;
}

double relative_max_error(const Matrix& a, const Matrix& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    fail(ErrorKind::DimensionMismatch, "matrix shapes differ");
  }
  const double scale = std::max(1.0, b.cwiseAbs().maxCoeff());
  return (a - b).cwiseAbs().maxCoeff() / scale;
}

}  // namespace subproj
