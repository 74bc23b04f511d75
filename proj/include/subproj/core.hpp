#pragma once

#include <Eigen/Dense>

#include <compare>
#include <cstddef>
#include <functional>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

#include "subproj/error.hpp"

namespace subproj {

/// Norms at or below this are treated as zero.
inline constexpr double kNormEpsilon = 1e-14;
/// Default central-difference step.
inline constexpr double kFdStep = 1e-5;

using Matrix = Eigen::MatrixXd;

/// Dense, immutable, finite-valued vector of dimension >= 1.
class Vector {
 public:
  explicit Vector(Eigen::VectorXd values);
  Vector(std::initializer_list<double> values);
  explicit Vector(std::span<const double> values);

  static Vector zeros(std::size_t dim);
  static Vector unit(std::size_t dim, std::size_t i);

  std::size_t dim() const noexcept { return static_cast<std::size_t>(values_.size()); }
  double operator[](std::size_t i) const;
  const Eigen::VectorXd& values() const noexcept { return values_; }
  std::vector<double> to_std() const;

  double norm() const { return values_.norm(); }
  double squared_norm() const { return values_.squaredNorm(); }
  double dot(const Vector& other) const;

  friend Vector operator+(const Vector& a, const Vector& b);
  friend Vector operator-(const Vector& a, const Vector& b);
  friend Vector operator-(const Vector& a);
  friend Vector operator*(double s, const Vector& a);
  friend Vector operator*(const Vector& a, double s) { return s * a; }
  friend Vector operator/(const Vector& a, double s);
  friend Vector operator*(const Matrix& m, const Vector& a);
  friend bool operator==(const Vector& a, const Vector& b) {
    return a.values_.size() == b.values_.size() && a.values_ == b.values_;
  }

 private:
  Eigen::VectorXd values_;
};

/// (1 - t) a + t b
Vector lerp(const Vector& a, const Vector& b, double t);
double distance(const Vector& a, const Vector& b);
void require_same_dim(const Vector& a, const Vector& b, const char* where);
void require_dim(const Vector& x, std::size_t dim, const char* where);
std::string to_string(const Vector& x);

/// Element of ]-inf, +inf].
class ExtReal {
 public:
  ExtReal(double value);  // NOLINT: implicit from double is the common case

  static ExtReal infinity() noexcept { return ExtReal(Tag{}); }

  bool is_finite() const noexcept { return finite_; }
  /// Throws DomainError when the value is +inf.
  double value() const;
  /// The value as a double (+inf maps to the IEEE infinity).
  double as_double() const noexcept;

  friend bool operator==(const ExtReal& a, const ExtReal& b) noexcept {
    return a.finite_ == b.finite_ && (!a.finite_ || a.value_ == b.value_);
  }
  friend std::partial_ordering operator<=>(const ExtReal& a, const ExtReal& b) noexcept {
    return a.as_double() <=> b.as_double();
  }
  friend ExtReal operator+(const ExtReal& a, const ExtReal& b);
  friend ExtReal operator*(double s, const ExtReal& a);

 private:
  struct Tag {};
  explicit ExtReal(Tag) noexcept : value_(0.0), finite_(false) {}

  double value_;
  bool finite_;
};

std::string to_string(const ExtReal& v);

using VectorMap = std::function<Vector(const Vector&)>;

/// x / ||x||^2. Throws ZeroVector when ||x|| <= eps.
Vector inv(const Vector& x, double eps = kNormEpsilon);

/// ||x||^-2 I - 2 (Inv x)(Inv x)^T
Matrix inv_jacobian(const Vector& x, double eps = kNormEpsilon);

/// Central-difference Jacobian; column i is (g(x + h e_i) - g(x - h e_i)) / 2h.
Matrix fd_jacobian(const VectorMap& g, const Vector& x, double h = kFdStep);

/// Largest entry of |a - b| divided by max(1, largest entry of |b|).
double relative_max_error(const Matrix& a, const Matrix& b);

}  // namespace subproj
