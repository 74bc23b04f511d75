#pragma once

#include <variant>

#include "subproj/core.hpp"

namespace subproj {

struct Ball {
  Vector center;
  double radius;
  friend bool operator==(const Ball&, const Ball&) = default;
};

/// {x : <x, normal> <= offset}
struct Halfspace {
  Vector normal;
  double offset;
  friend bool operator==(const Halfspace&, const Halfspace&) = default;
};

struct Box {
  Vector lo;
  Vector hi;
  friend bool operator==(const Box&, const Box&) = default;
};

struct Point {
  Vector c;
  friend bool operator==(const Point&, const Point&) = default;
};

/// Nonempty closed convex set with an exact metric projection.
class SetSpec {
 public:
  using Variant = std::variant<Ball, Halfspace, Box, Point>;

  static SetSpec ball(Vector center, double radius);
  static SetSpec halfspace(Vector normal, double offset);
  static SetSpec box(Vector lo, Vector hi);
  static SetSpec point(Vector c);

  std::size_t dim() const;
  const Variant& shape() const noexcept { return shape_; }

  friend bool operator==(const SetSpec&, const SetSpec&) = default;

 private:
  explicit SetSpec(Variant shape) : shape_(std::move(shape)) {}
  Variant shape_;
};

Vector project_set(const SetSpec& s, const Vector& x);
bool contains(const SetSpec& s, const Vector& x);
double dist_to_set(const SetSpec& s, const Vector& x);

/// Derivative of the projection at x, using the one-sided formula of the
/// region x lies in (exact away from the set boundary).
Matrix projection_jacobian(const SetSpec& s, const Vector& x);

}  // namespace subproj
