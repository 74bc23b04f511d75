#include "subproj/sets.hpp"

#include <algorithm>
#include <cmath>

#include "overloaded.hpp"

namespace subproj {

using detail::Overloaded;

SetSpec SetSpec::ball(Vector center, double radius) {
  if (!(radius > 0.0) || !std::isfinite(radius)) {
    fail(ErrorKind::InvalidArgument, "ball radius must be positive");
  }
  return SetSpec(Ball{std::move(center), radius});
}

SetSpec SetSpec::halfspace(Vector normal, double offset) {
  if (normal.norm() <= kNormEpsilon) fail(ErrorKind::ZeroVector, "halfspace normal is zero");
  if (!std::isfinite(offset)) fail(ErrorKind::NonFiniteValue, "halfspace offset");
  return SetSpec(Halfspace{std::move(normal), offset});
}

SetSpec SetSpec::box(Vector lo, Vector hi) {
  require_same_dim(lo, hi, "box");
  for (std::size_t i = 0; i < lo.dim(); ++i) {
    if (lo[i] > hi[i]) fail(ErrorKind::InvalidArgument, "box requires lo <= hi componentwise");
  }
  return SetSpec(Box{std::move(lo), std::move(hi)});
}

SetSpec SetSpec::point(Vector c) { return SetSpec(Point{std::move(c)}); }

std::size_t SetSpec::dim() const {
  return std::visit(Overloaded{
                        [](const Ball& b) { return b.center.dim(); },
                        [](const Halfspace& h) { return h.normal.dim(); },
                        [](const Box& b) { return b.lo.dim(); },
                        [](const Point& p) { return p.c.dim(); },
                    },
                    shape_);
}

Vector project_set(const SetSpec& s, const Vector& x) {
  require_dim(x, s.dim(), "project_set");
  // Members (up to the membership slack) are their own projection, so that
  // P_C is idempotent and d_C vanishes on projected points.
  if (contains(s, x)) return x;
  return std::visit(
      Overloaded{
          [&](const Ball& b) {
            const Vector d = x - b.center;
            const double n = d.norm();
            if (n <= b.radius) return x;
            return b.center + (b.radius / n) * d;
          },
          [&](const Halfspace& h) {
            const double excess = x.dot(h.normal) - h.offset;
            if (excess <= 0.0) return x;
            return x - (excess / h.normal.squared_norm()) * h.normal;
          },
          [&](const Box& b) {
            return Vector(Eigen::VectorXd(x.values().cwiseMax(b.lo.values()).cwiseMin(b.hi.values())));
          },
          [&](const Point& p) { return p.c; },
      },
      s.shape());
}

bool contains(const SetSpec& s, const Vector& x) {
  require_dim(x, s.dim(), "contains");
  // Relative slack so that projected points, which land on the boundary up
  // to rounding, count as members.
  constexpr double kSlack = 1e-12;
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return distance(x, b.center) <= b.radius + kSlack * (1.0 + b.radius + x.norm()); },
          [&](const Halfspace& h) {
            return x.dot(h.normal) <= h.offset + kSlack * (1.0 + std::abs(h.offset) + h.normal.norm() * x.norm());
          },
          [&](const Box& b) {
            const auto slack = kSlack * (1.0 + x.values().array().abs());
            return (x.values().array() >= b.lo.values().array() - slack).all() &&
                   (x.values().array() <= b.hi.values().array() + slack).all();
          },
          [&](const Point& p) { return distance(x, p.c) <= kSlack * (1.0 + p.c.norm()); },
      },
      s.shape());
}

double dist_to_set(const SetSpec& s, const Vector& x) { return distance(x, project_set(s, x)); }

Matrix projection_jacobian(const SetSpec& s, const Vector& x) {
  require_dim(x, s.dim(), "projection_jacobian");
  const auto n = static_cast<Eigen::Index>(x.dim());
  const Matrix id = Matrix::Identity(n, n);
  return std::visit(
      Overloaded{
          [&](const Ball& b) -> Matrix {
            const Eigen::VectorXd d = x.values() - b.center.values();
            const double r = d.norm();
            if (r <= b.radius) return id;
            const Eigen::VectorXd u = d / r;
            return (b.radius / r) * (id - u * u.transpose());
          },
          [&](const Halfspace& h) -> Matrix {
            if (x.dot(h.normal) <= h.offset) return id;
            const Eigen::VectorXd& a = h.normal.values();
            return id - a * a.transpose() / a.squaredNorm();
          },
          [&](const Box& b) -> Matrix {
            Eigen::VectorXd diag(n);
            for (Eigen::Index i = 0; i < n; ++i) {
              const double xi = x.values()[i];
              diag[i] = (xi >= b.lo.values()[i] && xi <= b.hi.values()[i]) ? 1.0 : 0.0;
            }
            return diag.asDiagonal();
          },
          [&](const Point&) -> Matrix { return Matrix::Zero(n, n); },
      },
      s.shape());
}

}  // namespace subproj
