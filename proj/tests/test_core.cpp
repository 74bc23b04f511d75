#include <doctest.h>

#include <cmath>
#include <limits>

#include "subproj/sets.hpp"
#include "support.hpp"

using namespace subproj;
using testing::error_of;

TEST_CASE("vectors reject empty and non-finite input") {
  CHECK(error_of([] { Vector(Eigen::VectorXd(0)); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { Vector{1.0, std::nan("")}; }) == ErrorKind::NonFiniteValue);
  CHECK(error_of([] { Vector{std::numeric_limits<double>::infinity()}; }) == ErrorKind::NonFiniteValue);
  CHECK(error_of([] { return Vector{1.0} + Vector{1.0, 2.0}; }) == ErrorKind::DimensionMismatch);
}

TEST_CASE("vector arithmetic") {
  const Vector a{1.0, 2.0};
  const Vector b{3.0, -1.0};
  CHECK(a + b == Vector{4.0, 1.0});
  CHECK(a - b == Vector{-2.0, 3.0});
  CHECK(2.0 * a == Vector{2.0, 4.0});
  CHECK(a.dot(b) == doctest::Approx(1.0));
  CHECK(lerp(a, b, 0.5) == Vector{2.0, 0.5});
  CHECK(Vector::unit(3, 1) == Vector{0.0, 1.0, 0.0});
}

TEST_CASE("extended reals") {
  const ExtReal inf = ExtReal::infinity();
  CHECK_FALSE(inf.is_finite());
  CHECK(ExtReal(std::numeric_limits<double>::infinity()) == inf);
  CHECK(error_of([&] { return inf.value(); }) == ErrorKind::DomainError);
  CHECK(error_of([] { return ExtReal(-std::numeric_limits<double>::infinity()); }) == ErrorKind::NonFiniteValue);
  CHECK((ExtReal(1.0) + inf) == inf);
  CHECK(ExtReal(2.0) < inf);
  CHECK((2.0 * ExtReal(1.5)).value() == 3.0);
}

TEST_CASE("Inv is an involution with the stated Jacobian") {
  std::mt19937_64 rng(7);
  for (int k = 0; k < 50; ++k) {
    const Vector x = testing::random_vector(rng, 3);
    testing::check_close(inv(inv(x)), x, 1e-12);
    const Matrix fd = fd_jacobian([](const Vector& v) { return inv(v); }, x);
    CHECK(relative_max_error(fd, inv_jacobian(x)) <= 1e-6);
  }
  CHECK(error_of([] { return inv(Vector{0.0, 0.0}); }) == ErrorKind::ZeroVector);
}

TEST_CASE("set projections") {
  const Vector x{2.0, 0.0};
  testing::check_close(project_set(SetSpec::ball(Vector{0.0, 0.0}, 1.0), x), Vector{1.0, 0.0});
  testing::check_close(project_set(SetSpec::halfspace(Vector{0.0, 1.0}, 0.0), Vector{1.0, 2.0}), Vector{1.0, 0.0});
  testing::check_close(project_set(SetSpec::box(Vector{-1.0, -1.0}, Vector{1.0, 1.0}), Vector{3.0, 0.5}),
                       Vector{1.0, 0.5});
  CHECK(project_set(SetSpec::point(Vector{4.0, 4.0}), x) == Vector{4.0, 4.0});
  CHECK(error_of([] { SetSpec::ball(Vector{0.0}, -1.0); }) == ErrorKind::InvalidArgument);
  CHECK(error_of([] { SetSpec::halfspace(Vector{0.0}, 1.0); }) == ErrorKind::ZeroVector);
}

TEST_CASE("projections are idempotent and firmly nonexpansive") {
  std::mt19937_64 rng(11);
  const std::vector<SetSpec> sets = {
      SetSpec::ball(Vector{0.5, -0.5, 1.0}, 1.5),
      SetSpec::halfspace(Vector{1.0, 2.0, -1.0}, 0.5),
      SetSpec::box(Vector{-1.0, 0.0, -2.0}, Vector{1.0, 0.5, 2.0}),
      SetSpec::point(Vector{1.0, 1.0, 1.0}),
  };
  for (const auto& s : sets) {
    for (int k = 0; k < 500; ++k) {
      const Vector x = testing::random_vector(rng, 3, 5.0);
      const Vector y = testing::random_vector(rng, 3, 5.0);
      const Vector px = project_set(s, x);
      const Vector py = project_set(s, y);
      testing::check_close(project_set(s, px), px, 1e-12);
      CHECK(contains(s, px));
      CHECK((px - py).squared_norm() <= (px - py).dot(x - y) + 1e-12);
    }
  }
}

TEST_CASE("projection Jacobians agree with finite differences off the boundary") {
  std::mt19937_64 rng(5);
  const std::vector<SetSpec> sets = {
      SetSpec::ball(Vector{0.0, 0.0}, 1.0),
      SetSpec::halfspace(Vector{1.0, -1.0}, 0.25),
      SetSpec::box(Vector{-1.0, -1.0}, Vector{1.0, 1.0}),
  };
  for (const auto& s : sets) {
    for (int k = 0; k < 20; ++k) {
      const Vector x = testing::random_vector(rng, 2, 4.0);
      const Vector p = project_set(s, x);
      if (distance(x, p) < 0.1 && distance(x, p) > 0.0) continue;
      const Matrix fd = fd_jacobian([&](const Vector& v) { return project_set(s, v); }, x);
      CHECK(relative_max_error(fd, projection_jacobian(s, x)) <= 1e-6);
    }
  }
}
