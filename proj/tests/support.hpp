#pragma once

#include <doctest.h>

#include <random>

#include "subproj/core.hpp"

namespace testing {

inline subproj::Vector random_vector(std::mt19937_64& rng, std::size_t dim, double scale = 3.0) {
  std::uniform_real_distribution<double> u(-scale, scale);
  Eigen::VectorXd v(static_cast<Eigen::Index>(dim));
  for (Eigen::Index i = 0; i < v.size(); ++i) v[i] = u(rng);
  return subproj::Vector(v);
}

inline double uniform(std::mt19937_64& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline void check_close(const subproj::Vector& a, const subproj::Vector& b, double tol = 1e-10) {
  REQUIRE(a.dim() == b.dim());
  INFO("got " << subproj::to_string(a) << ", expected " << subproj::to_string(b));
  CHECK(subproj::distance(a, b) <= tol * (1.0 + b.norm()));
}

template <class F>
subproj::ErrorKind error_of(F&& f) {
  try {
    f();
  } catch (const subproj::Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return subproj::ErrorKind::InvalidArgument;
}

}  // namespace testing
