#include <doctest.h>

#include <cmath>

#include "subproj/analysis.hpp"
#include "support.hpp"

using namespace subproj;
using testing::error_of;

namespace {

const SetSpec kUnitBall = SetSpec::ball(Vector{0.0, 0.0}, 1.0);

// G_f for Hyperbolic{eta} where f > 0, obtained from x - f(x) / f'(x).
double hyperbolic_image(double eta, double x) { return (eta * std::sqrt(1.0 + x * x) - 1.0) / x; }
double hyperbolic_image_deriv(double eta, double x) { return (1.0 - eta / std::sqrt(1.0 + x * x)) / (x * x); }

}  // namespace

TEST_CASE("Jacobian examples") {
  CHECK(sproj_jacobian(neg_log(), Vector{0.5})(0, 0) == doctest::Approx(-std::log(0.5)));
  CHECK(sproj_jacobian(hyperbolic(2.0), Vector{2.0})(0, 0) == doctest::Approx(hyperbolic_image_deriv(2.0, 2.0)));
  const Vector u{1.0, 2.0};
  const Matrix expected = Matrix::Identity(2, 2) - u.values() * u.values().transpose() / 5.0;
  CHECK(sproj_jacobian(linear(u), Vector{3.0, 1.0}).isApprox(expected, 1e-14));
  CHECK(error_of([] { return sproj_jacobian(neg_log(), Vector{2.0}); }) == ErrorKind::NotPositiveHere);
  const FunctionSpec kinked = affine_max({AffinePiece{Vector{1.0}, 1.0}, AffinePiece{Vector{2.0}, 1.0}});
  CHECK(error_of([&] { return sproj_jacobian(kinked, Vector{0.0}); }) == ErrorKind::NotTwiceDifferentiable);
}

TEST_CASE("Hyperbolic projector against its closed form") {
  for (double eta : {1.5, 2.0, 3.0}) {
    const double r = std::sqrt(eta * eta - 1.0);
    for (double x : {r + 0.3, r + 1.0, 5.0, -(r + 0.5), -7.0}) {
      CHECK(sproj(hyperbolic(eta), Vector{x}).point[0] == doctest::Approx(hyperbolic_image(eta, x)).epsilon(1e-12));
      CHECK(sproj_deriv_1d(hyperbolic(eta), x) == doctest::Approx(hyperbolic_image_deriv(eta, x)).epsilon(1e-10));
    }
  }
}

TEST_CASE("Jacobian formula matches finite differences") {
  std::mt19937_64 rng(13);
  struct Case {
    FunctionSpec f;
    double lo, hi;
  };
  const std::vector<Case> cases = {
      {sq_dist(kUnitBall), -4, 4}, {dist(SetSpec::point(Vector{1.0, -1.0})), -4, 4},
      {norm_pow(2.0, 2), -4, 4}, {norm_pow(3.0, 2), -3, 3},
      {power_comp(0.5, dist(kUnitBall)), -4, 4}, {offset(-1.0, norm_pow(2.0, 2)), -4, 4},
  };
  for (const auto& c : cases) {
    int used = 0;
    for (int tries = 0; used < 20 && tries < 1000; ++tries) {
      const Vector x = testing::random_vector(rng, 2, c.hi);
      if (eval(c.f, x).value() < 0.1) continue;
      ++used;
      const Matrix fd = fd_jacobian(sproj_map(c.f), x);
      INFO(c.f.describe() << " at " << to_string(x));
      CHECK(relative_max_error(fd, sproj_jacobian(c.f, x)) <= 1e-6);
    }
    CHECK(used == 20);
  }
}

TEST_CASE("1D derivative") {
  CHECK(sproj_deriv_1d(neg_log(), 2.0) == 1.0);
  CHECK(sproj_deriv_1d(neg_log(), 0.5) == doctest::Approx(-std::log(0.5)));
  CHECK(sproj_deriv_1d(linear(Vector{2.0}), 1.0) == 0.0);
  CHECK(error_of([] { return sproj_deriv_1d(neg_log(), 1.0); }) == ErrorKind::ZeroFunctionValue);
  for (double x : {0.1, 0.3, 0.7, 0.95}) {
    CHECK(sproj_deriv_1d(neg_log(), x) == doctest::Approx(sproj_jacobian(neg_log(), Vector{x})(0, 0)).epsilon(1e-10));
    CHECK(sproj_deriv_1d(sqrt_shift(2.0), x) ==
          doctest::Approx(sproj_jacobian(sqrt_shift(2.0), Vector{x})(0, 0)).epsilon(1e-10));
    // d/dx (2 eta sqrt(x) - x)
    CHECK(sproj_deriv_1d(sqrt_shift(2.0), x) == doctest::Approx(2.0 / std::sqrt(x) - 1.0));
  }
}

TEST_CASE("Lipschitz bounds") {
  std::mt19937_64 rng(14);
  std::vector<Vector> omega;
  for (int k = 0; k < 60; ++k) {
    const double t = testing::uniform(rng, std::sqrt(3.0) + 0.05, 6.0);
    omega.push_back(Vector{k % 2 ? t : -t});
  }
  const double bound = lipschitz_bound(hyperbolic(2.0), omega, 1.0);
  CHECK(std::isfinite(bound));
  CHECK(max_difference_quotient(hyperbolic(2.0), omega) <= bound + 1e-9);

  std::vector<Vector> plane;
  for (int k = 0; k < 40; ++k) {
    Vector x = testing::random_vector(rng, 2, 4.0);
    if (x[0] + x[1] > 0.0) plane.push_back(x);
  }
  CHECK(lipschitz_bound(linear(Vector{1.0, 1.0}), plane, 0.0) == 2.0);
  CHECK(max_difference_quotient(linear(Vector{1.0, 1.0}), plane) <= 1.0 + 1e-12);

  const double eta = 2.0;
  double prev = 0.0;
  for (double eps : {1e-2, 1e-4, 1e-6}) {
    const std::vector<Vector> near_zero = {Vector{eps}, Vector{2.0 * eps}};
    const double q = max_difference_quotient(sqrt_shift(eta), near_zero);
    CHECK(q > prev);
    prev = q;
    CHECK(lipschitz_bound(sqrt_shift(eta), near_zero, 0.25 / std::pow(eps, 1.5)) >= q);
  }
  CHECK(prev > 1000.0);
  CHECK(error_of([] { return lipschitz_bound(neg_log(), {}, 1.0); }) == ErrorKind::EmptySample);
  CHECK(error_of([] { return lipschitz_bound(neg_log(), {Vector{2.0}}, 1.0); }) == ErrorKind::NotPositiveHere);
}

TEST_CASE("monotonicity probe") {
  std::mt19937_64 rng(15);
  std::vector<std::pair<Vector, Vector>> pairs;
  for (int k = 0; k < 200; ++k) pairs.emplace_back(testing::random_vector(rng, 2, 3.0), testing::random_vector(rng, 2, 3.0));
  const auto d = monotonicity_probe(dist(kUnitBall), pairs);
  CHECK(d.worst >= -1e-12);
  REQUIRE(d.worst_inverse_form);
  CHECK(*d.worst_inverse_form >= -1e-12);
  CHECK(monotonicity_probe(sq_dist(kUnitBall), pairs).worst >= -1e-12);
  const auto same = monotonicity_probe(dist(kUnitBall), {{Vector{2.0, 1.0}, Vector{2.0, 1.0}}});
  CHECK(same.worst == 0.0);
}

TEST_CASE("sequence lab trichotomy") {
  const FunctionSpec f = linear(Vector{3.0, 4.0});
  const Vector x{1.0, 1.0};  // f(x) = 7
  SUBCASE("scaling at a feasible point") {
    const SeqVerdict v = seq_lab(scale_family(f), f, Vector{-1.0, -1.0});
    CHECK(v.verdict == SeqCase::A);
    CHECK(v.predicted_convergent == true);
    CHECK(v.tail_deviation == 0.0);
  }
  SUBCASE("scaling at an infeasible point") {
    const SeqVerdict v = seq_lab(scale_family(f), f, x);
    CHECK(v.verdict == SeqCase::C);
    CHECK(v.tail_deviation <= 1e-14);
  }
  SUBCASE("harmonic shift") {
    const SeqVerdict v = seq_lab(harmonic_shift_family(f), f, x, 1000);
    CHECK(v.verdict == SeqCase::C);
    // deviation of f - 1/n is (1/n) / |u|
    CHECK(v.deviations[999] == doctest::Approx(1.0 / 1000.0 / 5.0));
    CHECK(v.tail_deviation == doctest::Approx(1.0 / 751.0 / 5.0));
  }
  SUBCASE("geometric shift") {
    const SeqVerdict v = seq_lab(geometric_shift_family(f), f, x, 1000);
    CHECK(v.verdict == SeqCase::C);
    CHECK(v.tail_deviation <= 1e-8);
  }
  SUBCASE("alternating shift") {
    const SeqVerdict v = seq_lab(alternating_family(f, x), f, x, 1000);
    CHECK(v.verdict == SeqCase::B);
    CHECK(v.predicted_convergent == false);
    REQUIRE(v.gap_bound);
    CHECK(*v.gap_bound == doctest::Approx(7.0 / 5.0));
    CHECK(v.recurring_deviation >= 0.9 * *v.gap_bound);
  }
}

TEST_CASE("distance bound") {
  const DistBound n = dist_bound_check(neg_log(), Vector{0.5});
  CHECK(n.lhs == doctest::Approx(-std::log(0.5) / 2.0));
  CHECK(n.rhs == doctest::Approx(0.5));
  CHECK(n.holds);
  const DistBound d = dist_bound_check(dist(kUnitBall), Vector{3.0, 4.0});
  CHECK(d.lhs == doctest::Approx(4.0));
  CHECK(d.rhs == doctest::Approx(4.0));
  const DistBound l = dist_bound_check(linear(Vector{0.0, 1.0}), Vector{0.0, 3.0});
  CHECK(l.lhs == doctest::Approx(3.0));
  CHECK(l.rhs == doctest::Approx(3.0));
  const FunctionSpec two = affine_max({AffinePiece{Vector{1.0, 0.0}, 1.0}, AffinePiece{Vector{0.0, 1.0}, 1.0}});
  CHECK(error_of([&] { return dist_bound_check(two, Vector{1.0, 1.0}); }) == ErrorKind::NoLevelSetOracle);
  CHECK(error_of([] { return dist_bound_check(neg_log(), Vector{2.0}); }) == ErrorKind::NotPositiveHere);

  std::mt19937_64 rng(16);
  const std::vector<FunctionSpec> catalog = {sq_dist(kUnitBall), sqrt_shift(1.5), hyperbolic(2.0), norm_pow(2.0, 1),
                                             dist(SetSpec::box(Vector{0.0}, Vector{1.0}))};
  for (const auto& f : catalog) {
    for (int k = 0; k < 200; ++k) {
      const Vector y{testing::uniform(rng, 0.01, 8.0)};
      const Vector x = f.dim() == 1 ? y : Vector{y[0], testing::uniform(rng, -3.0, 3.0)};
      if (!(eval(f, x).value() > 0.0)) continue;
      INFO(f.describe() << " at " << to_string(x));
      CHECK(dist_bound_check(f, x).holds);
    }
  }
}
