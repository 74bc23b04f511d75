#include <doctest.h>

#include <cmath>

#include "subproj/calculus.hpp"
#include "subproj/prox.hpp"
#include "support.hpp"

using namespace subproj;
using testing::check_close;
using testing::error_of;

namespace {

const SetSpec kUnitBall = SetSpec::ball(Vector{0.0, 0.0}, 1.0);
const double kNegLogImage = 0.5 - 0.5 * std::log(0.5);

Matrix rotation(double t) {
  Matrix r(2, 2);
  r << std::cos(t), -std::sin(t), std::sin(t), std::cos(t);
  return r;
}

FunctionSpec affine(const Vector& u, double b) { return affine_max({AffinePiece{u, b}}); }

}  // namespace

TEST_CASE("scale invariance") {
  CHECK(sproj_scale(3.7, neg_log(), Vector{0.5}).point[0] == doctest::Approx(kNegLogImage));
  CHECK(sproj_scale(1.0, neg_log(), Vector{0.5}).point == sproj(neg_log(), Vector{0.5}).point);
  check_close(sproj_scale(0.01, dist(kUnitBall), Vector{2.0, 0.0}).point, Vector{1.0, 0.0});
}

TEST_CASE("left composition") {
  CHECK(sproj_leftcompose(phi_identity(), neg_log(), Vector{0.5})[0] == doctest::Approx(kNegLogImage));
  const double cube = sproj_leftcompose(phi_cube(), neg_log(), Vector{0.5})[0];
  CHECK(cube == doctest::Approx(0.5 + (kNegLogImage - 0.5) / 3.0));
  CHECK(cube == doctest::Approx(0.615525).epsilon(1e-6));
  CHECK(cube == doctest::Approx(sproj(left_compose(phi_cube(), neg_log()), Vector{0.5}).point[0]));
  CHECK(sproj_leftcompose(phi_cube(), neg_log(), Vector{2.0}) == Vector{2.0});

  const FunctionSpec kinked = affine_max({AffinePiece{Vector{1.0}, 1.0}, AffinePiece{Vector{2.0}, 1.0}});
  CHECK(error_of([&] { return sproj_leftcompose(phi_cube(), kinked, Vector{0.0}); }) ==
        ErrorKind::NotDifferentiableHere);
  PhiPair flat{"flat", {}, [](double t) { return t * t * t; }, [](double) { return 0.0; }, 0.0, 1.0};
  CHECK(error_of([&] { return sproj_leftcompose(flat, neg_log(), Vector{0.5}); }) == ErrorKind::NonMonotonePhi);
}

TEST_CASE("power rule") {
  check_close(sproj_power(0.5, dist(kUnitBall), Vector{3.0, 0.0}), Vector{2.0, 0.0});
  CHECK(sproj_power(2.0, norm_pow(1.0, 1), Vector{2.0})[0] == doctest::Approx(-2.0));
  CHECK(sproj_power(1.0, neg_log(), Vector{0.5})[0] == doctest::Approx(kNegLogImage));
  CHECK(error_of([] { return sproj_power(2.0, linear(Vector{1.0}), Vector{-1.0}); }) ==
        ErrorKind::NegativeBaseError);

  std::mt19937_64 rng(4);
  const FunctionSpec f = sq_dist(SetSpec::box(Vector{-1.0, -1.0}, Vector{1.0, 1.0}));
  for (double a : {0.25, 0.5, 1.0, 2.0, 4.0}) {
    for (int k = 0; k < 100; ++k) {
      const Vector x = testing::random_vector(rng, 2, 4.0);
      if (!(eval(f, x).value() > 0.0)) continue;
      check_close(sproj(power_comp(a, f), x).point, sproj_power(a, f, x), 1e-10);
    }
  }
}

TEST_CASE("right-linear rule") {
  Matrix rot(2, 2);
  rot << 0.0, -1.0, 1.0, 0.0;
  check_close(sproj_rightlinear(rot, linear(Vector{0.0, 1.0}), Vector{2.0, 3.0}), Vector{0.0, 3.0});
  check_close(sproj_rightlinear(2.0 * Matrix::Identity(2, 2), norm_pow(2.0, 2), Vector{1.0, 1.0}),
              Vector{0.5, 0.5});
  check_close(sproj_rightlinear(Matrix::Identity(2, 2), dist(kUnitBall), Vector{3.0, 4.0}),
              sproj(dist(kUnitBall), Vector{3.0, 4.0}).point);

  std::mt19937_64 rng(8);
  const FunctionSpec f = dist(SetSpec::box(Vector{-1.0, -0.5}, Vector{0.5, 1.0}));
  for (int k = 0; k < 50; ++k) {
    const Matrix L = testing::uniform(rng, 0.2, 3.0) * rotation(testing::uniform(rng, 0.0, 6.3));
    const double alpha = scaled_orthogonal_factor(L);
    const Vector y = testing::random_vector(rng, 2, 4.0);
    const Vector composed = sproj(right_linear(L, f), y).point;
    check_close(alpha * composed, L.transpose() * sproj(f, L * y).point, 1e-9);
    check_close(composed, sproj_rightlinear(L, f, y), 1e-9);
  }
  Matrix shear(2, 2);
  shear << 1.0, 1.0, 0.0, 1.0;
  CHECK(error_of([&] { return sproj_rightlinear(shear, f, Vector{1.0, 1.0}); }) == ErrorKind::NotScaledOrthogonal);
}

TEST_CASE("convex combination case table") {
  const FunctionSpec f = dist(kUnitBall);
  const FunctionSpec g = dist(SetSpec::ball(Vector{0.0, 0.0}, 2.0));
  const JointSelection u = concentric_balls_selection(1.0, 2.0);
  check_close(sproj_convexcomb(0.5, f, g, u, Vector{4.0, 0.0}), Vector{1.5, 0.0});
  check_close(sproj(convex_comb(0.5, f, g, u), Vector{4.0, 0.0}).point, Vector{1.5, 0.0});
  CHECK(sproj_convexcomb(0.5, f, g, u, Vector{0.5, 0.0}) == Vector{0.5, 0.0});
  CHECK(error_of([&] { return sproj_convexcomb(0.5, f, g, u, Vector{1.5, 0.0}); }) ==
        ErrorKind::JointSelectionUnavailable);

  // Affine pairs sharing the gradient u = (1, 0) reach every row of the table.
  const Vector e1{1.0, 0.0};
  const JointSelection common = common_gradient_selection(e1);
  struct Row {
    double bf, bg, alpha;
    CombCase expected;
  };
  const std::vector<Row> rows = {
      {-1.0, 3.0, 0.5, CombCase::FFeasibleHPositive},  {-3.0, 1.0, 0.5, CombCase::FFeasibleHFeasible},
      {3.0, -1.0, 0.5, CombCase::GFeasibleHPositive},  {1.0, -3.0, 0.5, CombCase::GFeasibleHFeasible},
      {1.0, 2.0, 0.3, CombCase::SameSign},             {-1.0, -2.0, 0.3, CombCase::BothFeasible},
      {0.0, 2.0, 0.3, CombCase::SameSign},
  };
  const Vector x{0.0, 0.0};
  for (const auto& r : rows) {
    const FunctionSpec fa = affine(e1, r.bf);
    const FunctionSpec ga = affine(e1, r.bg);
    const CombProjection c = sproj_convexcomb_detail(r.alpha, fa, ga, common, x);
    INFO("row " << to_string(r.expected));
    CHECK(c.row == r.expected);
    check_close(c.point, sproj(convex_comb(r.alpha, fa, ga, common), x).point, 1e-12);
    const bool split = distance(c.point, c.convex_combination) <= 1e-12;
    CHECK(split == (r.bf * r.bg >= 0.0));
  }
  // Second row: the difference is -alpha f(x) / |u|^2 u.
  const CombProjection c = sproj_convexcomb_detail(0.25, affine(e1, -1.0), affine(e1, 3.0), common, x);
  check_close(c.point - c.convex_combination, Vector{0.25, 0.0}, 1e-12);
}

TEST_CASE("sum rule") {
  const FunctionSpec f = dist(kUnitBall);
  const FunctionSpec g = dist(SetSpec::ball(Vector{0.0, 0.0}, 2.0));
  const JointSelection u = concentric_balls_selection(1.0, 2.0);
  check_close(sproj_sum(f, g, u, Vector{4.0, 0.0}), Vector{1.5, 0.0});
  check_close(sproj(sum_pair(f, g, u), Vector{4.0, 0.0}).point, Vector{1.5, 0.0});
  check_close(sproj_sum(f, f, concentric_balls_selection(1.0, 1.5), Vector{4.0, 3.0}),
              sproj(f, Vector{4.0, 3.0}).point);

  const Vector e1{1.0, 0.0};
  const FunctionSpec fa = affine(e1, -1.0);
  const FunctionSpec ga = affine(e1, 3.0);
  const Vector x{0.0, 0.0};
  const Vector mean = 0.5 * (halfspace_project(x, e1, -1.0) + halfspace_project(x, e1, 3.0));
  check_close(sproj_sum(fa, ga, common_gradient_selection(e1), x), mean + 0.5 * e1);
  check_close(sproj_sum(fa, ga, common_gradient_selection(e1), x),
              sproj(sum_pair(fa, ga, common_gradient_selection(e1)), x).point);
  check_close(sproj_sum(fa, ga, common_gradient_selection(e1), x), Vector{-1.0, 0.0});
}

TEST_CASE("inf-convolution") {
  const FunctionSpec ind = indicator(kUnitBall);
  const FunctionSpec env = moreau_inf_conv(ind, 1.0);
  const auto& node = std::get<nodes::InfConv>(env.node().v);
  std::mt19937_64 rng(10);
  for (int k = 0; k < 100; ++k) {
    const Vector x = testing::random_vector(rng, 2, 4.0);
    const InfConvProjection r = sproj_infconv_detail(node.f, node.g, node.minimizer, node.joint, x);
    check_close(r.point, sproj_moreau(ind, 1.0, x), 1e-9);
    check_close(r.point, sproj(env, x).point, 1e-12);
    // f(Mx) = 0 here, so the split always holds
    check_close(r.point, r.split, 1e-12);
  }
  CHECK(sproj_infconv(node.f, node.g, node.minimizer, node.joint, Vector{0.3, 0.3}) == Vector{0.3, 0.3});

  // Both parts positive: the projection splits.
  const Vector e1{1.0, 0.0};
  const FunctionSpec fa = affine(e1, 1.0);
  const FunctionSpec ga = affine(e1, 2.0);
  const MinimizerOracle half{"half", {}, [](const Vector& x) { return 0.5 * x; }};
  const auto r = sproj_infconv_detail(fa, ga, half, common_gradient_selection(e1), Vector{1.0, 1.0});
  check_close(r.point, r.split, 1e-12);
  check_close(r.point, Vector{-3.0, 1.0}, 1e-12);

  const MinimizerOracle bad{"bad", {}, [](const Vector& x) { return x + Vector{5.0, 5.0}; }};
  CHECK(error_of([&] { return sproj_infconv(ind, node.g, bad, node.joint, Vector{3.0, 0.0}); }) ==
        ErrorKind::InconsistentMinimizer);
}

TEST_CASE("acceleration gap") {
  const FunctionSpec f = dist(kUnitBall);
  const AccelerationReport r = acceleration_report(f, 0.5, Vector{3.0, 0.0});
  CHECK(r.gap == doctest::Approx(-2.0));
  CHECK(r.direct_gap == doctest::Approx(-2.0));
  REQUIRE(r.companion_lhs);
  CHECK(*r.companion_lhs == doctest::Approx(0.0));
  CHECK(*r.companion_rhs == doctest::Approx(2.0));
  CHECK(acceleration_gap(f, 1.0, Vector{3.0, 0.0}) == 0.0);
  CHECK(error_of([&] { return acceleration_gap(f, 0.5, Vector{0.5, 0.0}); }) == ErrorKind::NotPositiveHere);
  CHECK(error_of([&] { return acceleration_gap(f, 1.5, Vector{3.0, 0.0}); }) == ErrorKind::InvalidArgument);

  std::mt19937_64 rng(12);
  for (int k = 0; k < 200; ++k) {
    const Vector x = testing::random_vector(rng, 2, 5.0);
    if (x.norm() <= 1.01) continue;
    const double a = testing::uniform(rng, 0.05, 1.0);
    const AccelerationReport q = acceleration_report(f, a, x);
    CHECK(q.gap <= 1e-12);
    CHECK(q.gap == doctest::Approx(q.direct_gap).epsilon(1e-9));
    CHECK(*q.companion_lhs <= *q.companion_rhs + 1e-12);
  }
}
