#include "subproj/calculus.hpp"

#include <algorithm>
#include <cmath>

namespace subproj {

namespace {

double finite_at(const FunctionSpec& f, const Vector& x, const char* where) {
  const ExtReal v = eval(f, x);
  if (!v.is_finite()) fail(ErrorKind::DomainError, std::string(where) + ": value is +inf");
  return v.value();
}

Vector joint_at(const JointSelection& joint, const Vector& x) {
  auto u = joint.select(x);
  if (!u) {
    fail(ErrorKind::JointSelectionUnavailable,
         "joint selection '" + joint.name + "' is undefined at " + to_string(x));
  }
  if (u->norm() <= kNormEpsilon) fail(ErrorKind::ZeroSubgradient, "joint selection returned 0");
  return *u;
}

}  // namespace

ProjOutcome sproj_scale(double lambda, const FunctionSpec& f, const Vector& x,
                        const SelectionStrategy& s) {
  return sproj(scale(lambda, f), x, s);
}

Vector sproj_leftcompose(const PhiPair& phi, const FunctionSpec& f, const Vector& x) {
  const double fx = finite_at(f, x, "sproj_leftcompose");
  if (fx <= 0.0) return x;
  if (!differentiable_at(f, x)) {
    fail(ErrorKind::NotDifferentiableHere, f.describe() + " at " + to_string(x));
  }
  const double d = phi.dphi(fx);
  if (!(d > 0.0)) fail(ErrorKind::NonMonotonePhi, "phi'(f(x)) <= 0");
  const Vector g = sproj(f, x).point;
  return x + (phi.phi(fx) / (fx * d)) * (g - x);
}

Vector sproj_power(double alpha, const FunctionSpec& f, const Vector& x,
                   const SelectionStrategy& s) {
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    fail(ErrorKind::InvalidArgument, "power exponent must be positive");
  }
  const double fx = finite_at(f, x, "sproj_power");
  if (fx < -kNegativeBaseTol) fail(ErrorKind::NegativeBaseError, "f(x) < 0 under a power");
  return lerp(x, sproj(f, x, s).point, alpha);
}

Vector sproj_rightlinear(const Matrix& L, const FunctionSpec& f, const Vector& y,
                         const SelectionStrategy& s) {
  const double alpha = scaled_orthogonal_factor(L);
  require_dim(y, static_cast<std::size_t>(L.cols()), "sproj_rightlinear");
  return (L.transpose() * sproj(f, L * y, s).point) / alpha;
}

std::string_view to_string(CombCase c) {
  switch (c) {
    case CombCase::BothFeasible: return "both_feasible";
    case CombCase::SameSign: return "same_sign";
    case CombCase::FFeasibleHFeasible: return "f_feasible_h_feasible";
    case CombCase::FFeasibleHPositive: return "f_feasible_h_positive";
    case CombCase::GFeasibleHFeasible: return "g_feasible_h_feasible";
    case CombCase::GFeasibleHPositive: return "g_feasible_h_positive";
  }
  return "same_sign";
}

CombCase classify_convexcomb(double alpha, double fx, double gx) {
  if (fx <= 0.0 && gx <= 0.0) return CombCase::BothFeasible;
  if (fx * gx >= 0.0) return CombCase::SameSign;
  const double h = alpha * fx + (1.0 - alpha) * gx;
  if (fx < 0.0) return h <= 0.0 ? CombCase::FFeasibleHFeasible : CombCase::FFeasibleHPositive;
  return h <= 0.0 ? CombCase::GFeasibleHFeasible : CombCase::GFeasibleHPositive;
}

CombProjection sproj_convexcomb_detail(double alpha, const FunctionSpec& f, const FunctionSpec& g,
                                       const JointSelection& joint, const Vector& x) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0,1)");
  const double fx = finite_at(f, x, "sproj_convexcomb");
  const double gx = finite_at(g, x, "sproj_convexcomb");
  const CombCase row = classify_convexcomb(alpha, fx, gx);
  if (row == CombCase::BothFeasible) return CombProjection{x, row, x};
  const Vector u = joint_at(joint, x);
  const double n2 = u.squared_norm();
  const Vector mix =
      alpha * halfspace_project(x, u, fx) + (1.0 - alpha) * halfspace_project(x, u, gx);
  switch (row) {
    case CombCase::FFeasibleHFeasible:
      return CombProjection{mix + ((1.0 - alpha) * gx / n2) * u, row, mix};
    case CombCase::FFeasibleHPositive:
      return CombProjection{mix - (alpha * fx / n2) * u, row, mix};
    case CombCase::GFeasibleHFeasible:
      return CombProjection{mix + (alpha * fx / n2) * u, row, mix};
    case CombCase::GFeasibleHPositive:
      return CombProjection{mix - ((1.0 - alpha) * gx / n2) * u, row, mix};
    default:
      return CombProjection{mix, row, mix};
  }
}

Vector sproj_convexcomb(double alpha, const FunctionSpec& f, const FunctionSpec& g,
                        const JointSelection& joint, const Vector& x) {
  return sproj_convexcomb_detail(alpha, f, g, joint, x).point;
}

Vector sproj_sum(const FunctionSpec& f, const FunctionSpec& g, const JointSelection& joint,
                 const Vector& x) {
  const double fx = finite_at(f, x, "sproj_sum");
  const double gx = finite_at(g, x, "sproj_sum");
  if (fx <= 0.0 && gx <= 0.0) return x;
  const Vector u = joint_at(joint, x);
  const Vector mean = 0.5 * (halfspace_project(x, u, fx) + halfspace_project(x, u, gx));
  if (fx * gx >= 0.0) return mean;
  return mean + (std::min(std::abs(fx), std::abs(gx)) / (2.0 * u.squared_norm())) * u;
}

InfConvProjection sproj_infconv_detail(const FunctionSpec& f, const FunctionSpec& g,
                                       const MinimizerOracle& m, const JointSelection& joint,
                                       const Vector& x) {
  require_dim(x, f.dim(), "sproj_infconv");
  const Vector y = m.argmin(x);
  require_dim(y, x.dim(), "minimizer oracle");
  auto objective = [&](const Vector& z) { return eval(f, z) + eval(g, x - z); };
  audit_minimizer(objective, y, x, 1e-8, "minimizer '" + m.name + "'");
  const Vector z = x - y;
  const double fy = finite_at(f, y, "sproj_infconv");
  const double gz = finite_at(g, z, "sproj_infconv");
  if (fy <= 0.0 && gz <= 0.0) return InfConvProjection{x, x, fy, gz};
  const Vector u = joint_at(joint, x);
  const double total = std::max(fy + gz, 0.0);
  Vector point = x - (total / u.squared_norm()) * u;
  Vector split = halfspace_project(y, u, fy) + halfspace_project(z, u, gz);
  return InfConvProjection{std::move(point), std::move(split), fy, gz};
}

Vector sproj_infconv(const FunctionSpec& f, const FunctionSpec& g, const MinimizerOracle& m,
                     const JointSelection& joint, const Vector& x) {
  return sproj_infconv_detail(f, g, m, joint, x).point;
}

AccelerationReport acceleration_report(const FunctionSpec& f, double alpha, const Vector& x) {
  if (!(alpha > 0.0 && alpha <= 1.0)) fail(ErrorKind::InvalidArgument, "alpha must lie in (0,1]");
  const double fx = finite_at(f, x, "acceleration_gap");
  if (!(fx > 0.0)) fail(ErrorKind::NotPositiveHere, "f(x) <= 0 at " + to_string(x));
  if (!differentiable_at(f, x)) {
    fail(ErrorKind::NotDifferentiableHere, f.describe() + " at " + to_string(x));
  }
  const double gnorm = subgradient(f, x).norm();
  AccelerationReport r{};
  r.gap = fx / gnorm * (1.0 - 1.0 / alpha);
  const Vector gf = sproj(f, x).point;
  const Vector ga = sproj(power_comp(1.0 / alpha, f), x).point;
  r.direct_gap = distance(x, gf) - distance(x, ga);
  if (auto p = project_level_set(f, x)) {
    r.companion_lhs = distance(gf, *p);
    r.companion_rhs = distance(ga, *p);
  }
  return r;
}

double acceleration_gap(const FunctionSpec& f, double alpha, const Vector& x) {
  return acceleration_report(f, alpha, x).gap;
}

}  // namespace subproj
