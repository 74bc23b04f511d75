#include "subproj/projector.hpp"

#include <cmath>

namespace subproj {

std::string_view to_string(ProjStatus s) {
  return s == ProjStatus::Fixed ? "Fixed" : "Projected";
}

Vector halfspace_project(const Vector& x, const Vector& u, double fx) {
  require_same_dim(x, u, "halfspace_project");
  if (!std::isfinite(fx)) fail(ErrorKind::NonFiniteValue, "halfspace_project: f(x) is not finite");
  if (fx <= 0.0) return x;
  const double n2 = u.squared_norm();
  if (std::sqrt(n2) <= kNormEpsilon) {
    fail(ErrorKind::ZeroSubgradient, "zero subgradient at a point with f(x) > 0");
  }
  return x - (fx / n2) * u;
}

ProjOutcome sproj(const FunctionSpec& f, const Vector& x, const SelectionStrategy& s) {
  if (has_bare_indicator(f)) {
    fail(ErrorKind::UnsupportedAtom, "indicator functions need a Moreau envelope or inf-convolution");
  }
  const ExtReal v = eval(f, x);
  if (!v.is_finite()) fail(ErrorKind::DomainError, "f(x) = +inf at " + to_string(x));
  const double fx = v.value();
  if (fx <= 0.0) return ProjOutcome{x, ProjStatus::Fixed, fx, std::nullopt};
  Vector u = subgradient(f, x, s);
  Vector p = halfspace_project(x, u, fx);
  return ProjOutcome{std::move(p), ProjStatus::Projected, fx, std::move(u)};
}

std::vector<Vector> sproj_set(const FunctionSpec& f, const Vector& x, std::size_t k) {
  if (has_bare_indicator(f)) {
    fail(ErrorKind::UnsupportedAtom, "indicator functions need a Moreau envelope or inf-convolution");
  }
  if (k == 0) fail(ErrorKind::InvalidArgument, "sample size must be positive");
  const ExtReal v = eval(f, x);
  if (!v.is_finite()) fail(ErrorKind::DomainError, "f(x) = +inf at " + to_string(x));
  if (v.value() <= 0.0) return {x};
  std::vector<Vector> out;
  for (const Vector& u : subdifferential_sample(f, x, k)) {
    out.push_back(halfspace_project(x, u, v.value()));
  }
  return out;
}

Vector relax(const Vector& x, const Vector& p, double lambda) {
  require_same_dim(x, p, "relax");
  if (!(lambda >= 0.0 && lambda <= 2.0)) {
    fail(ErrorKind::RelaxationOutOfRange, "relaxation " + std::to_string(lambda) + " not in [0, 2]");
  }
  return lerp(x, p, lambda);
}

double classT_witness(const FunctionSpec& f, const Vector& x, const Vector& y,
                      const SelectionStrategy& s) {
  const ExtReal fy = eval(f, y);
  if (!(fy <= ExtReal(0.0))) fail(ErrorKind::InfeasibleWitness, "f(y) > 0 at " + to_string(y));
  const Vector g = sproj(f, x, s).point;
  return (y - g).dot(x - g);
}

double fejer_gap(const Vector& x, const Vector& p, const Vector& y) {
  require_same_dim(x, p, "fejer_gap");
  require_same_dim(x, y, "fejer_gap");
  return (x - y).squared_norm() - (x - p).squared_norm() - (p - y).squared_norm();
}

}  // namespace subproj
