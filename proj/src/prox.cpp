#include "subproj/prox.hpp"

#include <cmath>

namespace subproj {

namespace {

std::optional<Vector> closed_form_prox(const FunctionSpec& f, double gamma, const Vector& x) {
  const auto& v = f.node().v;
  if (const auto* ind = std::get_if<nodes::Indicator>(&v)) return project_set(ind->set, x);
  if (const auto* lin = std::get_if<nodes::Linear>(&v)) return x - gamma * lin->u;
  if (const auto* np = std::get_if<nodes::NormPow>(&v)) {
    if (np->p == 2.0) return x / (1.0 + 2.0 * gamma);
    if (np->p == 1.0) {
      const double r = x.norm();
      if (r <= gamma) return Vector::zeros(x.dim());
      return (1.0 - gamma / r) * x;
    }
    return std::nullopt;
  }
  if (const auto* sc = std::get_if<nodes::Scale>(&v)) {
    return closed_form_prox(sc->f, gamma * sc->lambda, x);
  }
  return std::nullopt;
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    fail(ErrorKind::InvalidArgument, "gamma must be a positive real");
  }
}

}  // namespace

bool is_prox_friendly(const FunctionSpec& f) {
  return closed_form_prox(f, 1.0, Vector::zeros(f.dim())).has_value();
}

Vector prox(const FunctionSpec& f, double gamma, const Vector& x) {
  require_gamma(gamma);
  require_dim(x, f.dim(), "prox");
  auto p = closed_form_prox(f, gamma, x);
  if (!p) fail(ErrorKind::UnsupportedAtom, "no closed-form prox for " + f.describe());
  auto objective = [&](const Vector& y) {
    return eval(f, y) + ExtReal((x - y).squared_norm() / (2.0 * gamma));
  };
  audit_minimizer(objective, *p, x, 1e-9, "prox of " + f.describe());
  return *p;
}

double moreau_value(const FunctionSpec& f, double gamma, const Vector& x) {
  const Vector p = prox(f, gamma, x);
  return eval(f, p).value() + (x - p).squared_norm() / (2.0 * gamma);
}

Vector moreau_gradient(const FunctionSpec& f, double gamma, const Vector& x) {
  return (x - prox(f, gamma, x)) / gamma;
}

Vector sproj_moreau(const FunctionSpec& f, double gamma, const Vector& x) {
  const Vector p = prox(f, gamma, x);
  const double e = eval(f, p).value() + (x - p).squared_norm() / (2.0 * gamma);
  if (e <= 0.0) return x;
  const Vector d = x - p;
  const double n2 = d.squared_norm();
  if (std::sqrt(n2) <= kNormEpsilon) {
    fail(ErrorKind::DegenerateMoreau, "envelope is positive but x equals its prox");
  }
  return x - (gamma * e / n2) * d;
}

}  // namespace subproj
