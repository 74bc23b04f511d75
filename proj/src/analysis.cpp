#include "subproj/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subproj {

namespace {

double positive_value(const FunctionSpec& f, const Vector& x) {
  const ExtReal v = eval(f, x);
  if (!v.is_finite()) fail(ErrorKind::DomainError, "f(x) = +inf at " + to_string(x));
  if (!(v.value() > 0.0)) fail(ErrorKind::NotPositiveHere, "f(x) <= 0 at " + to_string(x));
  return v.value();
}

Vector nonzero_gradient(const FunctionSpec& f, const Vector& x, const SelectionStrategy& s) {
  Vector g = subgradient(f, x, s);
  if (g.norm() <= kNormEpsilon) fail(ErrorKind::ZeroSubgradient, "zero gradient at " + to_string(x));
  return g;
}

}  // namespace

VectorMap sproj_map(const FunctionSpec& f, const SelectionStrategy& s) {
  return [f, s](const Vector& x) { return sproj(f, x, s).point; };
}

Matrix sproj_jacobian(const FunctionSpec& f, const Vector& x) {
  const double fx = positive_value(f, x);
  if (!differentiable_at(f, x)) {
    fail(ErrorKind::NotTwiceDifferentiable, f.describe() + " has a kink at " + to_string(x));
  }
  const Matrix h = hessian(f, x);
  const Eigen::VectorXd g = nonzero_gradient(f, x, SelectionStrategy()).values();
  const double n2 = g.squaredNorm();
  const auto n = g.size();
  return Matrix::Identity(n, n) - g * g.transpose() / n2 - (fx / n2) * h +
         (2.0 * fx / (n2 * n2)) * g * (g.transpose() * h);
}

double sproj_deriv_1d(const FunctionSpec& f, double x) {
  if (f.dim() != 1) fail(ErrorKind::DimensionMismatch, "sproj_deriv_1d needs a 1D function");
  const Vector v{x};
  const ExtReal fv = eval(f, v);
  if (!fv.is_finite()) fail(ErrorKind::DomainError, "f(x) = +inf");
  const double fx = fv.value();
  if (fx == 0.0) fail(ErrorKind::ZeroFunctionValue, "G_f is not differentiable where f = 0");
  if (fx < 0.0) return 1.0;
  const double d1 = nonzero_gradient(f, v, SelectionStrategy())[0];
  const double d2 = hessian(f, v)(0, 0);
  return d2 * fx / (d1 * d1);
}

double lipschitz_bound(const FunctionSpec& f, const std::vector<Vector>& omega, double beta) {
  if (omega.empty()) fail(ErrorKind::EmptySample, "lipschitz_bound needs sample points");
  if (!(beta >= 0.0) || !std::isfinite(beta)) fail(ErrorKind::InvalidArgument, "beta must be >= 0");
  double sup_f = 0.0;
  double inf_g2 = std::numeric_limits<double>::infinity();
  for (const auto& x : omega) {
    sup_f = std::max(sup_f, std::abs(positive_value(f, x)));
    inf_g2 = std::min(inf_g2, subgradient(f, x).squared_norm());
  }
  if (!(inf_g2 > 0.0)) return std::numeric_limits<double>::infinity();
  if (f.dim() == 1) return std::max(1.0, sup_f / inf_g2 * beta);
  return 2.0 + 3.0 * sup_f / inf_g2 * beta;
}

double max_difference_quotient(const FunctionSpec& f, const std::vector<Vector>& omega) {
  std::vector<Vector> images;
  images.reserve(omega.size());
  for (const auto& x : omega) images.push_back(sproj(f, x).point);
  double worst = 0.0;
  for (std::size_t i = 0; i < omega.size(); ++i) {
    for (std::size_t j = i + 1; j < omega.size(); ++j) {
      const double d = distance(omega[i], omega[j]);
      if (d > 0.0) worst = std::max(worst, distance(images[i], images[j]) / d);
    }
  }
  return worst;
}

MonotonicityReport monotonicity_probe(const FunctionSpec& f,
                                      const std::vector<std::pair<Vector, Vector>>& pairs,
                                      const SelectionStrategy& s) {
  MonotonicityReport r{std::numeric_limits<double>::infinity(), std::nullopt, pairs.size()};
  if (pairs.empty()) r.worst = 0.0;
  for (const auto& [x, y] : pairs) {
    const ProjOutcome gx = sproj(f, x, s);
    const ProjOutcome gy = sproj(f, y, s);
    const Vector d = x - y;
    r.worst = std::min(r.worst, (gx.point - gy.point).dot(d));
    if (gx.status == ProjStatus::Projected && gy.status == ProjStatus::Projected) {
      const Vector w = gx.f_value * inv(*gx.subgradient_used) - gy.f_value * inv(*gy.subgradient_used);
      const double margin = d.squared_norm() - d.dot(w);
      r.worst_inverse_form = std::min(r.worst_inverse_form.value_or(margin), margin);
    }
  }
  return r;
}

FunctionFamily scale_family(const FunctionSpec& f) {
  return [f](std::size_t n) { return scale(1.0 + 1.0 / static_cast<double>(n), f); };
}

FunctionFamily harmonic_shift_family(const FunctionSpec& f) {
  return [f](std::size_t n) { return offset(-1.0 / static_cast<double>(n), f); };
}

FunctionFamily geometric_shift_family(const FunctionSpec& f) {
  return [f](std::size_t n) { return offset(-std::exp2(-static_cast<double>(n) / 8.0), f); };
}

FunctionFamily alternating_family(const FunctionSpec& f, const Vector& x) {
  const double fx = eval(f, x).value();
  return [f, fx](std::size_t n) { return n % 2 == 0 ? offset(-2.0 * fx, f) : f; };
}

std::string_view to_string(SeqCase c) {
  switch (c) {
    case SeqCase::A: return "a";
    case SeqCase::B: return "b";
    case SeqCase::C: return "c";
    case SeqCase::Undetermined: return "undetermined";
  }
  return "undetermined";
}

SeqVerdict seq_lab(const FunctionFamily& family, const FunctionSpec& f, const Vector& x,
                   std::size_t N, const SelectionStrategy& s) {
  if (N < 2 * kRecurrenceWindow) fail(ErrorKind::InvalidArgument, "horizon too short");
  const ProjOutcome g = sproj(f, x, s);
  const double fx = g.f_value;
  const std::optional<Vector> ux =
      fx > 0.0 ? std::optional<Vector>(*g.subgradient_used) : std::nullopt;

  std::vector<double> dev(N), fn(N), err(N);
  for (std::size_t n = 1; n <= N; ++n) {
    const FunctionSpec fam = family(n);
    const ProjOutcome gn = sproj(fam, x, s);
    dev[n - 1] = distance(gn.point, g.point);
    fn[n - 1] = gn.f_value;
    double e = std::abs(gn.f_value - fx);
    if (ux) e += distance(subgradient(fam, x, s), *ux);
    err[n - 1] = e;
  }

  const std::size_t tail_begin = N - N / 4;
  SeqVerdict v{SeqCase::Undetermined, std::nullopt, 0.0, std::numeric_limits<double>::infinity(),
               std::nullopt, dev};
  for (std::size_t i = tail_begin; i < N; ++i) v.tail_deviation = std::max(v.tail_deviation, dev[i]);
  for (std::size_t i = tail_begin; i + kRecurrenceWindow <= N; ++i) {
    const double w = *std::max_element(dev.begin() + static_cast<std::ptrdiff_t>(i),
                                       dev.begin() + static_cast<std::ptrdiff_t>(i + kRecurrenceWindow));
    v.recurring_deviation = std::min(v.recurring_deviation, w);
  }

  if (!(fx > 0.0)) {
    const bool eventually_feasible =
        std::all_of(fn.begin() + static_cast<std::ptrdiff_t>(tail_begin), fn.end(),
                    [](double t) { return t <= 0.0; });
    if (eventually_feasible) {
      v.verdict = SeqCase::A;
      v.predicted_convergent = true;
    }
    return v;
  }

  v.gap_bound = fx / ux->norm();
  bool recurring = true;
  for (std::size_t i = 0; i + kRecurrenceWindow <= N && recurring; ++i) {
    recurring = std::any_of(fn.begin() + static_cast<std::ptrdiff_t>(i),
                            fn.begin() + static_cast<std::ptrdiff_t>(i + kRecurrenceWindow),
                            [](double t) { return t <= 0.0; });
  }
  if (recurring) {
    v.verdict = SeqCase::B;
    v.predicted_convergent = false;
    return v;
  }

  // f_n(x) -> f(x) and U_n x -> U x, read off the tail of the combined error.
  bool settling = true;
  for (std::size_t i = tail_begin + 1; i < N; ++i) {
    if (err[i] > err[i - 1]) settling = false;
  }
  const double last = err[N - 1];
  if (settling && (last <= 1e-12 || last <= 0.8 * err[tail_begin])) {
    v.verdict = SeqCase::C;
    v.predicted_convergent = true;
  }
  return v;
}

DistBound dist_bound_check(const FunctionSpec& f, const Vector& x, const SelectionStrategy& s) {
  const double fx = positive_value(f, x);
  const Vector u = nonzero_gradient(f, x, s);
  const auto p = project_level_set(f, x);
  if (!p) fail(ErrorKind::NoLevelSetOracle, "no level-set projection for " + f.describe());
  DistBound b{fx / u.norm(), distance(x, *p), false};
  b.holds = b.lhs <= b.rhs + 1e-9;
  return b;
}

}  // namespace subproj
