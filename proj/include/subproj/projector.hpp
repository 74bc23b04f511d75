#pragma once

#include <optional>
#include <vector>

#include "subproj/functions.hpp"

namespace subproj {

enum class ProjStatus { Fixed, Projected };

std::string_view to_string(ProjStatus s);

struct ProjOutcome {
  Vector point;
  ProjStatus status;
  double f_value;
  /// Present iff status == Projected.
  std::optional<Vector> subgradient_used;
};

/// Projection of x onto H_u = {y : <y - x, u> + fx <= 0}; x itself when fx <= 0.
Vector halfspace_project(const Vector& x, const Vector& u, double fx);

/// G_f^U x for the selection U given by `s`. The test f(x) <= 0 is exact.
ProjOutcome sproj(const FunctionSpec& f, const Vector& x,
                  const SelectionStrategy& s = SelectionStrategy());

/// Images of x under the halfspace projections for k sampled subgradients.
/// Returns {x} when f(x) <= 0.
std::vector<Vector> sproj_set(const FunctionSpec& f, const Vector& x, std::size_t k);

/// (1 - lambda) x + lambda p, lambda in [0, 2].
Vector relax(const Vector& x, const Vector& p, double lambda);

/// <y - Gx, x - Gx>; nonpositive for every y with f(y) <= 0.
double classT_witness(const FunctionSpec& f, const Vector& x, const Vector& y,
                      const SelectionStrategy& s = SelectionStrategy());

/// ||x - y||^2 - ||x - p||^2 - ||p - y||^2
double fejer_gap(const Vector& x, const Vector& p, const Vector& y);

}  // namespace subproj
