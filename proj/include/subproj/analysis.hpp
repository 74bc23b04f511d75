#pragma once

#include <functional>
#include <optional>
#include <utility>
#include <vector>

#include "subproj/projector.hpp"

namespace subproj {

/// x -> G_f x as a plain map (for finite differences and quotient sampling).
VectorMap sproj_map(const FunctionSpec& f, const SelectionStrategy& s = SelectionStrategy());

/// Jacobian of G_f at x with f(x) > 0 and f twice differentiable near x:
/// I - g g^T / |g|^2 - f / |g|^2 H + 2 f / |g|^4 g (g^T H).
Matrix sproj_jacobian(const FunctionSpec& f, const Vector& x);

/// 1D derivative of G_f: 1 where f < 0, f'' f / f'^2 where f > 0.
double sproj_deriv_1d(const FunctionSpec& f, double x);

/// Lipschitz bound of G_f on the sample set: max{1, sup f / inf f'^2 beta}
/// in 1D, 2 + 3 sup|f| / inf |grad f|^2 beta otherwise.
double lipschitz_bound(const FunctionSpec& f, const std::vector<Vector>& omega, double beta);

/// Largest ||Gx - Gy|| / ||x - y|| over distinct pairs of the sample set.
double max_difference_quotient(const FunctionSpec& f, const std::vector<Vector>& omega);

struct MonotonicityReport {
  /// min over pairs of <Gx - Gy, x - y>
  double worst;
  /// min over pairs with f(x) > 0 and f(y) > 0 of
  /// ||x - y||^2 - <x - y, f(x) Inv u - f(y) Inv v>; nullopt without such pairs.
  std::optional<double> worst_inverse_form;
  std::size_t pairs;
};

MonotonicityReport monotonicity_probe(const FunctionSpec& f,
                                      const std::vector<std::pair<Vector, Vector>>& pairs,
                                      const SelectionStrategy& s = SelectionStrategy());

using FunctionFamily = std::function<FunctionSpec(std::size_t)>;

/// n -> Scale{1 + 1/n, f}
FunctionFamily scale_family(const FunctionSpec& f);
/// n -> f - 1/n
FunctionFamily harmonic_shift_family(const FunctionSpec& f);
/// n -> f - 2^(-n/8)
FunctionFamily geometric_shift_family(const FunctionSpec& f);
/// n -> f - 2 f(x) for even n, f for odd n.
FunctionFamily alternating_family(const FunctionSpec& f, const Vector& x);

enum class SeqCase {
  /// f(x) <= 0 and f_n(x) <= 0 over the tail: G_{f_n} x -> G_f x.
  A,
  /// f(x) > 0 and f_n(x) <= 0 in every window of 4 indices: no convergence.
  B,
  /// f(x) > 0, f_n(x) -> f(x) and U_n x -> U x: G_{f_n} x -> G_f x.
  C,
  Undetermined,
};

std::string_view to_string(SeqCase c);

/// Window length used to decide "infinitely often".
inline constexpr std::size_t kRecurrenceWindow = 4;

struct SeqVerdict {
  SeqCase verdict;
  /// true: converges, false: diverges, nullopt: the premises decide nothing.
  std::optional<bool> predicted_convergent;
  /// max of ||G_{f_n} x - G_f x|| over the last N/4 indices.
  double tail_deviation;
  /// min over windows of 4 in the tail of the largest deviation in the window.
  double recurring_deviation;
  /// f(x) / ||Ux|| when f(x) > 0.
  std::optional<double> gap_bound;
  /// ||G_{f_n} x - G_f x|| for n = 1..N.
  std::vector<double> deviations;
};

SeqVerdict seq_lab(const FunctionFamily& family, const FunctionSpec& f, const Vector& x,
                   std::size_t N = 1000, const SelectionStrategy& s = SelectionStrategy());

struct DistBound {
  /// f(x) / ||u||
  double lhs;
  /// distance from x to lev<=0 f
  double rhs;
  bool holds;
};

DistBound dist_bound_check(const FunctionSpec& f, const Vector& x,
                           const SelectionStrategy& s = SelectionStrategy());

}  // namespace subproj
