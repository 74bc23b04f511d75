#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "subproj/core.hpp"
#include "subproj/sets.hpp"

namespace subproj {

/// Tolerance for calling an AffineMax piece active: value >= max - tol * (1 + |max|).
inline constexpr double kActiveTol = 1e-12;
/// Values of a PowerComp base below -kNegativeBaseTol are rejected.
inline constexpr double kNegativeBaseTol = 1e-12;

/// Rule for choosing u in the subdifferential at kinks. Deterministic.
class SelectionStrategy {
 public:
  enum class Rule { LeastIndexActive, CentroidActive, EndpointK };

  static SelectionStrategy least_index() { return SelectionStrategy(Rule::LeastIndexActive, 0); }
  static SelectionStrategy centroid() { return SelectionStrategy(Rule::CentroidActive, 0); }
  /// k-th active piece (wraps modulo the number of active pieces).
  static SelectionStrategy endpoint(std::size_t k) { return SelectionStrategy(Rule::EndpointK, k); }

  SelectionStrategy() = default;

  Rule rule() const noexcept { return rule_; }
  std::size_t k() const noexcept { return k_; }

  friend bool operator==(const SelectionStrategy&, const SelectionStrategy&) = default;

 private:
  SelectionStrategy(Rule rule, std::size_t k) : rule_(rule), k_(k) {}
  Rule rule_ = Rule::LeastIndexActive;
  std::size_t k_ = 0;
};

std::string to_string(const SelectionStrategy& s);
/// Accepts "least_index", "centroid", "endpoint:<k>".
SelectionStrategy parse_selection(const std::string& text);

/// Scalar outer function for LeftCompose: phi, its derivative, and the
/// interval on which phi is declared strictly increasing. Builtins carry a
/// name and parameters so that they can be serialized and compared.
struct PhiPair {
  std::string name;
  std::vector<double> params;
  std::function<double(double)> phi;
  std::function<double(double)> dphi;
  double increasing_lo = 0.0;
  double increasing_hi = 0.0;
};

PhiPair phi_identity();
/// t -> t^3
PhiPair phi_cube();
/// t -> |t|^a, increasing on [0, +inf)
PhiPair phi_abs_power(double a);

/// Selection of the joint subdifferential of two functions; returns nullopt
/// outside its domain.
struct JointSelection {
  std::string name;
  std::vector<double> params;
  std::function<std::optional<Vector>(const Vector&)> select;
};

/// U for d_{rB} and d_{r'B} (r < r'): 0 on rB, x/||x|| outside r'B.
JointSelection concentric_balls_selection(double r, double r_outer);
/// Constant u, valid for pairs of affine functions sharing the gradient u.
JointSelection common_gradient_selection(Vector u);

/// Minimizer oracle M of y -> f(y) + g(x - y) for an inf-convolution.
struct MinimizerOracle {
  std::string name;
  std::vector<double> params;
  std::function<Vector(const Vector&)> argmin;
};

struct Node;

/// Immutable description of a convex function on R^dim: an atom from the
/// catalog or a combinator applied to other specs. Cheap to copy.
class FunctionSpec {
 public:
  explicit FunctionSpec(std::shared_ptr<const Node> node);

  std::size_t dim() const noexcept { return dim_; }
  const Node& node() const noexcept { return *node_; }
  std::string describe() const;

  friend bool operator==(const FunctionSpec& a, const FunctionSpec& b);

 private:
  std::shared_ptr<const Node> node_;
  std::size_t dim_;
};

struct AffinePiece {
  Vector a;
  double b;
  friend bool operator==(const AffinePiece&, const AffinePiece&) = default;
};

namespace nodes {

struct Linear { Vector u; };
struct Dist { SetSpec set; };
struct SqDist { SetSpec set; };
struct NormPow { double p; std::size_t dim; };
struct NegLog {};
struct SqrtShift { double eta; };
struct Hyperbolic { double eta; };
struct AffineMax { std::vector<AffinePiece> pieces; };
struct Indicator { SetSpec set; };
struct Scale { double lambda; FunctionSpec f; };
struct PowerComp { double alpha; FunctionSpec f; bool certified_nonnegative; };
struct LeftCompose { PhiPair phi; FunctionSpec f; };
struct RightLinear { Matrix L; double alpha; FunctionSpec f; };
struct ConvexComb { double alpha; FunctionSpec f; FunctionSpec g; JointSelection joint; };
struct SumPair { FunctionSpec f; FunctionSpec g; JointSelection joint; };
struct MoreauEnv { double gamma; FunctionSpec f; };
struct InfConv { FunctionSpec f; FunctionSpec g; MinimizerOracle minimizer; JointSelection joint; };
struct Offset { double c; FunctionSpec f; };

}  // namespace nodes

struct Node {
  using Variant = std::variant<nodes::Linear, nodes::Dist, nodes::SqDist, nodes::NormPow,
                               nodes::NegLog, nodes::SqrtShift, nodes::Hyperbolic,
                               nodes::AffineMax, nodes::Indicator, nodes::Scale,
                               nodes::PowerComp, nodes::LeftCompose, nodes::RightLinear,
                               nodes::ConvexComb, nodes::SumPair, nodes::MoreauEnv,
                               nodes::InfConv, nodes::Offset>;
  Variant v;
};

// Atoms.
FunctionSpec linear(Vector u);
FunctionSpec dist(SetSpec set);
FunctionSpec sq_dist(SetSpec set);
/// ||x||^p, p >= 1.
FunctionSpec norm_pow(double p, std::size_t dim);
/// -ln x on x > 0, +inf otherwise.
FunctionSpec neg_log();
/// eta - sqrt(x) on x > 0, +inf otherwise.
FunctionSpec sqrt_shift(double eta);
/// sqrt(1 + x^2) - eta, eta > 1.
FunctionSpec hyperbolic(double eta);
/// max_i <x, a_i> + b_i
FunctionSpec affine_max(std::vector<AffinePiece> pieces);
FunctionSpec indicator(SetSpec set);

// Combinators.
FunctionSpec scale(double lambda, FunctionSpec f);
/// f^(1/alpha) for f >= 0.
FunctionSpec power_comp(double alpha, FunctionSpec f);
FunctionSpec left_compose(PhiPair phi, FunctionSpec f);
/// f o L with L^T L = L L^T = alpha I.
FunctionSpec right_linear(Matrix L, FunctionSpec f);
/// alpha f + (1 - alpha) g with a selection of the joint subdifferential.
FunctionSpec convex_comb(double alpha, FunctionSpec f, FunctionSpec g, JointSelection joint);
/// f + g; its selection is 2U.
FunctionSpec sum_pair(FunctionSpec f, FunctionSpec g, JointSelection joint);
FunctionSpec moreau_env(double gamma, FunctionSpec f);
FunctionSpec inf_conv(FunctionSpec f, FunctionSpec g, MinimizerOracle minimizer,
                      JointSelection joint);
/// f + c
FunctionSpec offset(double c, FunctionSpec f);

/// f inf-convolved with ||.||^2 / (2 gamma), with M = prox_{gamma f} and the
/// joint selection (x - prox_{gamma f} x) / gamma. f must be prox-friendly.
FunctionSpec moreau_inf_conv(FunctionSpec f, double gamma);

/// Returns the scaled-orthogonality factor alpha of L, or throws NotScaledOrthogonal.
double scaled_orthogonal_factor(const Matrix& L, double tol = 1e-10);

// Oracles.
ExtReal eval(const FunctionSpec& f, const Vector& x);
Vector subgradient(const FunctionSpec& f, const Vector& x,
                   const SelectionStrategy& s = SelectionStrategy());
std::vector<Vector> subdifferential_sample(const FunctionSpec& f, const Vector& x,
                                           std::size_t k);
Matrix hessian(const FunctionSpec& f, const Vector& x);

/// Whether f is Frechet differentiable at x (decidable for the catalog).
bool differentiable_at(const FunctionSpec& f, const Vector& x);

/// Metric projection onto lev<=0 f where it has a closed form.
std::optional<Vector> project_level_set(const FunctionSpec& f, const Vector& x);

/// True when a bare Indicator appears outside a MoreauEnv or InfConv.
bool has_bare_indicator(const FunctionSpec& f);

/// Checks value(candidate) <= value(y) + tol for deterministic pseudo-random
/// competitors y around the candidate. Throws InconsistentMinimizer on failure.
void audit_minimizer(const std::function<ExtReal(const Vector&)>& objective,
                     const Vector& candidate, const Vector& reference, double tol,
                     const std::string& what, int competitors = 8);

}  // namespace subproj
