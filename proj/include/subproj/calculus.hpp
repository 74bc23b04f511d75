#pragma once

#include <optional>

#include "subproj/projector.hpp"

namespace subproj {

/// G_{lambda f} computed through Scale{lambda, f}; equal to G_f.
ProjOutcome sproj_scale(double lambda, const FunctionSpec& f, const Vector& x,
                        const SelectionStrategy& s = SelectionStrategy());

/// G_{phi o f} x = x + phi(f(x)) / (f(x) phi'(f(x))) (G_f x - x) for f(x) > 0.
Vector sproj_leftcompose(const PhiPair& phi, const FunctionSpec& f, const Vector& x);

/// G_{f^(1/alpha)} = (1 - alpha) Id + alpha G_f, for f >= 0.
Vector sproj_power(double alpha, const FunctionSpec& f, const Vector& x,
                   const SelectionStrategy& s = SelectionStrategy());

/// (1/alpha) L^T G_f(L y) for L^T L = L L^T = alpha I.
Vector sproj_rightlinear(const Matrix& L, const FunctionSpec& f, const Vector& y,
                         const SelectionStrategy& s = SelectionStrategy());

/// Row of the convex-combination case table, selected by the signs of
/// f(x), g(x) and h(x) = alpha f(x) + (1 - alpha) g(x).
enum class CombCase {
  BothFeasible,         // f <= 0, g <= 0
  SameSign,             // f g >= 0 otherwise: plain convex combination
  FFeasibleHFeasible,   // f <= 0 < g, h <= 0
  FFeasibleHPositive,   // f <= 0 < g, h > 0
  GFeasibleHFeasible,   // g <= 0 < f, h <= 0
  GFeasibleHPositive,   // g <= 0 < f, h > 0
};

std::string_view to_string(CombCase c);
CombCase classify_convexcomb(double alpha, double fx, double gx);

struct CombProjection {
  Vector point;
  CombCase row;
  /// alpha G_f x + (1 - alpha) G_g x under the joint selection.
  Vector convex_combination;
};

/// Projector of alpha f + (1 - alpha) g under the joint selection U.
CombProjection sproj_convexcomb_detail(double alpha, const FunctionSpec& f, const FunctionSpec& g,
                                       const JointSelection& joint, const Vector& x);
Vector sproj_convexcomb(double alpha, const FunctionSpec& f, const FunctionSpec& g,
                        const JointSelection& joint, const Vector& x);

/// Projector of f + g under the selection 2U: the mean of the two projections,
/// plus min(|f|, |g|) / (2 ||U||^2) U when f(x) g(x) < 0.
Vector sproj_sum(const FunctionSpec& f, const FunctionSpec& g, const JointSelection& joint,
                 const Vector& x);

struct InfConvProjection {
  Vector point;
  /// G_f(Mx) + G_g(x - Mx); equals `point` iff f(Mx) g(x - Mx) >= 0.
  Vector split;
  double f_at_m;
  double g_at_rest;
};

/// Projector of the exact inf-convolution f [] g, x - [f(Mx) + g(x - Mx)]^+ / ||Ux||^2 Ux.
InfConvProjection sproj_infconv_detail(const FunctionSpec& f, const FunctionSpec& g,
                                       const MinimizerOracle& m, const JointSelection& joint,
                                       const Vector& x);
Vector sproj_infconv(const FunctionSpec& f, const FunctionSpec& g, const MinimizerOracle& m,
                     const JointSelection& joint, const Vector& x);

struct AccelerationReport {
  /// f(x) / ||grad f(x)|| (1 - 1/alpha)
  double gap;
  /// ||x - G_f x|| - ||x - G_{f^alpha} x||
  double direct_gap;
  /// ||G_f x - P x|| and ||G_{f^alpha} x - P x|| when lev<=0 f has a projection.
  std::optional<double> companion_lhs;
  std::optional<double> companion_rhs;
};

AccelerationReport acceleration_report(const FunctionSpec& f, double alpha, const Vector& x);
double acceleration_gap(const FunctionSpec& f, double alpha, const Vector& x);

}  // namespace subproj
