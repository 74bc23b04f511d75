#pragma once

#include "subproj/functions.hpp"

namespace subproj {

/// Whether prox_{gamma f} has a closed form here: Indicator, NormPow{1},
/// NormPow{2}, Linear, and positive scalings of those.
bool is_prox_friendly(const FunctionSpec& f);

/// Unique minimizer of f(y) + ||x - y||^2 / (2 gamma). The result is audited
/// against random competitors. Throws UnsupportedAtom for other specs.
Vector prox(const FunctionSpec& f, double gamma, const Vector& x);

/// gamma-Moreau envelope: f(p) + ||x - p||^2 / (2 gamma), p = prox_{gamma f} x.
double moreau_value(const FunctionSpec& f, double gamma, const Vector& x);

/// Gradient of the Moreau envelope, (x - prox_{gamma f} x) / gamma.
Vector moreau_gradient(const FunctionSpec& f, double gamma, const Vector& x);

/// Subgradient projector of the Moreau envelope (single-valued):
/// x if the envelope is <= 0, else x - gamma e(x) / ||x - p||^2 (x - p).
Vector sproj_moreau(const FunctionSpec& f, double gamma, const Vector& x);

}  // namespace subproj
