#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "subproj/projector.hpp"

namespace subproj {

inline constexpr double kDefaultTol = 1e-8;
inline constexpr std::uint64_t kDefaultMaxIter = 100000;
inline constexpr double kDefaultEpsilon = 0.05;
/// Steps f(x) / ||u||^2 below this abort the run with StalledStep.
inline constexpr double kStallStep = 1e-300;

/// Order in which constraint indices are visited.
///  - Cyclic: 0, 1, ..., m-1, 0, 1, ...
///  - QuasiCyclic: each index i must recur within windows[i] steps; the
///    schedule visits the index that is most overdue relative to its window.
///  - Explicit: the given list, repeated. `windows` may declare the M_i to
///    check; otherwise every index must occur once per pass over the list.
struct ControlSequence {
  enum class Kind { Cyclic, QuasiCyclic, Explicit };

  Kind kind = Kind::Cyclic;
  std::vector<std::size_t> windows;
  std::vector<std::size_t> indices;

  static ControlSequence cyclic() { return {}; }
  static ControlSequence quasi_cyclic(std::vector<std::size_t> windows);
  static ControlSequence explicit_list(std::vector<std::size_t> indices,
                                       std::vector<std::size_t> windows = {});

  friend bool operator==(const ControlSequence&, const ControlSequence&) = default;
};

/// Produces i(0), i(1), ... for a control sequence over m functions.
class ControlCursor {
 public:
  ControlCursor(const ControlSequence& c, std::size_t m);
  std::size_t next();

 private:
  const ControlSequence* c_;
  std::size_t m_;
  std::uint64_t n_ = 0;
  std::vector<std::int64_t> last_;
};

/// The window M_i checked for each index.
std::vector<std::size_t> control_windows(const ControlSequence& c, std::size_t m);

struct ControlViolation {
  std::size_t index;
  /// First n such that i does not occur in i(n), ..., i(n + length - 1).
  std::uint64_t start;
  std::size_t length;
  friend bool operator==(const ControlViolation&, const ControlViolation&) = default;
};

/// One entry per index with a violating window inside [0, horizon); empty
/// when the sequence is valid over the horizon.
std::vector<ControlViolation> validate_control(const ControlSequence& c, std::size_t m,
                                               std::uint64_t horizon);

/// lambda_n = values[n mod values.size()].
struct Relaxation {
  std::vector<double> values{1.0};

  static Relaxation constant(double lambda) { return Relaxation{{lambda}}; }
  double at(std::uint64_t n) const { return values[n % values.size()]; }

  friend bool operator==(const Relaxation&, const Relaxation&) = default;
};

struct Problem {
  std::size_t dimension = 1;
  std::vector<FunctionSpec> functions;
  /// One per function, or empty for the default strategy everywhere.
  std::vector<SelectionStrategy> selections;
  ControlSequence control;
  Relaxation relaxation;
  double epsilon = kDefaultEpsilon;
  Vector x0 = Vector{0.0};
  double tol = kDefaultTol;
  std::uint64_t max_iter = kDefaultMaxIter;
  std::optional<Vector> feasible_witness;

  const SelectionStrategy& selection(std::size_t i) const;

  friend bool operator==(const Problem&, const Problem&) = default;
};

/// Checks every structural precondition of `solve`.
void validate_problem(const Problem& p);

/// max_i max(f_i(x), 0)
double residual(const Problem& p, const Vector& x);

enum class SolveStatus { Converged, MaxIterReached };
std::string_view to_string(SolveStatus s);

struct TraceRow {
  std::uint64_t n;
  std::size_t index;
  double lambda;
  /// Residual of x_{n+1}.
  double residual;
  /// ||x_{n+1} - x_n||
  double step_norm;
  /// ||x_{n+1} - witness||
  std::optional<double> dist_to_witness;
};

struct SolveTrace {
  std::vector<TraceRow> rows;
  SolveStatus status = SolveStatus::MaxIterReached;
  Vector x_final = Vector{0.0};
  double initial_residual = 0.0;
  double final_residual = 0.0;
  std::optional<double> initial_dist_to_witness;
};

struct SolveResult {
  Vector x;
  SolveTrace trace;
};

/// x_{n+1} = x_n + lambda_n (G_{f_i(n)} x_n - x_n) until the residual is <= tol.
SolveResult solve(const Problem& p);

}  // namespace subproj
