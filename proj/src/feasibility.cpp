#include "subproj/feasibility.hpp"

#include <algorithm>
#include <cmath>

#include "overloaded.hpp"

namespace subproj {

using detail::Overloaded;

ControlSequence ControlSequence::quasi_cyclic(std::vector<std::size_t> windows) {
  ControlSequence c;
  c.kind = Kind::QuasiCyclic;
  c.windows = std::move(windows);
  return c;
}

ControlSequence ControlSequence::explicit_list(std::vector<std::size_t> indices,
                                               std::vector<std::size_t> windows) {
  ControlSequence c;
  c.kind = Kind::Explicit;
  c.indices = std::move(indices);
  c.windows = std::move(windows);
  return c;
}

std::vector<std::size_t> control_windows(const ControlSequence& c, std::size_t m) {
  if (m == 0) fail(ErrorKind::InvalidControl, "no functions to control");
  switch (c.kind) {
    case ControlSequence::Kind::Cyclic:
      return std::vector<std::size_t>(m, m);
    case ControlSequence::Kind::QuasiCyclic:
      if (c.windows.size() != m) {
        fail(ErrorKind::InvalidControl, "quasi-cyclic control needs one window per function");
      }
      break;
    case ControlSequence::Kind::Explicit:
      if (c.indices.empty()) fail(ErrorKind::InvalidControl, "explicit control list is empty");
      for (std::size_t i : c.indices) {
        if (i >= m) fail(ErrorKind::InvalidControl, "control index " + std::to_string(i) + " out of range");
      }
      if (c.windows.empty()) return std::vector<std::size_t>(m, c.indices.size());
      if (c.windows.size() != m) {
        fail(ErrorKind::InvalidControl, "declared windows must match the function count");
      }
      break;
  }
  for (std::size_t w : c.windows) {
    if (w == 0) fail(ErrorKind::InvalidControl, "control windows must be >= 1");
  }
  return c.windows;
}

ControlCursor::ControlCursor(const ControlSequence& c, std::size_t m) : c_(&c), m_(m) {
  control_windows(c, m);
  last_.assign(m, -1);
}

std::size_t ControlCursor::next() {
  const std::uint64_t n = n_++;
  switch (c_->kind) {
    case ControlSequence::Kind::Cyclic:
      return static_cast<std::size_t>(n % m_);
    case ControlSequence::Kind::Explicit:
      return c_->indices[n % c_->indices.size()];
    case ControlSequence::Kind::QuasiCyclic: {
      // Most urgent index relative to its window: largest (n - last_i) / M_i,
      // then longest idle, then lowest index.
      const auto idle = [&](std::size_t i) { return static_cast<std::int64_t>(n) - last_[i]; };
      std::size_t best = 0;
      for (std::size_t i = 1; i < m_; ++i) {
        const auto lhs = idle(i) * static_cast<std::int64_t>(c_->windows[best]);
        const auto rhs = idle(best) * static_cast<std::int64_t>(c_->windows[i]);
        if (lhs > rhs || (lhs == rhs && idle(i) > idle(best))) best = i;
      }
      last_[best] = static_cast<std::int64_t>(n);
      return best;
    }
  }
  return 0;
}

std::vector<ControlViolation> validate_control(const ControlSequence& c, std::size_t m,
                                               std::uint64_t horizon) {
  const auto windows = control_windows(c, m);
  ControlCursor cursor(c, m);
  // A window [s, s + M) misses i iff it fits between two consecutive visits.
  std::vector<std::int64_t> last(m, -1);
  std::vector<std::optional<ControlViolation>> found(m);
  auto check_gap = [&](std::size_t i, std::int64_t next_visit) {
    if (found[i]) return;
    const auto start = static_cast<std::uint64_t>(last[i] + 1);
    if (static_cast<std::uint64_t>(next_visit) >= start + windows[i]) {
      found[i] = ControlViolation{i, start, windows[i]};
    }
  };
  for (std::uint64_t n = 0; n < horizon; ++n) {
    const std::size_t i = cursor.next();
    check_gap(i, static_cast<std::int64_t>(n));
    last[i] = static_cast<std::int64_t>(n);
  }
  for (std::size_t i = 0; i < m; ++i) check_gap(i, static_cast<std::int64_t>(horizon));
  std::vector<ControlViolation> out;
  for (auto& v : found) {
    if (v) out.push_back(*v);
  }
  return out;
}

const SelectionStrategy& Problem::selection(std::size_t i) const {
  static const SelectionStrategy kDefault;
  return selections.empty() ? kDefault : selections.at(i);
}

namespace {

bool whole_domain(const FunctionSpec& f) {
  return std::visit(
      Overloaded{
          [](const nodes::NegLog&) { return false; },
          [](const nodes::SqrtShift&) { return false; },
          [](const nodes::Indicator&) { return false; },
          [](const nodes::Scale& n) { return whole_domain(n.f); },
          [](const nodes::PowerComp& n) { return whole_domain(n.f); },
          [](const nodes::LeftCompose& n) { return whole_domain(n.f); },
          [](const nodes::RightLinear& n) { return whole_domain(n.f); },
          [](const nodes::ConvexComb& n) { return whole_domain(n.f) && whole_domain(n.g); },
          [](const nodes::SumPair& n) { return whole_domain(n.f) && whole_domain(n.g); },
          [](const nodes::Offset& n) { return whole_domain(n.f); },
          [](const auto&) { return true; },
      },
      f.node().v);
}

}  // namespace

void validate_problem(const Problem& p) {
  if (p.dimension < 1) fail(ErrorKind::InvalidArgument, "dimension must be >= 1");
  if (p.functions.empty()) fail(ErrorKind::InvalidArgument, "at least one function is required");
  for (std::size_t i = 0; i < p.functions.size(); ++i) {
    if (p.functions[i].dim() != p.dimension) {
      fail(ErrorKind::DimensionMismatch, "function " + std::to_string(i) + " has the wrong dimension");
    }
    if (!whole_domain(p.functions[i])) {
      fail(ErrorKind::InvalidArgument,
           "function " + std::to_string(i) + " is not finite on the whole space");
    }
  }
  if (!p.selections.empty() && p.selections.size() != p.functions.size()) {
    fail(ErrorKind::InvalidArgument, "selections must list one strategy per function");
  }
  require_dim(p.x0, p.dimension, "x0");
  if (!(p.epsilon > 0.0 && p.epsilon <= 1.0)) {
    fail(ErrorKind::InvalidArgument, "epsilon must lie in (0, 1]");
  }
  if (p.relaxation.values.empty()) fail(ErrorKind::InvalidArgument, "relaxation schedule is empty");
  for (double l : p.relaxation.values) {
    if (!(l >= p.epsilon && l <= 2.0 - p.epsilon)) {
      fail(ErrorKind::RelaxationOutOfRange,
           "relaxation " + std::to_string(l) + " is outside [epsilon, 2 - epsilon]");
    }
  }
  if (!(p.tol > 0.0) || !std::isfinite(p.tol)) fail(ErrorKind::InvalidArgument, "tol must be positive");
  if (p.max_iter < 1) fail(ErrorKind::InvalidArgument, "max_iter must be >= 1");
  const auto windows = control_windows(p.control, p.functions.size());
  const std::uint64_t horizon =
      std::max<std::uint64_t>(p.max_iter, *std::max_element(windows.begin(), windows.end()));
  const auto violations = validate_control(p.control, p.functions.size(), horizon);
  if (!violations.empty()) {
    const auto& v = violations.front();
    fail(ErrorKind::InvalidControl, "index " + std::to_string(v.index) + " missing from window [" +
                                        std::to_string(v.start) + ", " +
                                        std::to_string(v.start + v.length) + ")");
  }
  if (p.feasible_witness) {
    require_dim(*p.feasible_witness, p.dimension, "feasible_witness");
    if (residual(p, *p.feasible_witness) > 0.0) {
      fail(ErrorKind::InfeasibleWitness, "the designated witness violates a constraint");
    }
  }
}

double residual(const Problem& p, const Vector& x) {
  double r = 0.0;
  for (const auto& f : p.functions) {
    const ExtReal v = eval(f, x);
    if (!v.is_finite()) fail(ErrorKind::DomainError, "f_i(x) = +inf at " + to_string(x));
    r = std::max(r, v.value());
  }
  return r;
}

std::string_view to_string(SolveStatus s) {
  return s == SolveStatus::Converged ? "Converged" : "MaxIterReached";
}

SolveResult solve(const Problem& p) {
  validate_problem(p);
  SolveTrace trace;
  Vector x = p.x0;
  trace.initial_residual = residual(p, x);
  if (p.feasible_witness) trace.initial_dist_to_witness = distance(x, *p.feasible_witness);
  double r = trace.initial_residual;
  ControlCursor cursor(p.control, p.functions.size());
  for (std::uint64_t n = 0; n < p.max_iter && r > p.tol; ++n) {
    const std::size_t i = cursor.next();
    const double lambda = p.relaxation.at(n);
    const ProjOutcome out = sproj(p.functions[i], x, p.selection(i));
    if (out.status == ProjStatus::Projected &&
        out.f_value / out.subgradient_used->squared_norm() < kStallStep) {
      fail(ErrorKind::StalledStep, "step length underflow at iteration " + std::to_string(n));
    }
    Vector next = relax(x, out.point, lambda);
    r = residual(p, next);
    TraceRow row{n, i, lambda, r, distance(next, x), std::nullopt};
    if (p.feasible_witness) row.dist_to_witness = distance(next, *p.feasible_witness);
    trace.rows.push_back(row);
    x = std::move(next);
  }
  trace.status = r <= p.tol ? SolveStatus::Converged : SolveStatus::MaxIterReached;
  trace.final_residual = r;
  trace.x_final = x;
  return SolveResult{std::move(x), std::move(trace)};
}

}  // namespace subproj
