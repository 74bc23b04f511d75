#include "subproj/functions.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <sstream>

#include "overloaded.hpp"
#include "subproj/prox.hpp"

namespace subproj {

using detail::Overloaded;

namespace {

std::size_t node_dim(const Node& n) {
  return std::visit(
      Overloaded{
          [](const nodes::Linear& a) { return a.u.dim(); },
          [](const nodes::Dist& a) { return a.set.dim(); },
          [](const nodes::SqDist& a) { return a.set.dim(); },
          [](const nodes::NormPow& a) { return a.dim; },
          [](const nodes::NegLog&) -> std::size_t { return 1; },
          [](const nodes::SqrtShift&) -> std::size_t { return 1; },
          [](const nodes::Hyperbolic&) -> std::size_t { return 1; },
          [](const nodes::AffineMax& a) { return a.pieces.front().a.dim(); },
          [](const nodes::Indicator& a) { return a.set.dim(); },
          [](const nodes::Scale& a) { return a.f.dim(); },
          [](const nodes::PowerComp& a) { return a.f.dim(); },
          [](const nodes::LeftCompose& a) { return a.f.dim(); },
          [](const nodes::RightLinear& a) { return static_cast<std::size_t>(a.L.cols()); },
          [](const nodes::ConvexComb& a) { return a.f.dim(); },
          [](const nodes::SumPair& a) { return a.f.dim(); },
          [](const nodes::MoreauEnv& a) { return a.f.dim(); },
          [](const nodes::InfConv& a) { return a.f.dim(); },
          [](const nodes::Offset& a) { return a.f.dim(); },
      },
      n.v);
}

FunctionSpec make(Node::Variant v) {
  return FunctionSpec(std::make_shared<const Node>(Node{std::move(v)}));
}

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v)) {
    fail(ErrorKind::InvalidArgument, std::string(what) + " must be a positive real");
  }
}

double scalar(const Vector& x) { return x[0]; }

Vector vec1(double v) { return Vector{v}; }

/// Indices of the pieces within kActiveTol of the maximum.
std::vector<std::size_t> active_pieces(const nodes::AffineMax& am, const Vector& x) {
  std::vector<double> vals;
  vals.reserve(am.pieces.size());
  for (const auto& p : am.pieces) vals.push_back(x.dot(p.a) + p.b);
  const double mx = *std::max_element(vals.begin(), vals.end());
  const double cut = mx - kActiveTol * (1.0 + std::abs(mx));
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < vals.size(); ++i) {
    if (vals[i] >= cut) active.push_back(i);
  }
  return active;
}

/// Distinct gradients of the active pieces, in piece order.
std::vector<Vector> active_vertices(const nodes::AffineMax& am, const Vector& x) {
  std::vector<Vector> out;
  for (std::size_t i : active_pieces(am, x)) {
    const Vector& a = am.pieces[i].a;
    if (std::find(out.begin(), out.end(), a) == out.end()) out.push_back(a);
  }
  return out;
}

/// Members of the convex hull of `vertices`: vertices first, then edge
/// midpoints, the centroid, then dyadic refinements along each edge.
std::vector<Vector> hull_samples(const std::vector<Vector>& vertices, std::size_t k) {
  std::vector<Vector> out;
  auto push = [&](const Vector& v) {
    if (out.size() < k && std::find(out.begin(), out.end(), v) == out.end()) out.push_back(v);
  };
  for (const auto& v : vertices) push(v);
  const std::size_t m = vertices.size();
  for (std::size_t i = 0; i < m && out.size() < k; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) push(lerp(vertices[i], vertices[j], 0.5));
  }
  if (m > 2) {
    Vector c = Vector::zeros(vertices.front().dim());
    for (const auto& v : vertices) c = c + v;
    push(c / static_cast<double>(m));
  }
  for (int level = 2; level <= 52 && out.size() < k; ++level) {
    const double denom = std::ldexp(1.0, level);
    const auto count = static_cast<std::uint64_t>(denom);
    for (std::size_t i = 0; i < m && out.size() < k; ++i) {
      for (std::size_t j = i + 1; j < m && out.size() < k; ++j) {
        for (std::uint64_t num = 1; num < count && out.size() < k; num += 2) {
          push(lerp(vertices[i], vertices[j], static_cast<double>(num) / denom));
        }
      }
    }
  }
  return out;
}

bool strictly_inside(const SetSpec& s, const Vector& x) {
  return std::visit(
      Overloaded{
          [&](const Ball& b) { return distance(x, b.center) < b.radius; },
          [&](const Halfspace& h) { return x.dot(h.normal) < h.offset; },
          [&](const Box& b) {
            return (x.values().array() > b.lo.values().array()).all() &&
                   (x.values().array() < b.hi.values().array()).all();
          },
          [&](const Point&) { return false; },
      },
      s.shape());
}

double finite_value(const FunctionSpec& f, const Vector& x, const char* where) {
  const ExtReal v = eval(f, x);
  if (!v.is_finite()) fail(ErrorKind::DomainError, std::string(where) + ": f(x) = +inf");
  return v.value();
}

double power_base(const nodes::PowerComp& pc, const Vector& x, ExtReal v) {
  const double b = v.value();
  if (b < -kNegativeBaseTol) {
    fail(ErrorKind::NegativeBaseError, "PowerComp base is negative: " + std::to_string(b));
  }
  (void)pc;
  (void)x;
  return std::max(b, 0.0);
}

Vector joint_or_throw(const JointSelection& joint, const Vector& x) {
  auto u = joint.select(x);
  if (!u) {
    fail(ErrorKind::JointSelectionUnavailable,
         "joint selection '" + joint.name + "' is undefined at " + to_string(x));
  }
  return *u;
}

bool same_callable(const std::string& na, const std::vector<double>& pa, const std::string& nb,
                   const std::vector<double>& pb) {
  return !na.empty() && na == nb && pa == pb;
}

std::string set_text(const SetSpec& s) {
  return std::visit(
      Overloaded{
          [](const Ball& b) {
            return "Ball(" + to_string(b.center) + ", " + std::to_string(b.radius) + ")";
          },
          [](const Halfspace& h) {
            return "Halfspace(" + to_string(h.normal) + ", " + std::to_string(h.offset) + ")";
          },
          [](const Box& b) { return "Box(" + to_string(b.lo) + ", " + to_string(b.hi) + ")"; },
          [](const Point& p) { return "Point(" + to_string(p.c) + ")"; },
      },
      s.shape());
}

}  // namespace

// ---------------------------------------------------------------------------
// Selection strategies and builtin callables

std::string to_string(const SelectionStrategy& s) {
  switch (s.rule()) {
    case SelectionStrategy::Rule::LeastIndexActive: return "least_index";
    case SelectionStrategy::Rule::CentroidActive: return "centroid";
    case SelectionStrategy::Rule::EndpointK: return "endpoint:" + std::to_string(s.k());
  }
  return "least_index";
}

SelectionStrategy parse_selection(const std::string& text) {
  if (text == "least_index") return SelectionStrategy::least_index();
  if (text == "centroid") return SelectionStrategy::centroid();
  const std::string prefix = "endpoint:";
  if (text.rfind(prefix, 0) == 0) {
    const std::string digits = text.substr(prefix.size());
    if (!digits.empty() && std::all_of(digits.begin(), digits.end(), ::isdigit)) {
      return SelectionStrategy::endpoint(std::stoul(digits));
    }
  }
  fail(ErrorKind::SchemaError, "unknown selection strategy '" + text + "'");
}

PhiPair phi_identity() {
  return PhiPair{"identity", {}, [](double t) { return t; }, [](double) { return 1.0; },
                 -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
}

PhiPair phi_cube() {
  return PhiPair{"cube", {}, [](double t) { return t * t * t; },
                 [](double t) { return 3.0 * t * t; }, -std::numeric_limits<double>::infinity(),
                 std::numeric_limits<double>::infinity()};
}

PhiPair phi_abs_power(double a) {
  require_positive(a, "phi exponent");
  return PhiPair{"abs_power",
                 {a},
                 [a](double t) { return std::pow(std::abs(t), a); },
                 [a](double t) {
                   if (t == 0.0) return a > 1.0 ? 0.0 : (a == 1.0 ? 1.0 : 0.0);
                   return a * std::pow(std::abs(t), a - 1.0) * (t > 0 ? 1.0 : -1.0);
                 },
                 0.0, std::numeric_limits<double>::infinity()};
}

JointSelection concentric_balls_selection(double r, double r_outer) {
  require_positive(r, "inner radius");
  if (!(r_outer > r)) fail(ErrorKind::InvalidArgument, "outer radius must exceed inner radius");
  return JointSelection{"concentric_balls",
                        {r, r_outer},
                        [r, r_outer](const Vector& x) -> std::optional<Vector> {
                          const double n = x.norm();
                          if (n <= r) return Vector::zeros(x.dim());
                          if (n >= r_outer) return x / n;
                          return std::nullopt;
                        }};
}

JointSelection common_gradient_selection(Vector u) {
  std::vector<double> params = u.to_std();
  return JointSelection{"common_gradient", std::move(params),
                        [u](const Vector& x) -> std::optional<Vector> {
                          require_same_dim(x, u, "common_gradient");
                          return u;
                        }};
}

// ---------------------------------------------------------------------------
// FunctionSpec

FunctionSpec::FunctionSpec(std::shared_ptr<const Node> node)
    : node_(std::move(node)), dim_(node_dim(*node_)) {}

bool operator==(const FunctionSpec& a, const FunctionSpec& b) {
  if (a.node_ == b.node_) return true;
  if (a.node_->v.index() != b.node_->v.index()) return false;
  return std::visit(
      [&](const auto& lhs) -> bool {
        using T = std::decay_t<decltype(lhs)>;
        const auto& rhs = std::get<T>(b.node_->v);
        if constexpr (std::is_same_v<T, nodes::Linear>) {
          return lhs.u == rhs.u;
        } else if constexpr (std::is_same_v<T, nodes::Dist> || std::is_same_v<T, nodes::SqDist> ||
                             std::is_same_v<T, nodes::Indicator>) {
          return lhs.set == rhs.set;
        } else if constexpr (std::is_same_v<T, nodes::NormPow>) {
          return lhs.p == rhs.p && lhs.dim == rhs.dim;
        } else if constexpr (std::is_same_v<T, nodes::NegLog>) {
          return true;
        } else if constexpr (std::is_same_v<T, nodes::SqrtShift> ||
                             std::is_same_v<T, nodes::Hyperbolic>) {
          return lhs.eta == rhs.eta;
        } else if constexpr (std::is_same_v<T, nodes::AffineMax>) {
          return lhs.pieces == rhs.pieces;
        } else if constexpr (std::is_same_v<T, nodes::Scale>) {
          return lhs.lambda == rhs.lambda && lhs.f == rhs.f;
        } else if constexpr (std::is_same_v<T, nodes::PowerComp>) {
          return lhs.alpha == rhs.alpha && lhs.f == rhs.f;
        } else if constexpr (std::is_same_v<T, nodes::LeftCompose>) {
          return same_callable(lhs.phi.name, lhs.phi.params, rhs.phi.name, rhs.phi.params) &&
                 lhs.f == rhs.f;
        } else if constexpr (std::is_same_v<T, nodes::RightLinear>) {
          return lhs.L.rows() == rhs.L.rows() && lhs.L.cols() == rhs.L.cols() &&
                 lhs.L == rhs.L && lhs.f == rhs.f;
        } else if constexpr (std::is_same_v<T, nodes::ConvexComb>) {
          return lhs.alpha == rhs.alpha && lhs.f == rhs.f && lhs.g == rhs.g &&
                 same_callable(lhs.joint.name, lhs.joint.params, rhs.joint.name,
                               rhs.joint.params);
        } else if constexpr (std::is_same_v<T, nodes::SumPair>) {
          return lhs.f == rhs.f && lhs.g == rhs.g &&
                 same_callable(lhs.joint.name, lhs.joint.params, rhs.joint.name,
                               rhs.joint.params);
        } else if constexpr (std::is_same_v<T, nodes::MoreauEnv>) {
          return lhs.gamma == rhs.gamma && lhs.f == rhs.f;
        } else if constexpr (std::is_same_v<T, nodes::InfConv>) {
          return lhs.f == rhs.f && lhs.g == rhs.g &&
                 same_callable(lhs.minimizer.name, lhs.minimizer.params, rhs.minimizer.name,
                               rhs.minimizer.params) &&
                 same_callable(lhs.joint.name, lhs.joint.params, rhs.joint.name,
                               rhs.joint.params);
        } else if constexpr (std::is_same_v<T, nodes::Offset>) {
          return lhs.c == rhs.c && lhs.f == rhs.f;
        }
      },
      a.node_->v);
}

std::string FunctionSpec::describe() const {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const nodes::Linear& n) { os << "Linear(" << to_string(n.u) << ")"; },
                 [&](const nodes::Dist& n) { os << "Dist(" << set_text(n.set) << ")"; },
                 [&](const nodes::SqDist& n) { os << "SqDist(" << set_text(n.set) << ")"; },
                 [&](const nodes::NormPow& n) { os << "NormPow(p=" << n.p << ", dim=" << n.dim << ")"; },
                 [&](const nodes::NegLog&) { os << "NegLog"; },
                 [&](const nodes::SqrtShift& n) { os << "SqrtShift(eta=" << n.eta << ")"; },
                 [&](const nodes::Hyperbolic& n) { os << "Hyperbolic(eta=" << n.eta << ")"; },
                 [&](const nodes::AffineMax& n) { os << "AffineMax(" << n.pieces.size() << " pieces)"; },
                 [&](const nodes::Indicator& n) { os << "Indicator(" << set_text(n.set) << ")"; },
                 [&](const nodes::Scale& n) { os << "Scale(" << n.lambda << ", " << n.f.describe() << ")"; },
                 [&](const nodes::PowerComp& n) { os << "PowerComp(" << n.alpha << ", " << n.f.describe() << ")"; },
                 [&](const nodes::LeftCompose& n) { os << "LeftCompose(" << n.phi.name << ", " << n.f.describe() << ")"; },
                 [&](const nodes::RightLinear& n) { os << "RightLinear(alpha=" << n.alpha << ", " << n.f.describe() << ")"; },
                 [&](const nodes::ConvexComb& n) {
                   os << "ConvexComb(" << n.alpha << ", " << n.f.describe() << ", " << n.g.describe() << ")";
                 },
                 [&](const nodes::SumPair& n) { os << "SumPair(" << n.f.describe() << ", " << n.g.describe() << ")"; },
                 [&](const nodes::MoreauEnv& n) { os << "MoreauEnv(" << n.gamma << ", " << n.f.describe() << ")"; },
                 [&](const nodes::InfConv& n) { os << "InfConv(" << n.f.describe() << ", " << n.g.describe() << ")"; },
                 [&](const nodes::Offset& n) { os << "Offset(" << n.c << ", " << n.f.describe() << ")"; },
             },
             node_->v);
  return os.str();
}

// ---------------------------------------------------------------------------
// Constructors

FunctionSpec linear(Vector u) { return make(nodes::Linear{std::move(u)}); }
FunctionSpec dist(SetSpec set) { return make(nodes::Dist{std::move(set)}); }
FunctionSpec sq_dist(SetSpec set) { return make(nodes::SqDist{std::move(set)}); }

FunctionSpec norm_pow(double p, std::size_t dim) {
  if (!(p >= 1.0) || !std::isfinite(p)) fail(ErrorKind::InvalidArgument, "NormPow needs p >= 1");
  if (dim < 1) fail(ErrorKind::InvalidArgument, "NormPow needs dim >= 1");
  return make(nodes::NormPow{p, dim});
}

FunctionSpec neg_log() { return make(nodes::NegLog{}); }

FunctionSpec sqrt_shift(double eta) {
  require_positive(eta, "SqrtShift eta");
  return make(nodes::SqrtShift{eta});
}

FunctionSpec hyperbolic(double eta) {
  if (!(eta > 1.0) || !std::isfinite(eta)) fail(ErrorKind::InvalidArgument, "Hyperbolic needs eta > 1");
  return make(nodes::Hyperbolic{eta});
}

FunctionSpec affine_max(std::vector<AffinePiece> pieces) {
  if (pieces.empty()) fail(ErrorKind::InvalidArgument, "AffineMax needs at least one piece");
  for (const auto& p : pieces) {
    require_same_dim(p.a, pieces.front().a, "AffineMax pieces");
    if (!std::isfinite(p.b)) fail(ErrorKind::NonFiniteValue, "AffineMax offset");
  }
  return make(nodes::AffineMax{std::move(pieces)});
}

FunctionSpec indicator(SetSpec set) { return make(nodes::Indicator{std::move(set)}); }

FunctionSpec scale(double lambda, FunctionSpec f) {
  require_positive(lambda, "Scale lambda");
  return make(nodes::Scale{lambda, std::move(f)});
}

FunctionSpec power_comp(double alpha, FunctionSpec f) {
  require_positive(alpha, "PowerComp alpha");
  const bool certified = std::holds_alternative<nodes::Dist>(f.node().v) ||
                         std::holds_alternative<nodes::SqDist>(f.node().v) ||
                         std::holds_alternative<nodes::NormPow>(f.node().v);
  return make(nodes::PowerComp{alpha, std::move(f), certified});
}

FunctionSpec left_compose(PhiPair phi, FunctionSpec f) {
  if (!phi.phi || !phi.dphi) fail(ErrorKind::InvalidArgument, "LeftCompose needs phi and phi'");
  if (std::abs(phi.phi(0.0)) > 1e-12) fail(ErrorKind::InvalidArgument, "LeftCompose needs phi(0) = 0");
  if (!(phi.increasing_lo < phi.increasing_hi)) {
    fail(ErrorKind::InvalidArgument, "LeftCompose needs a nonempty monotone range");
  }
  return make(nodes::LeftCompose{std::move(phi), std::move(f)});
}

double scaled_orthogonal_factor(const Matrix& L, double tol) {
  if (L.rows() != L.cols() || L.rows() == 0) {
    fail(ErrorKind::NotScaledOrthogonal, "L must be square");
  }
  const Matrix ltl = L.transpose() * L;
  const Matrix llt = L * L.transpose();
  const double alpha = ltl.trace() / static_cast<double>(L.rows());
  const Matrix target = alpha * Matrix::Identity(L.rows(), L.cols());
  const double scale = std::max(1.0, alpha);
  if (!(alpha > 0.0) || (ltl - target).cwiseAbs().maxCoeff() > tol * scale ||
      (llt - target).cwiseAbs().maxCoeff() > tol * scale) {
    fail(ErrorKind::NotScaledOrthogonal, "L^T L = L L^T = alpha I does not hold");
  }
  return alpha;
}

FunctionSpec right_linear(Matrix L, FunctionSpec f) {
  if (!L.allFinite()) fail(ErrorKind::NonFiniteValue, "RightLinear matrix");
  const double alpha = scaled_orthogonal_factor(L);
  if (static_cast<std::size_t>(L.rows()) != f.dim()) {
    fail(ErrorKind::DimensionMismatch, "RightLinear: L rows must equal the inner dimension");
  }
  return make(nodes::RightLinear{std::move(L), alpha, std::move(f)});
}

FunctionSpec convex_comb(double alpha, FunctionSpec f, FunctionSpec g, JointSelection joint) {
  if (!(alpha > 0.0 && alpha < 1.0)) fail(ErrorKind::InvalidArgument, "ConvexComb needs alpha in (0,1)");
  if (f.dim() != g.dim()) fail(ErrorKind::DimensionMismatch, "ConvexComb operands");
  if (!joint.select) fail(ErrorKind::InvalidArgument, "ConvexComb needs a joint selection");
  return make(nodes::ConvexComb{alpha, std::move(f), std::move(g), std::move(joint)});
}

FunctionSpec sum_pair(FunctionSpec f, FunctionSpec g, JointSelection joint) {
  if (f.dim() != g.dim()) fail(ErrorKind::DimensionMismatch, "SumPair operands");
  if (!joint.select) fail(ErrorKind::InvalidArgument, "SumPair needs a joint selection");
  return make(nodes::SumPair{std::move(f), std::move(g), std::move(joint)});
}

FunctionSpec moreau_env(double gamma, FunctionSpec f) {
  require_positive(gamma, "MoreauEnv gamma");
  if (!is_prox_friendly(f)) {
    fail(ErrorKind::UnsupportedAtom, "MoreauEnv needs a prox-friendly function, got " + f.describe());
  }
  return make(nodes::MoreauEnv{gamma, std::move(f)});
}

FunctionSpec inf_conv(FunctionSpec f, FunctionSpec g, MinimizerOracle minimizer,
                      JointSelection joint) {
  if (f.dim() != g.dim()) fail(ErrorKind::DimensionMismatch, "InfConv operands");
  if (!minimizer.argmin) fail(ErrorKind::InvalidArgument, "InfConv needs a minimizer oracle");
  if (!joint.select) fail(ErrorKind::InvalidArgument, "InfConv needs a joint selection");
  return make(nodes::InfConv{std::move(f), std::move(g), std::move(minimizer), std::move(joint)});
}

FunctionSpec offset(double c, FunctionSpec f) {
  if (!std::isfinite(c)) fail(ErrorKind::NonFiniteValue, "Offset constant");
  return make(nodes::Offset{c, std::move(f)});
}

FunctionSpec moreau_inf_conv(FunctionSpec f, double gamma) {
  require_positive(gamma, "Moreau gamma");
  if (!is_prox_friendly(f)) fail(ErrorKind::UnsupportedAtom, "Moreau inf-convolution needs prox");
  const std::size_t n = f.dim();
  FunctionSpec g = scale(1.0 / (2.0 * gamma), norm_pow(2.0, n));
  MinimizerOracle m{"prox", {gamma}, [f, gamma](const Vector& x) { return prox(f, gamma, x); }};
  JointSelection u{"moreau_gradient", {gamma}, [f, gamma](const Vector& x) -> std::optional<Vector> {
                     return moreau_gradient(f, gamma, x);
                   }};
  return inf_conv(std::move(f), std::move(g), std::move(m), std::move(u));
}

// ---------------------------------------------------------------------------
// Audits

void audit_minimizer(const std::function<ExtReal(const Vector&)>& objective,
                     const Vector& candidate, const Vector& reference, double tol,
                     const std::string& what, int competitors) {
  const ExtReal best = objective(candidate);
  if (!best.is_finite()) {
    fail(ErrorKind::InconsistentMinimizer, what + ": objective is +inf at the candidate");
  }
  std::mt19937_64 rng(0x5eedULL);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double radius = 1.0 + reference.norm() + candidate.norm();
  static constexpr double kScales[] = {1e-3, 1e-2, 1e-1, 1.0};
  const auto n = static_cast<Eigen::Index>(candidate.dim());
  for (int j = 0; j < competitors; ++j) {
    Eigen::VectorXd z(n);
    for (Eigen::Index i = 0; i < n; ++i) z[i] = normal(rng);
    const double s = kScales[j % 4] * radius;
    const Vector y(Eigen::VectorXd(candidate.values() + s * z));
    const ExtReal other = objective(y);
    if (other.is_finite() && best.value() > other.value() + tol * (1.0 + std::abs(best.value()))) {
      fail(ErrorKind::InconsistentMinimizer,
           what + ": competitor " + to_string(y) + " improves the objective");
    }
  }
}

// ---------------------------------------------------------------------------
// Oracles

ExtReal eval(const FunctionSpec& f, const Vector& x) {
  require_dim(x, f.dim(), "eval");
  return std::visit(
      Overloaded{
          [&](const nodes::Linear& n) -> ExtReal { return x.dot(n.u); },
          [&](const nodes::Dist& n) -> ExtReal { return dist_to_set(n.set, x); },
          [&](const nodes::SqDist& n) -> ExtReal {
            const double d = dist_to_set(n.set, x);
            return d * d;
          },
          [&](const nodes::NormPow& n) -> ExtReal { return std::pow(x.norm(), n.p); },
          [&](const nodes::NegLog&) -> ExtReal {
            const double t = scalar(x);
            return t > 0.0 ? ExtReal(-std::log(t)) : ExtReal::infinity();
          },
          [&](const nodes::SqrtShift& n) -> ExtReal {
            const double t = scalar(x);
            return t > 0.0 ? ExtReal(n.eta - std::sqrt(t)) : ExtReal::infinity();
          },
          [&](const nodes::Hyperbolic& n) -> ExtReal { return std::hypot(1.0, scalar(x)) - n.eta; },
          [&](const nodes::AffineMax& n) -> ExtReal {
            double mx = -std::numeric_limits<double>::infinity();
            for (const auto& p : n.pieces) mx = std::max(mx, x.dot(p.a) + p.b);
            return mx;
          },
          [&](const nodes::Indicator& n) -> ExtReal {
            return contains(n.set, x) ? ExtReal(0.0) : ExtReal::infinity();
          },
          [&](const nodes::Scale& n) -> ExtReal { return n.lambda * eval(n.f, x); },
          [&](const nodes::PowerComp& n) -> ExtReal {
            const ExtReal v = eval(n.f, x);
            if (!v.is_finite()) return v;
            return std::pow(power_base(n, x, v), 1.0 / n.alpha);
          },
          [&](const nodes::LeftCompose& n) -> ExtReal {
            const ExtReal v = eval(n.f, x);
            if (!v.is_finite()) return v;
            return n.phi.phi(v.value());
          },
          [&](const nodes::RightLinear& n) -> ExtReal { return eval(n.f, n.L * x); },
          [&](const nodes::ConvexComb& n) -> ExtReal {
            const ExtReal a = eval(n.f, x);
            const ExtReal b = eval(n.g, x);
            if (!a.is_finite() || !b.is_finite()) return ExtReal::infinity();
            return n.alpha * a.value() + (1.0 - n.alpha) * b.value();
          },
          [&](const nodes::SumPair& n) -> ExtReal { return eval(n.f, x) + eval(n.g, x); },
          [&](const nodes::MoreauEnv& n) -> ExtReal { return moreau_value(n.f, n.gamma, x); },
          [&](const nodes::InfConv& n) -> ExtReal {
            const Vector y = n.minimizer.argmin(x);
            require_dim(y, x.dim(), "InfConv minimizer");
            auto objective = [&](const Vector& z) { return eval(n.f, z) + eval(n.g, x - z); };
            audit_minimizer(objective, y, x, 1e-8, "InfConv minimizer '" + n.minimizer.name + "'");
            return objective(y);
          },
          [&](const nodes::Offset& n) -> ExtReal { return eval(n.f, x) + ExtReal(n.c); },
      },
      f.node().v);
}

Vector subgradient(const FunctionSpec& f, const Vector& x, const SelectionStrategy& s) {
  const double fx = finite_value(f, x, "subgradient");
  return std::visit(
      Overloaded{
          [&](const nodes::Linear& n) { return n.u; },
          [&](const nodes::Dist& n) {
            const Vector p = project_set(n.set, x);
            const double d = distance(x, p);
            if (d <= 0.0) return Vector::zeros(x.dim());
            return (x - p) / d;
          },
          [&](const nodes::SqDist& n) { return 2.0 * (x - project_set(n.set, x)); },
          [&](const nodes::NormPow& n) {
            const double r = x.norm();
            if (r <= 0.0) return Vector::zeros(x.dim());
            return (n.p * std::pow(r, n.p - 2.0)) * x;
          },
          [&](const nodes::NegLog&) { return vec1(-1.0 / scalar(x)); },
          [&](const nodes::SqrtShift&) { return vec1(-0.5 / std::sqrt(scalar(x))); },
          [&](const nodes::Hyperbolic&) {
            const double t = scalar(x);
            return vec1(t / std::hypot(1.0, t));
          },
          [&](const nodes::AffineMax& n) {
            const auto active = active_pieces(n, x);
            switch (s.rule()) {
              case SelectionStrategy::Rule::LeastIndexActive:
                return n.pieces[active.front()].a;
              case SelectionStrategy::Rule::CentroidActive: {
                Vector c = Vector::zeros(x.dim());
                for (std::size_t i : active) c = c + n.pieces[i].a;
                return c / static_cast<double>(active.size());
              }
              case SelectionStrategy::Rule::EndpointK:
                return n.pieces[active[s.k() % active.size()]].a;
            }
            return n.pieces[active.front()].a;
          },
          [&](const nodes::Indicator&) { return Vector::zeros(x.dim()); },
          [&](const nodes::Scale& n) { return n.lambda * subgradient(n.f, x, s); },
          [&](const nodes::PowerComp& n) {
            const double base = power_base(n, x, eval(n.f, x));
            const double q = 1.0 / n.alpha;
            if (base > 0.0) return (q * std::pow(base, q - 1.0)) * subgradient(n.f, x, s);
            if (q > 1.0) return Vector::zeros(x.dim());
            if (q == 1.0) return subgradient(n.f, x, s);
            fail(ErrorKind::EmptySubdifferential, "PowerComp with alpha > 1 at a zero of the base");
          },
          [&](const nodes::LeftCompose& n) {
            const double inner = eval(n.f, x).value();
            return n.phi.dphi(inner) * subgradient(n.f, x, s);
          },
          [&](const nodes::RightLinear& n) {
            return n.L.transpose() * subgradient(n.f, n.L * x, s);
          },
          [&](const nodes::ConvexComb& n) { return joint_or_throw(n.joint, x); },
          [&](const nodes::SumPair& n) { return 2.0 * joint_or_throw(n.joint, x); },
          [&](const nodes::MoreauEnv& n) { return moreau_gradient(n.f, n.gamma, x); },
          [&](const nodes::InfConv& n) { return joint_or_throw(n.joint, x); },
          [&](const nodes::Offset& n) { return subgradient(n.f, x, s); },
      },
      f.node().v);
  (void)fx;
}

std::vector<Vector> subdifferential_sample(const FunctionSpec& f, const Vector& x,
                                           std::size_t k) {
  if (k == 0) fail(ErrorKind::InvalidArgument, "sample size must be positive");
  finite_value(f, x, "subdifferential_sample");
  auto mapped = [](std::vector<Vector> in, const auto& fn) {
    for (auto& v : in) v = fn(v);
    return in;
  };
  return std::visit(
      Overloaded{
          [&](const nodes::AffineMax& n) {
            const auto verts = active_vertices(n, x);
            if (verts.size() == 1) return std::vector<Vector>(k, verts.front());
            return hull_samples(verts, k);
          },
          [&](const nodes::Scale& n) {
            return mapped(subdifferential_sample(n.f, x, k),
                          [&](const Vector& v) { return n.lambda * v; });
          },
          [&](const nodes::Offset& n) { return subdifferential_sample(n.f, x, k); },
          [&](const nodes::RightLinear& n) {
            return mapped(subdifferential_sample(n.f, n.L * x, k),
                          [&](const Vector& v) { return n.L.transpose() * v; });
          },
          [&](const nodes::LeftCompose& n) {
            const double d = n.phi.dphi(eval(n.f, x).value());
            return mapped(subdifferential_sample(n.f, x, k), [&](const Vector& v) { return d * v; });
          },
          [&](const auto&) {
            return std::vector<Vector>(k, subgradient(f, x, SelectionStrategy()));
          },
      },
      f.node().v);
}

Matrix hessian(const FunctionSpec& f, const Vector& x) {
  finite_value(f, x, "hessian");
  const auto n = static_cast<Eigen::Index>(x.dim());
  const Matrix id = Matrix::Identity(n, n);
  auto none = [&](const std::string& why) -> Matrix {
    fail(ErrorKind::NotTwiceDifferentiable, f.describe() + ": " + why);
  };
  auto one = [](double v) {
    Matrix m(1, 1);
    m(0, 0) = v;
    return m;
  };
  return std::visit(
      Overloaded{
          [&](const nodes::Linear&) -> Matrix { return Matrix::Zero(n, n); },
          [&](const nodes::Dist& d) -> Matrix {
            const Vector p = project_set(d.set, x);
            const double r = distance(x, p);
            if (r > 0.0) {
              const Eigen::VectorXd u = (x - p).values() / r;
              return (id - projection_jacobian(d.set, x) - u * u.transpose()) / r;
            }
            if (strictly_inside(d.set, x)) return Matrix::Zero(n, n);
            return none("on the set boundary");
          },
          [&](const nodes::SqDist& d) -> Matrix {
            return 2.0 * (id - projection_jacobian(d.set, x));
          },
          [&](const nodes::NormPow& np) -> Matrix {
            const double r = x.norm();
            if (r > 0.0) {
              const Eigen::VectorXd u = x.values() / r;
              return np.p * std::pow(r, np.p - 2.0) * (id + (np.p - 2.0) * u * u.transpose());
            }
            if (np.p == 2.0) return 2.0 * id;
            if (np.p > 2.0) return Matrix::Zero(n, n);
            return none("at the origin");
          },
          [&](const nodes::NegLog&) -> Matrix {
            const double t = scalar(x);
            return one(1.0 / (t * t));
          },
          [&](const nodes::SqrtShift&) -> Matrix {
            const double t = scalar(x);
            return one(0.25 / (t * std::sqrt(t)));
          },
          [&](const nodes::Hyperbolic&) -> Matrix {
            const double t = scalar(x);
            return one(std::pow(1.0 + t * t, -1.5));
          },
          [&](const nodes::AffineMax& am) -> Matrix {
            if (active_vertices(am, x).size() == 1) return Matrix::Zero(n, n);
            return none("at a kink");
          },
          [&](const nodes::Scale& s) -> Matrix { return s.lambda * hessian(s.f, x); },
          [&](const nodes::PowerComp& pc) -> Matrix {
            const double base = power_base(pc, x, eval(pc.f, x));
            if (!(base > 0.0)) return none("at a zero of the base");
            const double q = 1.0 / pc.alpha;
            const Eigen::VectorXd g = subgradient(pc.f, x).values();
            return q * (q - 1.0) * std::pow(base, q - 2.0) * g * g.transpose() +
                   q * std::pow(base, q - 1.0) * hessian(pc.f, x);
          },
          [&](const nodes::RightLinear& rl) -> Matrix {
            return rl.L.transpose() * hessian(rl.f, rl.L * x) * rl.L;
          },
          [&](const nodes::Offset& o) -> Matrix { return hessian(o.f, x); },
          [&](const auto&) -> Matrix { return none("no Hessian oracle"); },
      },
      f.node().v);
}

bool differentiable_at(const FunctionSpec& f, const Vector& x) {
  require_dim(x, f.dim(), "differentiable_at");
  if (!eval(f, x).is_finite()) return false;
  return std::visit(
      Overloaded{
          [&](const nodes::Linear&) { return true; },
          [&](const nodes::Dist& d) { return dist_to_set(d.set, x) > 0.0 || strictly_inside(d.set, x); },
          [&](const nodes::SqDist&) { return true; },
          [&](const nodes::NormPow& np) { return np.p > 1.0 || x.norm() > 0.0; },
          [&](const nodes::NegLog&) { return true; },
          [&](const nodes::SqrtShift&) { return true; },
          [&](const nodes::Hyperbolic&) { return true; },
          [&](const nodes::AffineMax& am) { return active_vertices(am, x).size() == 1; },
          [&](const nodes::Indicator& ind) { return strictly_inside(ind.set, x); },
          [&](const nodes::Scale& s) { return differentiable_at(s.f, x); },
          [&](const nodes::PowerComp& pc) {
            if (!differentiable_at(pc.f, x)) return false;
            return eval(pc.f, x).value() > 0.0 || pc.alpha <= 1.0;
          },
          [&](const nodes::LeftCompose& lc) { return differentiable_at(lc.f, x); },
          [&](const nodes::RightLinear& rl) { return differentiable_at(rl.f, rl.L * x); },
          [&](const nodes::ConvexComb& c) { return differentiable_at(c.f, x) && differentiable_at(c.g, x); },
          [&](const nodes::SumPair& c) { return differentiable_at(c.f, x) && differentiable_at(c.g, x); },
          [&](const nodes::MoreauEnv&) { return true; },
          [&](const nodes::InfConv&) { return false; },
          [&](const nodes::Offset& o) { return differentiable_at(o.f, x); },
      },
      f.node().v);
}

std::optional<Vector> project_level_set(const FunctionSpec& f, const Vector& x) {
  require_dim(x, f.dim(), "project_level_set");
  auto halfspace_proj = [&](const Vector& a, double rhs) -> std::optional<Vector> {
    // {y : <y, a> <= rhs}
    if (a.norm() <= kNormEpsilon) {
      if (rhs >= 0.0) return x;
      return std::nullopt;
    }
    return project_set(SetSpec::halfspace(a, rhs), x);
  };
  return std::visit(
      Overloaded{
          [&](const nodes::Linear& n) { return halfspace_proj(n.u, 0.0); },
          [&](const nodes::Dist& n) -> std::optional<Vector> { return project_set(n.set, x); },
          [&](const nodes::SqDist& n) -> std::optional<Vector> { return project_set(n.set, x); },
          [&](const nodes::Indicator& n) -> std::optional<Vector> { return project_set(n.set, x); },
          [&](const nodes::NormPow&) -> std::optional<Vector> { return Vector::zeros(x.dim()); },
          [&](const nodes::NegLog&) -> std::optional<Vector> { return vec1(std::max(scalar(x), 1.0)); },
          [&](const nodes::SqrtShift& n) -> std::optional<Vector> {
            return vec1(std::max(scalar(x), n.eta * n.eta));
          },
          [&](const nodes::Hyperbolic& n) -> std::optional<Vector> {
            const double r = std::sqrt(n.eta * n.eta - 1.0);
            return vec1(std::clamp(scalar(x), -r, r));
          },
          [&](const nodes::AffineMax& n) -> std::optional<Vector> {
            if (n.pieces.size() != 1) return std::nullopt;
            return halfspace_proj(n.pieces.front().a, -n.pieces.front().b);
          },
          [&](const nodes::Scale& n) { return project_level_set(n.f, x); },
          [&](const nodes::PowerComp& n) { return project_level_set(n.f, x); },
          [&](const nodes::LeftCompose& n) { return project_level_set(n.f, x); },
          [&](const nodes::RightLinear& n) -> std::optional<Vector> {
            auto p = project_level_set(n.f, n.L * x);
            if (!p) return std::nullopt;
            return (n.L.transpose() * *p) / n.alpha;
          },
          [&](const nodes::MoreauEnv& n) -> std::optional<Vector> {
            if (const auto* ind = std::get_if<nodes::Indicator>(&n.f.node().v)) {
              return project_set(ind->set, x);
            }
            return std::nullopt;
          },
          [&](const nodes::Offset& n) -> std::optional<Vector> {
            const double level = -n.c;  // lev<=0 (f + c) = lev<=level f
            if (const auto* lin = std::get_if<nodes::Linear>(&n.f.node().v)) {
              return halfspace_proj(lin->u, level);
            }
            if (std::holds_alternative<nodes::NormPow>(n.f.node().v)) {
              const auto& np = std::get<nodes::NormPow>(n.f.node().v);
              if (level < 0.0) return std::nullopt;
              if (level == 0.0) return Vector::zeros(x.dim());
              return project_set(SetSpec::ball(Vector::zeros(x.dim()), std::pow(level, 1.0 / np.p)), x);
            }
            if (const auto* d = std::get_if<nodes::Dist>(&n.f.node().v)) {
              if (level < 0.0) return std::nullopt;
              if (level == 0.0) return project_set(d->set, x);
              if (const auto* b = std::get_if<Ball>(&d->set.shape())) {
                return project_set(SetSpec::ball(b->center, b->radius + level), x);
              }
              if (const auto* p = std::get_if<Point>(&d->set.shape())) {
                return project_set(SetSpec::ball(p->c, level), x);
              }
            }
            return std::nullopt;
          },
          [&](const auto&) -> std::optional<Vector> { return std::nullopt; },
      },
      f.node().v);
}

bool has_bare_indicator(const FunctionSpec& f) {
  return std::visit(
      Overloaded{
          [](const nodes::Indicator&) { return true; },
          [](const nodes::Scale& n) { return has_bare_indicator(n.f); },
          [](const nodes::PowerComp& n) { return has_bare_indicator(n.f); },
          [](const nodes::LeftCompose& n) { return has_bare_indicator(n.f); },
          [](const nodes::RightLinear& n) { return has_bare_indicator(n.f); },
          [](const nodes::ConvexComb& n) { return has_bare_indicator(n.f) || has_bare_indicator(n.g); },
          [](const nodes::SumPair& n) { return has_bare_indicator(n.f) || has_bare_indicator(n.g); },
          [](const nodes::Offset& n) { return has_bare_indicator(n.f); },
          [](const auto&) { return false; },
      },
      f.node().v);
}

}  // namespace subproj
