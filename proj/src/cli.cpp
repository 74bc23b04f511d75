#include "subproj/cli.hpp"

#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "subproj/analysis.hpp"
#include "subproj/io.hpp"

namespace subproj {

namespace {

struct Options {
  std::string file;
  std::string point;
  std::string trace;
  std::string strategy = "least_index";
  std::string subcommand;
  std::string family = "scale";
  std::uint64_t seed = 0;
  std::size_t samples = 0;
  std::size_t horizon = 1000;
  double radius = 3.0;
  double beta = 1.0;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::SchemaError, "cannot read '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Vector parse_point(const std::string& text, std::size_t dim) {
  std::vector<double> v;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      v.push_back(std::stod(item, &used));
      if (item.find_first_not_of(" \t", used) != std::string::npos) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      fail(ErrorKind::SchemaError, "bad coordinate '" + item + "' in --point");
    }
  }
  if (v.empty()) fail(ErrorKind::SchemaError, "--point is required");
  if (v.size() != dim) fail(ErrorKind::DimensionMismatch, "--point has the wrong dimension");
  return Vector(std::span<const double>(v));
}

const FunctionSpec& single_function(const Problem& p) {
  if (p.functions.size() != 1) fail(ErrorKind::SchemaError, "this command needs exactly one function");
  if (p.functions.front().dim() != p.dimension) fail(ErrorKind::DimensionMismatch, "function dimension");
  return p.functions.front();
}

std::string fmt(const Vector& v) {
  std::string s;
  for (std::size_t i = 0; i < v.dim(); ++i) s += (i ? "," : "") + format_double(v[i]);
  return s;
}

Vector random_point(std::mt19937_64& rng, const Vector& center, double radius) {
  std::uniform_real_distribution<double> u(-radius, radius);
  Eigen::VectorXd z(static_cast<Eigen::Index>(center.dim()));
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = u(rng);
  return center + Vector(z);
}

int cmd_project(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.file));
  const FunctionSpec& f = single_function(p);
  const Vector x = parse_point(o.point, p.dimension);
  const SelectionStrategy s = parse_selection(o.strategy);
  const ProjOutcome r = sproj(f, x, s);
  out << "point: " << fmt(r.point) << "\n";
  out << "status: " << to_string(r.status) << "\n";
  out << "f_value: " << format_double(r.f_value) << "\n";
  out << "subgradient: " << (r.subgradient_used ? fmt(*r.subgradient_used) : "none") << "\n";
  return kExitOk;
}

int cmd_solve(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.file));
  const SolveResult r = solve(p);
  if (!o.trace.empty()) {
    std::ofstream t(o.trace, std::ios::binary);
    if (!t) fail(ErrorKind::SchemaError, "cannot write '" + o.trace + "'");
    write_trace(t, p, r.trace);
  }
  out << "status: " << to_string(r.trace.status) << "\n";
  out << "iterations: " << r.trace.rows.size() << "\n";
  out << "final_residual: " << format_double(r.trace.final_residual) << "\n";
  out << "x: " << fmt(r.x) << "\n";
  return r.trace.status == SolveStatus::Converged ? kExitOk : kExitMaxIter;
}

int analyze_jacobian(const FunctionSpec& f, const Vector& x, std::ostream& out) {
  const Matrix j = sproj_jacobian(f, x);
  const Matrix fd = fd_jacobian(sproj_map(f), x);
  out << "i,j,formula,finite_difference,deviation\n";
  for (Eigen::Index r = 0; r < j.rows(); ++r) {
    for (Eigen::Index c = 0; c < j.cols(); ++c) {
      out << r << ',' << c << ',' << format_double(j(r, c)) << ',' << format_double(fd(r, c)) << ','
          << format_double(std::abs(j(r, c) - fd(r, c))) << "\n";
    }
  }
  out << "# relative_error=" << format_double(relative_max_error(fd, j)) << "\n";
  return kExitOk;
}

int analyze_lipschitz(const FunctionSpec& f, const Vector& center, const Options& o, std::ostream& out) {
  std::mt19937_64 rng(o.seed);
  const std::size_t want = o.samples ? o.samples : 50;
  std::vector<Vector> omega;
  for (std::size_t tries = 0; omega.size() < want && tries < 100 * want; ++tries) {
    Vector x = random_point(rng, center, o.radius);
    const ExtReal v = eval(f, x);
    if (v.is_finite() && v.value() > 0.0 && differentiable_at(f, x)) omega.push_back(std::move(x));
  }
  const double bound = lipschitz_bound(f, omega, o.beta);
  const double quotient = max_difference_quotient(f, omega);
  out << "samples: " << omega.size() << "\n";
  out << "bound: " << format_double(bound) << "\n";
  out << "max_quotient: " << format_double(quotient) << "\n";
  out << "check: " << (quotient <= bound + 1e-9 ? "OK" : "FAIL") << "\n";
  return kExitOk;
}

int analyze_monotone(const FunctionSpec& f, const Vector& center, const Options& o, std::ostream& out) {
  std::mt19937_64 rng(o.seed);
  const std::size_t want = o.samples ? o.samples : 100;
  std::vector<std::pair<Vector, Vector>> pairs;
  for (std::size_t tries = 0; pairs.size() < want && tries < 100 * want; ++tries) {
    Vector x = random_point(rng, center, o.radius);
    Vector y = random_point(rng, center, o.radius);
    if (eval(f, x).is_finite() && eval(f, y).is_finite()) pairs.emplace_back(std::move(x), std::move(y));
  }
  const MonotonicityReport r = monotonicity_probe(f, pairs, parse_selection(o.strategy));
  out << "pairs: " << r.pairs << "\n";
  out << "worst: " << format_double(r.worst) << "\n";
  out << "worst_inverse_form: " << (r.worst_inverse_form ? format_double(*r.worst_inverse_form) : "none") << "\n";
  out << "check: " << (r.worst >= -1e-12 ? "OK" : "FAIL") << "\n";
  return kExitOk;
}

int analyze_seqlab(const FunctionSpec& f, const Vector& x, const Options& o, std::ostream& out) {
  FunctionFamily family;
  if (o.family == "scale") family = scale_family(f);
  else if (o.family == "harmonic") family = harmonic_shift_family(f);
  else if (o.family == "geometric") family = geometric_shift_family(f);
  else if (o.family == "alternating") family = alternating_family(f, x);
  else fail(ErrorKind::SchemaError, "unknown family '" + o.family + "'");
  const SeqVerdict v = seq_lab(family, f, x, o.horizon, parse_selection(o.strategy));
  out << "verdict: " << to_string(v.verdict) << "\n";
  out << "prediction: "
      << (v.predicted_convergent ? (*v.predicted_convergent ? "converges" : "diverges") : "none") << "\n";
  out << "tail_deviation: " << format_double(v.tail_deviation) << "\n";
  out << "recurring_deviation: " << format_double(v.recurring_deviation) << "\n";
  out << "gap_bound: " << (v.gap_bound ? format_double(*v.gap_bound) : "none") << "\n";
  return kExitOk;
}

int analyze_distbound(const FunctionSpec& f, const Vector& x, const Options& o, std::ostream& out) {
  const DistBound b = dist_bound_check(f, x, parse_selection(o.strategy));
  out << "lhs: " << format_double(b.lhs) << "\n";
  out << "rhs: " << format_double(b.rhs) << "\n";
  out << "check: " << (b.holds ? "OK" : "FAIL") << "\n";
  return kExitOk;
}

int cmd_analyze(const Options& o, std::ostream& out) {
  const Problem p = parse_problem(read_file(o.file));
  const FunctionSpec& f = single_function(p);
  const bool sampled = o.subcommand == "lipschitz" || o.subcommand == "monotone";
  const Vector x = (sampled && o.point.empty()) ? Vector::zeros(p.dimension) : parse_point(o.point, p.dimension);
  if (o.subcommand == "jacobian") return analyze_jacobian(f, x, out);
  if (o.subcommand == "lipschitz") return analyze_lipschitz(f, x, o, out);
  if (o.subcommand == "monotone") return analyze_monotone(f, x, o, out);
  if (o.subcommand == "seqlab") return analyze_seqlab(f, x, o, out);
  if (o.subcommand == "distbound") return analyze_distbound(f, x, o, out);
  fail(ErrorKind::SchemaError, "unknown analysis '" + o.subcommand + "'");
}

}  // namespace

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SchemaError:
    case ErrorKind::RelaxationOutOfRange:
    case ErrorKind::InvalidControl:
    case ErrorKind::InvalidArgument:
    case ErrorKind::DimensionMismatch:
    case ErrorKind::NotScaledOrthogonal:
    case ErrorKind::UnsupportedAtom:
    case ErrorKind::NotSerializable:
    case ErrorKind::InfeasibleWitness:
      return kExitSchema;
    default:
      return kExitNumeric;
  }
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Subgradient projectors: project points, solve feasibility problems, run diagnostics",
               "subproj"};
  app.require_subcommand(1);
  Options o;
  auto common = [&](CLI::App* sub) {
    sub->add_option("--file", o.file, "Problem file (JSON)")->required();
    sub->add_option("--point", o.point, "Comma-separated coordinates");
    sub->add_option("--strategy", o.strategy, "least_index | centroid | endpoint:<k>");
    sub->add_option("--seed", o.seed, "Seed for sampled diagnostics");
  };
  CLI::App* project = app.add_subcommand("project", "Apply G_f to a point");
  common(project);
  CLI::App* solve_cmd = app.add_subcommand("solve", "Run the relaxed subgradient projection method");
  common(solve_cmd);
  solve_cmd->add_option("--trace", o.trace, "CSV trace output path");
  CLI::App* analyze = app.add_subcommand("analyze", "Regularity diagnostics");
  common(analyze);
  analyze->add_option("what", o.subcommand, "jacobian | lipschitz | monotone | seqlab | distbound")
      ->required()
      ->check(CLI::IsMember({"jacobian", "lipschitz", "monotone", "seqlab", "distbound"}));
  analyze->add_option("--samples", o.samples, "Number of samples or pairs");
  analyze->add_option("--radius", o.radius, "Sampling radius around --point");
  analyze->add_option("--beta", o.beta, "Lipschitz constant of the gradient");
  analyze->add_option("--family", o.family, "scale | harmonic | geometric | alternating");
  analyze->add_option("--horizon", o.horizon, "Sequence length for seqlab");

  try {
    std::vector<std::string> rev(args.rbegin(), args.rend());
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return kExitSchema;
  }

  try {
    if (project->parsed()) return cmd_project(o, out);
    if (solve_cmd->parsed()) return cmd_solve(o, out);
    return cmd_analyze(o, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  }
}

}  // namespace subproj
