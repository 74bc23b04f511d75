#include "subproj/io.hpp"

#include <cstdio>
#include <ostream>
#include <set>

#include <json.hpp>

#include "overloaded.hpp"

namespace subproj {

using detail::Overloaded;
using nlohmann::json;

namespace {

[[noreturn]] void schema(const std::string& path, const std::string& msg) {
  fail(ErrorKind::SchemaError, path + ": " + msg);
}

void only_keys(const json& j, const std::string& path, std::initializer_list<const char*> keys) {
  if (!j.is_object()) schema(path, "expected an object");
  const std::set<std::string> allowed(keys.begin(), keys.end());
  for (const auto& [k, v] : j.items()) {
    if (!allowed.count(k)) schema(path, "unknown key '" + k + "'");
  }
}

const json& need(const json& j, const std::string& path, const char* key) {
  if (!j.contains(key)) schema(path, std::string("missing key '") + key + "'");
  return j.at(key);
}

double number(const json& j, const std::string& path) {
  if (!j.is_number()) schema(path, "expected a number");
  return j.get<double>();
}

std::uint64_t count(const json& j, const std::string& path) {
  if (!j.is_number_integer() || j.get<std::int64_t>() < 0) schema(path, "expected a nonnegative integer");
  return j.get<std::uint64_t>();
}

std::vector<double> numbers(const json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected an array of numbers");
  std::vector<double> out;
  for (std::size_t i = 0; i < j.size(); ++i) out.push_back(number(j[i], path + "[" + std::to_string(i) + "]"));
  return out;
}

std::vector<std::size_t> counts(const json& j, const std::string& path) {
  if (!j.is_array()) schema(path, "expected an array of integers");
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < j.size(); ++i) {
    out.push_back(static_cast<std::size_t>(count(j[i], path + "[" + std::to_string(i) + "]")));
  }
  return out;
}

Vector vec(const json& j, const std::string& path) {
  const auto v = numbers(j, path);
  if (v.empty()) schema(path, "vectors need at least one component");
  return Vector(std::span<const double>(v));
}

json vec_json(const Vector& v) { return v.to_std(); }

SetSpec parse_set(const json& j, const std::string& path) {
  if (!j.is_object()) schema(path, "expected a set record");
  const std::string type = need(j, path, "type").get<std::string>();
  if (type == "ball") {
    only_keys(j, path, {"type", "center", "radius"});
    return SetSpec::ball(vec(need(j, path, "center"), path + ".center"),
                         number(need(j, path, "radius"), path + ".radius"));
  }
  if (type == "halfspace") {
    only_keys(j, path, {"type", "normal", "offset"});
    return SetSpec::halfspace(vec(need(j, path, "normal"), path + ".normal"),
                              number(need(j, path, "offset"), path + ".offset"));
  }
  if (type == "box") {
    only_keys(j, path, {"type", "lo", "hi"});
    return SetSpec::box(vec(need(j, path, "lo"), path + ".lo"), vec(need(j, path, "hi"), path + ".hi"));
  }
  if (type == "point") {
    only_keys(j, path, {"type", "c"});
    return SetSpec::point(vec(need(j, path, "c"), path + ".c"));
  }
  schema(path, "unknown set type '" + type + "'");
}

json set_json(const SetSpec& s) {
  return std::visit(
      Overloaded{
          [](const Ball& b) {
            return json{{"type", "ball"}, {"center", vec_json(b.center)}, {"radius", b.radius}};
          },
          [](const Halfspace& h) {
            return json{{"type", "halfspace"}, {"normal", vec_json(h.normal)}, {"offset", h.offset}};
          },
          [](const Box& b) {
            return json{{"type", "box"}, {"lo", vec_json(b.lo)}, {"hi", vec_json(b.hi)}};
          },
          [](const Point& p) { return json{{"type", "point"}, {"c", vec_json(p.c)}}; },
      },
      s.shape());
}

json callable_json(const std::string& name, const std::vector<double>& params) {
  json j{{"name", name}};
  if (!params.empty()) j["params"] = params;
  return j;
}

std::pair<std::string, std::vector<double>> parse_callable(const json& j, const std::string& path) {
  only_keys(j, path, {"name", "params"});
  const json& name = need(j, path, "name");
  if (!name.is_string()) schema(path + ".name", "expected a string");
  std::vector<double> params;
  if (j.contains("params")) params = numbers(j.at("params"), path + ".params");
  return {name.get<std::string>(), params};
}

void want_params(const std::vector<double>& params, std::size_t n, const std::string& path) {
  if (params.size() != n) schema(path, "expected " + std::to_string(n) + " parameters");
}

PhiPair parse_phi(const json& j, const std::string& path) {
  auto [name, params] = parse_callable(j, path);
  if (name == "identity") return want_params(params, 0, path), phi_identity();
  if (name == "cube") return want_params(params, 0, path), phi_cube();
  if (name == "abs_power") return want_params(params, 1, path), phi_abs_power(params[0]);
  schema(path, "unknown phi '" + name + "'");
}

JointSelection parse_joint(const json& j, const std::string& path) {
  auto [name, params] = parse_callable(j, path);
  if (name == "concentric_balls") {
    want_params(params, 2, path);
    return concentric_balls_selection(params[0], params[1]);
  }
  if (name == "common_gradient") {
    if (params.empty()) schema(path, "common_gradient needs the gradient as parameters");
    return common_gradient_selection(Vector(std::span<const double>(params)));
  }
  schema(path, "unknown joint selection '" + name + "'");
}

const std::set<std::string> kBuiltinPhi = {"identity", "cube", "abs_power"};
const std::set<std::string> kBuiltinJoint = {"concentric_balls", "common_gradient"};

FunctionSpec parse_fn(const json& j, const std::string& path, std::size_t dimension) {
  if (!j.is_object()) schema(path, "expected a function record");
  const json& t = need(j, path, "type");
  if (!t.is_string()) schema(path + ".type", "expected a string");
  const std::string type = t.get<std::string>();
  auto sub = [&](const char* key) { return parse_fn(need(j, path, key), path + "." + key, dimension); };
  auto num = [&](const char* key) { return number(need(j, path, key), path + "." + key); };

  if (type == "linear") {
    only_keys(j, path, {"type", "u"});
    return linear(vec(need(j, path, "u"), path + ".u"));
  }
  if (type == "dist" || type == "sq_dist" || type == "indicator") {
    only_keys(j, path, {"type", "set"});
    SetSpec s = parse_set(need(j, path, "set"), path + ".set");
    if (type == "dist") return dist(std::move(s));
    if (type == "sq_dist") return sq_dist(std::move(s));
    return indicator(std::move(s));
  }
  if (type == "norm_pow") {
    only_keys(j, path, {"type", "p", "dim"});
    const std::size_t d = j.contains("dim") ? static_cast<std::size_t>(count(j.at("dim"), path + ".dim")) : dimension;
    return norm_pow(num("p"), d);
  }
  if (type == "neg_log") {
    only_keys(j, path, {"type"});
    return neg_log();
  }
  if (type == "sqrt_shift") {
    only_keys(j, path, {"type", "eta"});
    return sqrt_shift(num("eta"));
  }
  if (type == "hyperbolic") {
    only_keys(j, path, {"type", "eta"});
    return hyperbolic(num("eta"));
  }
  if (type == "affine_max") {
    only_keys(j, path, {"type", "pieces"});
    const json& ps = need(j, path, "pieces");
    if (!ps.is_array()) schema(path + ".pieces", "expected an array");
    std::vector<AffinePiece> pieces;
    for (std::size_t i = 0; i < ps.size(); ++i) {
      const std::string pp = path + ".pieces[" + std::to_string(i) + "]";
      only_keys(ps[i], pp, {"a", "b"});
      pieces.push_back(AffinePiece{vec(need(ps[i], pp, "a"), pp + ".a"), number(need(ps[i], pp, "b"), pp + ".b")});
    }
    return affine_max(std::move(pieces));
  }
  if (type == "scale") {
    only_keys(j, path, {"type", "lambda", "f"});
    return scale(num("lambda"), sub("f"));
  }
  if (type == "power_comp") {
    only_keys(j, path, {"type", "alpha", "f"});
    return power_comp(num("alpha"), sub("f"));
  }
  if (type == "left_compose") {
    only_keys(j, path, {"type", "phi", "f"});
    return left_compose(parse_phi(need(j, path, "phi"), path + ".phi"), sub("f"));
  }
  if (type == "right_linear") {
    only_keys(j, path, {"type", "L", "f"});
    const json& rows = need(j, path, "L");
    if (!rows.is_array() || rows.empty()) schema(path + ".L", "expected a nonempty matrix");
    const auto n = static_cast<Eigen::Index>(rows.size());
    Matrix L(n, n);
    for (Eigen::Index r = 0; r < n; ++r) {
      const auto row = numbers(rows[static_cast<std::size_t>(r)], path + ".L");
      if (static_cast<Eigen::Index>(row.size()) != n) schema(path + ".L", "matrix must be square");
      for (Eigen::Index c = 0; c < n; ++c) L(r, c) = row[static_cast<std::size_t>(c)];
    }
    return right_linear(std::move(L), sub("f"));
  }
  if (type == "convex_comb") {
    only_keys(j, path, {"type", "alpha", "f", "g", "joint"});
    return convex_comb(num("alpha"), sub("f"), sub("g"), parse_joint(need(j, path, "joint"), path + ".joint"));
  }
  if (type == "sum_pair") {
    only_keys(j, path, {"type", "f", "g", "joint"});
    return sum_pair(sub("f"), sub("g"), parse_joint(need(j, path, "joint"), path + ".joint"));
  }
  if (type == "moreau_env") {
    only_keys(j, path, {"type", "gamma", "f"});
    return moreau_env(num("gamma"), sub("f"));
  }
  if (type == "moreau_inf_conv") {
    only_keys(j, path, {"type", "gamma", "f"});
    return moreau_inf_conv(sub("f"), num("gamma"));
  }
  if (type == "offset") {
    only_keys(j, path, {"type", "c", "f"});
    return offset(num("c"), sub("f"));
  }
  schema(path, "unknown function type '" + type + "'");
}

json fn_json(const FunctionSpec& f) {
  auto joint_json = [](const JointSelection& u) {
    if (!kBuiltinJoint.count(u.name)) fail(ErrorKind::NotSerializable, "joint selection '" + u.name + "'");
    return callable_json(u.name, u.params);
  };
  return std::visit(
      Overloaded{
          [](const nodes::Linear& n) { return json{{"type", "linear"}, {"u", vec_json(n.u)}}; },
          [](const nodes::Dist& n) { return json{{"type", "dist"}, {"set", set_json(n.set)}}; },
          [](const nodes::SqDist& n) { return json{{"type", "sq_dist"}, {"set", set_json(n.set)}}; },
          [](const nodes::Indicator& n) { return json{{"type", "indicator"}, {"set", set_json(n.set)}}; },
          [](const nodes::NormPow& n) { return json{{"type", "norm_pow"}, {"p", n.p}, {"dim", n.dim}}; },
          [](const nodes::NegLog&) { return json{{"type", "neg_log"}}; },
          [](const nodes::SqrtShift& n) { return json{{"type", "sqrt_shift"}, {"eta", n.eta}}; },
          [](const nodes::Hyperbolic& n) { return json{{"type", "hyperbolic"}, {"eta", n.eta}}; },
          [](const nodes::AffineMax& n) {
            json ps = json::array();
            for (const auto& p : n.pieces) ps.push_back(json{{"a", vec_json(p.a)}, {"b", p.b}});
            return json{{"type", "affine_max"}, {"pieces", ps}};
          },
          [](const nodes::Scale& n) { return json{{"type", "scale"}, {"lambda", n.lambda}, {"f", fn_json(n.f)}}; },
          [](const nodes::PowerComp& n) {
            return json{{"type", "power_comp"}, {"alpha", n.alpha}, {"f", fn_json(n.f)}};
          },
          [](const nodes::LeftCompose& n) {
            if (!kBuiltinPhi.count(n.phi.name)) fail(ErrorKind::NotSerializable, "phi '" + n.phi.name + "'");
            return json{{"type", "left_compose"}, {"phi", callable_json(n.phi.name, n.phi.params)}, {"f", fn_json(n.f)}};
          },
          [](const nodes::RightLinear& n) {
            json rows = json::array();
            for (Eigen::Index r = 0; r < n.L.rows(); ++r) {
              std::vector<double> row(static_cast<std::size_t>(n.L.cols()));
              for (Eigen::Index c = 0; c < n.L.cols(); ++c) row[static_cast<std::size_t>(c)] = n.L(r, c);
              rows.push_back(row);
            }
            return json{{"type", "right_linear"}, {"L", rows}, {"f", fn_json(n.f)}};
          },
          [&](const nodes::ConvexComb& n) {
            return json{{"type", "convex_comb"}, {"alpha", n.alpha}, {"f", fn_json(n.f)},
                        {"g", fn_json(n.g)}, {"joint", joint_json(n.joint)}};
          },
          [&](const nodes::SumPair& n) {
            return json{{"type", "sum_pair"}, {"f", fn_json(n.f)}, {"g", fn_json(n.g)}, {"joint", joint_json(n.joint)}};
          },
          [](const nodes::MoreauEnv& n) {
            return json{{"type", "moreau_env"}, {"gamma", n.gamma}, {"f", fn_json(n.f)}};
          },
          [](const nodes::InfConv& n) {
            if (n.minimizer.name != "prox" || n.joint.name != "moreau_gradient" || n.minimizer.params.size() != 1) {
              fail(ErrorKind::NotSerializable, "inf-convolution with minimizer '" + n.minimizer.name + "'");
            }
            return json{{"type", "moreau_inf_conv"}, {"gamma", n.minimizer.params[0]}, {"f", fn_json(n.f)}};
          },
          [](const nodes::Offset& n) { return json{{"type", "offset"}, {"c", n.c}, {"f", fn_json(n.f)}}; },
      },
      f.node().v);
}

json parse_text(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, std::string("malformed JSON: ") + e.what());
  }
}

ControlSequence parse_control(const json& j) {
  const std::string path = "control";
  if (j.is_string()) {
    if (j.get<std::string>() == "cyclic") return ControlSequence::cyclic();
    schema(path, "unknown control '" + j.get<std::string>() + "'");
  }
  if (!j.is_object()) schema(path, "expected a control record");
  const std::string type = need(j, path, "type").get<std::string>();
  if (type == "cyclic") {
    only_keys(j, path, {"type"});
    return ControlSequence::cyclic();
  }
  if (type == "quasi_cyclic") {
    only_keys(j, path, {"type", "windows"});
    return ControlSequence::quasi_cyclic(counts(need(j, path, "windows"), path + ".windows"));
  }
  if (type == "explicit") {
    only_keys(j, path, {"type", "indices", "windows"});
    std::vector<std::size_t> windows;
    if (j.contains("windows")) windows = counts(j.at("windows"), path + ".windows");
    return ControlSequence::explicit_list(counts(need(j, path, "indices"), path + ".indices"), windows);
  }
  schema(path, "unknown control type '" + type + "'");
}

json control_json(const ControlSequence& c) {
  switch (c.kind) {
    case ControlSequence::Kind::Cyclic: return json{{"type", "cyclic"}};
    case ControlSequence::Kind::QuasiCyclic: return json{{"type", "quasi_cyclic"}, {"windows", c.windows}};
    case ControlSequence::Kind::Explicit: {
      json j{{"type", "explicit"}, {"indices", c.indices}};
      if (!c.windows.empty()) j["windows"] = c.windows;
      return j;
    }
  }
  return json{{"type", "cyclic"}};
}

}  // namespace

FunctionSpec parse_function(const std::string& text, std::size_t dimension) {
  return parse_fn(parse_text(text), "function", dimension);
}

std::string serialize_function(const FunctionSpec& f) { return fn_json(f).dump(); }

Problem parse_problem(const std::string& text) {
  const json j = parse_text(text);
  only_keys(j, "problem", {"dimension", "functions", "selections", "control", "relaxation", "epsilon",
                           "x0", "tol", "max_iter", "feasible_witness"});
  Problem p;
  try {
    p.dimension = static_cast<std::size_t>(count(need(j, "problem", "dimension"), "dimension"));
    if (p.dimension < 1) schema("dimension", "must be >= 1");
    const json& fs = need(j, "problem", "functions");
    if (!fs.is_array() || fs.empty()) schema("functions", "expected a nonempty array");
    for (std::size_t i = 0; i < fs.size(); ++i) {
      p.functions.push_back(parse_fn(fs[i], "functions[" + std::to_string(i) + "]", p.dimension));
    }
    if (j.contains("selections")) {
      const json& ss = j.at("selections");
      if (!ss.is_array()) schema("selections", "expected an array of strategy names");
      for (const auto& s : ss) {
        if (!s.is_string()) schema("selections", "expected strategy names");
        p.selections.push_back(parse_selection(s.get<std::string>()));
      }
    }
    if (j.contains("control")) p.control = parse_control(j.at("control"));
    if (j.contains("relaxation")) {
      const json& r = j.at("relaxation");
      p.relaxation.values = r.is_array() ? numbers(r, "relaxation") : std::vector<double>{number(r, "relaxation")};
    }
    if (j.contains("epsilon")) p.epsilon = number(j.at("epsilon"), "epsilon");
    p.x0 = vec(need(j, "problem", "x0"), "x0");
    if (j.contains("tol")) p.tol = number(j.at("tol"), "tol");
    if (j.contains("max_iter")) p.max_iter = count(j.at("max_iter"), "max_iter");
    if (j.contains("feasible_witness")) p.feasible_witness = vec(j.at("feasible_witness"), "feasible_witness");
  } catch (const json::exception& e) {
    fail(ErrorKind::SchemaError, e.what());
  }
  return p;
}

std::string serialize_problem(const Problem& p) {
  json j;
  j["dimension"] = p.dimension;
  json fs = json::array();
  for (const auto& f : p.functions) fs.push_back(fn_json(f));
  j["functions"] = fs;
  if (!p.selections.empty()) {
    json ss = json::array();
    for (const auto& s : p.selections) ss.push_back(to_string(s));
    j["selections"] = ss;
  }
  j["control"] = control_json(p.control);
  j["relaxation"] = p.relaxation.values;
  j["epsilon"] = p.epsilon;
  j["x0"] = vec_json(p.x0);
  j["tol"] = p.tol;
  j["max_iter"] = p.max_iter;
  if (p.feasible_witness) j["feasible_witness"] = vec_json(*p.feasible_witness);
  return j.dump(2) + "\n";
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void write_trace(std::ostream& out, const Problem& p, const SolveTrace& trace) {
  const bool witness = p.feasible_witness.has_value();
  out << "n,index,lambda,residual,step_norm" << (witness ? ",dist_to_witness" : "") << "\n";
  for (const auto& r : trace.rows) {
    out << r.n << ',' << r.index << ',' << format_double(r.lambda) << ',' << format_double(r.residual) << ','
        << format_double(r.step_norm);
    if (witness) out << ',' << format_double(r.dist_to_witness.value_or(0.0));
    out << "\n";
  }
  out << "# status=" << to_string(trace.status) << " iterations=" << trace.rows.size()
      << " final_residual=" << format_double(trace.final_residual) << " x_final=";
  for (std::size_t i = 0; i < trace.x_final.dim(); ++i) {
    out << (i ? ";" : "") << format_double(trace.x_final[i]);
  }
  out << " assumption=subgradients_bounded_on_bounded_sets\n";
}

}  // namespace subproj
