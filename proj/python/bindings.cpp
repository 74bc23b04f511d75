#include <pybind11/eigen.h>
#include <pybind11/operators.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <limits>

#include "subproj/analysis.hpp"
#include "subproj/calculus.hpp"
#include "subproj/io.hpp"
#include "subproj/prox.hpp"

namespace py = pybind11;
using namespace subproj;

namespace {

using Coords = std::vector<double>;

Vector vec(const Coords& c) { return Vector(std::span<const double>(c)); }

py::dict outcome(const ProjOutcome& r) {
  py::dict d;
  d["point"] = r.point.to_std();
  d["status"] = std::string(to_string(r.status));
  d["f_value"] = r.f_value;
  d["subgradient"] = r.subgradient_used ? py::cast(r.subgradient_used->to_std()) : py::none();
  return d;
}

JointSelection joint_by_name(const std::string& name, const Coords& params) {
  if (name == "concentric_balls" && params.size() == 2) {
    return concentric_balls_selection(params[0], params[1]);
  }
  if (name == "common_gradient") return common_gradient_selection(vec(params));
  fail(ErrorKind::InvalidArgument, "unknown joint selection '" + name + "'");
}

PhiPair phi_by_name(const std::string& name, const Coords& params) {
  if (name == "identity") return phi_identity();
  if (name == "cube") return phi_cube();
  if (name == "abs_power" && params.size() == 1) return phi_abs_power(params[0]);
  fail(ErrorKind::InvalidArgument, "unknown phi '" + name + "'");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Subgradient projectors of convex functions";

  static py::exception<Error> error(m, "SubprojError");
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::set_error(error, e.what());
    }
  });

  py::class_<SetSpec>(m, "SetSpec")
      .def_static("ball", [](const Coords& c, double r) { return SetSpec::ball(vec(c), r); })
      .def_static("halfspace", [](const Coords& a, double b) { return SetSpec::halfspace(vec(a), b); })
      .def_static("box", [](const Coords& lo, const Coords& hi) { return SetSpec::box(vec(lo), vec(hi)); })
      .def_static("point", [](const Coords& c) { return SetSpec::point(vec(c)); })
      .def_property_readonly("dim", &SetSpec::dim)
      .def("project", [](const SetSpec& s, const Coords& x) { return project_set(s, vec(x)).to_std(); })
      .def(py::self == py::self);

  py::class_<FunctionSpec>(m, "FunctionSpec")
      .def_property_readonly("dim", &FunctionSpec::dim)
      .def("describe", &FunctionSpec::describe)
      .def("__repr__", &FunctionSpec::describe)
      .def("__eq__", [](const FunctionSpec& a, const FunctionSpec& b) { return a == b; })
      .def("to_json", &serialize_function);

  m.def("linear", [](const Coords& u) { return linear(vec(u)); });
  m.def("dist", &dist);
  m.def("sq_dist", &sq_dist);
  m.def("indicator", &indicator);
  m.def("norm_pow", &norm_pow, py::arg("p"), py::arg("dim"));
  m.def("neg_log", &neg_log);
  m.def("sqrt_shift", &sqrt_shift);
  m.def("hyperbolic", &hyperbolic);
  m.def("affine_max", [](const std::vector<std::pair<Coords, double>>& pieces) {
    std::vector<AffinePiece> ps;
    for (const auto& [a, b] : pieces) ps.push_back(AffinePiece{vec(a), b});
    return affine_max(std::move(ps));
  });
  m.def("scale", &scale);
  m.def("power_comp", &power_comp);
  m.def("offset", &offset);
  m.def("moreau_env", &moreau_env);
  m.def("moreau_inf_conv", &moreau_inf_conv);
  m.def("left_compose", [](const std::string& phi, const FunctionSpec& f, const Coords& params) {
    return left_compose(phi_by_name(phi, params), f);
  }, py::arg("phi"), py::arg("f"), py::arg("params") = Coords{});
  m.def("right_linear", [](const Matrix& L, const FunctionSpec& f) { return right_linear(L, f); });
  m.def("convex_comb", [](double alpha, const FunctionSpec& f, const FunctionSpec& g,
                          const std::string& joint, const Coords& params) {
    return convex_comb(alpha, f, g, joint_by_name(joint, params));
  });
  m.def("sum_pair", [](const FunctionSpec& f, const FunctionSpec& g, const std::string& joint,
                       const Coords& params) { return sum_pair(f, g, joint_by_name(joint, params)); });
  m.def("parse_function", &parse_function, py::arg("text"), py::arg("dimension"));

  m.def("eval", [](const FunctionSpec& f, const Coords& x) { return eval(f, vec(x)).as_double(); });
  m.def("subgradient", [](const FunctionSpec& f, const Coords& x, const std::string& s) {
    return subgradient(f, vec(x), parse_selection(s)).to_std();
  }, py::arg("f"), py::arg("x"), py::arg("strategy") = "least_index");

  m.def("sproj", [](const FunctionSpec& f, const Coords& x, const std::string& s) {
    return outcome(sproj(f, vec(x), parse_selection(s)));
  }, py::arg("f"), py::arg("x"), py::arg("strategy") = "least_index");
  m.def("sproj_set", [](const FunctionSpec& f, const Coords& x, std::size_t k) {
    std::vector<Coords> out;
    for (const auto& p : sproj_set(f, vec(x), k)) out.push_back(p.to_std());
    return out;
  });
  m.def("relax", [](const Coords& x, const Coords& p, double l) { return relax(vec(x), vec(p), l).to_std(); });
  m.def("fejer_gap", [](const Coords& x, const Coords& p, const Coords& y) {
    return fejer_gap(vec(x), vec(p), vec(y));
  });

  m.def("sproj_power", [](double a, const FunctionSpec& f, const Coords& x) {
    return sproj_power(a, f, vec(x)).to_std();
  });
  m.def("sproj_rightlinear", [](const Matrix& L, const FunctionSpec& f, const Coords& y) {
    return sproj_rightlinear(L, f, vec(y)).to_std();
  });
  m.def("acceleration_gap", [](const FunctionSpec& f, double a, const Coords& x) {
    return acceleration_gap(f, a, vec(x));
  });

  m.def("prox", [](const FunctionSpec& f, double g, const Coords& x) { return prox(f, g, vec(x)).to_std(); });
  m.def("moreau_value", [](const FunctionSpec& f, double g, const Coords& x) { return moreau_value(f, g, vec(x)); });
  m.def("sproj_moreau", [](const FunctionSpec& f, double g, const Coords& x) {
    return sproj_moreau(f, g, vec(x)).to_std();
  });

  m.def("sproj_jacobian", [](const FunctionSpec& f, const Coords& x) { return sproj_jacobian(f, vec(x)); });
  m.def("sproj_deriv_1d", &sproj_deriv_1d);
  m.def("dist_bound_check", [](const FunctionSpec& f, const Coords& x) {
    const DistBound b = dist_bound_check(f, vec(x));
    return py::make_tuple(b.lhs, b.rhs);
  });

  m.def("solve", [](const std::string& problem_json) {
    const Problem p = parse_problem(problem_json);
    const SolveResult r = solve(p);
    py::dict d;
    d["x"] = r.x.to_std();
    d["status"] = std::string(to_string(r.trace.status));
    d["iterations"] = r.trace.rows.size();
    d["final_residual"] = r.trace.final_residual;
    return d;
  });
  m.def("normalize_problem", [](const std::string& text) { return serialize_problem(parse_problem(text)); });
}
