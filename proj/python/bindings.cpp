/*
 * Copyright 2026 The meanfield Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

// Python bindings.  Fields cross the boundary as (nx, ny) float64 arrays
// wrapped in Field objects; results come back as plain dicts.

#include <cmath>

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "meanfield/blowup.hpp"
#include "meanfield/error.hpp"
#include "meanfield/functional.hpp"
#include "meanfield/green.hpp"
#include "meanfield/hspec.hpp"
#include "meanfield/solver.hpp"
#include "meanfield/torus.hpp"

namespace py = pybind11;
using namespace meanfield;

namespace {

Field field_from_array(const FlatTorus& torus, py::array_t<double, py::array::c_style | py::array::forcecast> a) {
  if (a.ndim() != 2 || a.shape(0) != torus.nx() || a.shape(1) != torus.ny()) {
    throw InvalidArgument("array shape must be (nx, ny) of the torus");
  }
  return Field(torus, std::vector<double>(a.data(), a.data() + a.size()));
}

py::array_t<double> field_to_array(const Field& f) {
  const FlatTorus& t = f.torus();
  py::array_t<double> out({t.nx(), t.ny()});
  std::copy(f.values().begin(), f.values().end(), out.mutable_data());
  return out;
}

py::dict energy_dict(const EnergyBreakdown& e) {
  py::dict d;
  d["dirichlet_half"] = e.dirichlet_half;
  d["linear"] = e.linear;
  d["logterm"] = e.logterm;
  d["total"] = e.total;
  d["eps"] = e.eps;
  return d;
}

py::dict expansion_dict(const GreenExpansion& e) {
  py::dict d;
  d["A"] = e.A;
  d["b1"] = e.b1;
  d["b2"] = e.b2;
  d["c1"] = e.c1;
  d["c2"] = e.c2;
  d["c3"] = e.c3;
  d["fit_residual"] = e.fit_residual;
  d["condition"] = e.condition;
  d["samples"] = e.samples;
  return d;
}

py::dict condition_dict(const ConditionResult& c) {
  py::dict d;
  d["holds"] = c.holds;
  d["margin"] = c.margin;
  return d;
}

StepRule step_rule_of(const std::string& s) {
  if (s == "fixed") return StepRule::fixed;
  if (s == "bb") return StepRule::bb;
  if (s == "backtracking") return StepRule::backtracking;
  throw InvalidArgument("step_rule must be fixed, backtracking or bb");
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Mean-field equation on flat tori: Green function, functional, solver, blow-up lab";

  py::register_exception<InvalidArgument>(m, "InvalidArgument", PyExc_ValueError);
  py::register_exception<NumericalError>(m, "NumericalError", PyExc_RuntimeError);

  py::class_<FlatTorus>(m, "FlatTorus")
      .def(py::init([](double v, int nx, int ny) { return ny > 0 ? make_torus(v, nx, ny) : make_torus(v, nx); }),
           py::arg("v"), py::arg("nx"), py::arg("ny") = 0)
      .def_property_readonly("v", &FlatTorus::modulus)
      .def_property_readonly("nx", &FlatTorus::nx)
      .def_property_readonly("ny", &FlatTorus::ny)
      .def_property_readonly("injectivity_radius", &FlatTorus::injectivity_radius)
      .def_property_readonly("normal_spacing", &FlatTorus::normal_spacing)
      .def("node", [](const FlatTorus& t, int i, int j) {
        const Point p = t.node(i, j);
        return py::make_tuple(p.x, p.y);
      })
      .def("__repr__", [](const FlatTorus& t) {
        return "FlatTorus(v=" + std::to_string(t.modulus()) + ", nx=" + std::to_string(t.nx()) +
               ", ny=" + std::to_string(t.ny()) + ")";
      });

  py::class_<Field>(m, "Field")
      .def(py::init(&field_from_array), py::arg("torus"), py::arg("values"))
      .def_static("constant", &Field::constant)
      .def_property_readonly("torus", &Field::torus)
      .def_property_readonly("values", &field_to_array)
      .def("max", &Field::max)
      .def("min", &Field::min)
      .def("__add__", [](const Field& a, const Field& b) { return a + b; })
      .def("__sub__", [](const Field& a, const Field& b) { return a - b; })
      .def("__mul__", [](const Field& a, const Field& b) { return a * b; })
      .def("__add__", [](const Field& a, double c) { return a + c; })
      .def("__mul__", [](const Field& a, double c) { return a * c; });

  m.def("integrate", &integrate);
  m.def("dirichlet_energy", &dirichlet_energy);
  m.def("laplacian", &laplacian);
  m.def("hspec_field", [](const std::string& spec, const FlatTorus& t) { return parse_hspec(spec).to_field(t); },
        py::arg("spec"), py::arg("torus"));

  m.def("bernoulli2", &bernoulli2);
  m.def("green_eval", [](double x, double y, double v) { return green_eval({x, y}, v); },
        py::arg("x"), py::arg("y"), py::arg("v"));
  m.def("green_fourier_oracle", [](double x, double y, double v, int modes) {
        return green_fourier_oracle({x, y}, v, modes);
      }, py::arg("x"), py::arg("y"), py::arg("v"), py::arg("modes") = 128);
  m.def("a_v", [](double v) { return a_v(v); }, py::arg("v"));
  m.def("reference_A0", &reference_A0);
  m.def("find_v_star", [](double lo, double hi, double tol) {
        const VStarResult r = find_v_star(lo, hi, tol);
        py::dict d;
        d["v_star"] = r.v_star;
        d["A_v_star"] = r.a_v_star;
        d["iterations"] = r.iterations;
        return d;
      }, py::arg("v_lo") = 1.0, py::arg("v_hi") = 10.0, py::arg("tol") = 1e-10);
  m.def("green_field", [](const FlatTorus& t, double px, double py_) {
        return green_field(t, Point{px, py_}).values;
      }, py::arg("torus"), py::arg("px") = 0.0, py::arg("py") = 0.0);
  m.def("integrate_green", [](const FlatTorus& t, double px, double py_) {
        return integrate_green(green_field(t, Point{px, py_}));
      }, py::arg("torus"), py::arg("px") = 0.0, py::arg("py") = 0.0);
  m.def("weak_laplace_residual", [](const Field& phi, double px, double py_) {
        return weak_laplace_residual(green_field(phi.torus(), Point{px, py_}), phi);
      }, py::arg("phi"), py::arg("px") = 0.0, py::arg("py") = 0.0);
  m.def("extract_expansion", [](const Field& g, double px, double py_) {
        return expansion_dict(extract_expansion(g, Point{px, py_}));
      }, py::arg("g"), py::arg("px") = 0.0, py::arg("py") = 0.0);

  m.def("eval_J", [](const Field& u, const Field& h, double eps) { return energy_dict(eval_J(u, h, eps)); },
        py::arg("u"), py::arg("h"), py::arg("eps") = 0.0);
  m.def("l2_gradient", &l2_gradient, py::arg("u"), py::arg("h"), py::arg("eps") = 0.0);
  m.def("residual_eq5", &residual_eq5, py::arg("u"), py::arg("h"), py::arg("eps") = 0.0);
  m.def("normalize_H1", &normalize_H1);
  m.def("mt_ratio", &mt_ratio, py::arg("u"), py::arg("coeff") = kMtCoefficient);
  m.def("truncated_bubble_sample", [](const FlatTorus& t, double delta, double R0, double coeff) {
        const BubbleFamilySample s = truncated_bubble_sample(t, delta, R0, coeff);
        py::dict d;
        d["delta"] = s.delta;
        d["dirichlet"] = s.dirichlet;
        d["mean"] = s.mean;
        d["log_exp_integral"] = s.log_exp_integral;
        d["ratio"] = s.ratio;
        return d;
      }, py::arg("torus"), py::arg("delta"), py::arg("R0"), py::arg("coeff") = kMtCoefficient);
  m.def("check_thm31", [](const Field& h, double A) { return condition_dict(check_thm31(h, A)); });
  m.def("check_thm12", [](const Field& h) {
        const HLocalData hd = h_local_data(h);
        const GreenField g = green_field(h.torus(), hd.p0);
        return condition_dict(check_thm12(hd, extract_expansion(g.values, hd.p0), 0.0));
      });

  m.def("minimize", [](const Field& h, double eps, const std::string& step_rule, const std::string& init,
                       std::uint64_t seed, int max_iters, double grad_tol) {
        SolverConfig cfg;
        cfg.eps = eps;
        cfg.step_rule = step_rule_of(step_rule);
        if (init == "random") {
          cfg.init = InitKind::random;
        } else if (init != "zero") {
          throw InvalidArgument("init must be zero or random");
        }
        cfg.seed = seed;
        cfg.max_iters = max_iters;
        cfg.grad_tol = grad_tol;
        SolveResult r = [&] {
          py::gil_scoped_release release;
          return minimize(h, cfg);
        }();
        py::dict d;
        d["u"] = r.u;
        d["energy"] = energy_dict(r.energy);
        d["residual"] = r.residual;
        d["iters"] = r.iters;
        d["converged"] = r.converged;
        d["peak_value"] = r.peak_value;
        d["peak_point"] = py::make_tuple(r.peak_point.x, r.peak_point.y);
        d["stop_reason"] = r.stop_reason;
        return d;
      }, py::arg("h"), py::arg("eps") = 0.0, py::arg("step_rule") = "backtracking", py::arg("init") = "zero",
      py::arg("seed") = 0, py::arg("max_iters") = 5000, py::arg("grad_tol") = 1e-8);

  py::class_<BlowupLab>(m, "BlowupLab")
      .def(py::init([](const Field& h, double px, double py_) { return BlowupLab(h, Point{px, py_}); }),
           py::arg("h"), py::arg("px") = 0.0, py::arg("py") = 0.0)
      .def_property_readonly("A", &BlowupLab::A)
      .def("limit_constant", &BlowupLab::limit_constant)
      .def("energy", [](const BlowupLab& lab, double eps) { return energy_dict(lab.energy(eps)); })
      .def("sweep", [](const BlowupLab& lab, double eps_min, double eps_max, int n) {
        std::vector<BlowupSample> s;
        {
          py::gil_scoped_release release;
          s = sweep(lab, log_spaced(eps_min, eps_max, n));
        }
        py::list out;
        for (const BlowupSample& b : s) out.append(py::make_tuple(b.eps, b.J, b.regressor));
        return out;
      });

  m.def("fit_asymptote", [](const std::vector<double>& eps, const std::vector<double>& J, bool include_eps) {
        if (eps.size() != J.size()) throw InvalidArgument("eps and J must have equal length");
        std::vector<BlowupSample> s(eps.size());
        for (std::size_t i = 0; i < eps.size(); ++i) {
          s[i].eps = eps[i];
          s[i].J = J[i];
          s[i].regressor = eps[i] * -std::log(eps[i]);
        }
        const AsymptoteFit f = fit_asymptote(s, include_eps);
        py::dict d;
        d["constant"] = f.constant;
        d["slope"] = f.slope;
        d["eps_coefficient"] = f.eps_coefficient;
        d["residual"] = f.residual;
        d["condition"] = f.condition;
        d["samples"] = f.samples;
        return d;
      }, py::arg("eps"), py::arg("J"), py::arg("include_eps") = false);
}
