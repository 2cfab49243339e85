#include <pybind11/complex.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlsgas/experiment.hpp"

namespace py = pybind11;
using namespace nlsgas;

namespace {

RHSolution solve_averaged_at(const EigenvalueDomain& domain, const InterpolantR& r,
                             const ContourGrid& grid, double x, double t, bool with_dx) {
  const auto kernel = std::make_shared<const AveragedKernel>(domain, r);
  const auto g = std::make_shared<const ContourGrid>(grid);
  return averaged_solution(kernel, g, SpacetimePoint(x, t), with_dx);
}

std::string run_json(const std::string& which, const std::string& config_json) {
  const ExperimentConfig cfg = ExperimentConfig::from_json(nlohmann::json::parse(config_json));
  nlohmann::json out;
  if (which == "lln") {
    const LlnSummary s = run_lln(cfg);
    out = {{"valid", s.valid}, {"slope_dpsi", s.slope_dpsi}, {"slope_dmod", s.slope_dmod}};
    nlohmann::json rows = nlohmann::json::array();
    for (const LlnRow& r : s.rows)
      rows.push_back({{"N", r.N},
                      {"x", r.x},
                      {"t", r.t},
                      {"mean_abs_dpsi", r.mean_abs_dpsi},
                      {"se_abs_dpsi", r.se_abs_dpsi},
                      {"mean_abs_dmod", r.mean_abs_dmod},
                      {"se_abs_dmod", r.se_abs_dmod},
                      {"failures", r.failures}});
    out["rows"] = rows;
  } else if (which == "clt") {
    const CltSummary s = run_clt(cfg);
    out = {{"valid", s.valid}};
    nlohmann::json rows = nlohmann::json::array();
    for (const CltRow& r : s.rows)
      rows.push_back({{"N", r.N},
                      {"x", r.x},
                      {"t", r.t},
                      {"emp_var_G1", r.emp_var_g1},
                      {"pred_var_G1", r.pred_var_g1},
                      {"se_var_G1", r.se_var_g1},
                      {"emp_var_G2", r.emp_var_g2},
                      {"pred_var_G2", r.pred_var_g2},
                      {"se_var_G2", r.se_var_g2},
                      {"member_frac", r.member_frac},
                      {"degenerate", r.degenerate},
                      {"skew", {r.skew_re, r.skew_im, r.skew_g2}},
                      {"exkurt", {r.exkurt_re, r.exkurt_im, r.exkurt_g2}},
                      {"mean_absU_scaled", r.mean_absU_scaled},
                      {"failures", r.failures}});
    out["rows"] = rows;
  } else if (which == "corr") {
    const CorrSummary s = run_corr(cfg);
    out = {{"valid", s.valid},
           {"empirical", {s.empirical.real(), s.empirical.imag()}},
           {"predicted", {s.predicted.real(), s.predicted.imag()}},
           {"se", {s.se_re, s.se_im}},
           {"identity_gap", s.identity_gap},
           {"failures", s.failures}};
  } else if (which == "verify") {
    const VerifyReport rep = run_verify(cfg);
    out = {{"all_pass", rep.all_pass()}};
    nlohmann::json checks = nlohmann::json::array();
    for (const CheckResult& c : rep.checks)
      checks.push_back(
          {{"name", c.name}, {"value", c.value}, {"tol", c.tol}, {"pass", c.pass}});
    out["checks"] = checks;
  } else {
    throw std::invalid_argument("unknown experiment: " + which);
  }
  return out.dump();
}

}  // namespace

PYBIND11_MODULE(nlsgas, m) {
  m.doc() = "random N-soliton solutions of the focusing NLS equation and their "
            "soliton-gas limit";

  py::class_<EigenvalueDomain>(m, "EigenvalueDomain")
      .def_static("disk", &EigenvalueDomain::disk, py::arg("center"), py::arg("radius"),
                  py::arg("n_radial") = 24, py::arg("n_angular") = 64, py::arg("d_min") = 0.05)
      .def_static("rectangle", &EigenvalueDomain::rectangle, py::arg("x1"), py::arg("x2"),
                  py::arg("y1"), py::arg("y2"), py::arg("n_x") = 32, py::arg("n_y") = 32,
                  py::arg("d_min") = 0.05)
      .def_property_readonly("area", &EigenvalueDomain::area)
      .def_property_readonly("centroid", &EigenvalueDomain::centroid)
      .def_property_readonly("circumradius", &EigenvalueDomain::circumradius)
      .def("contains", &EigenvalueDomain::contains)
      .def("__repr__", &EigenvalueDomain::describe);

  py::class_<InterpolantR>(m, "InterpolantR")
      .def_static("constant", &InterpolantR::constant)
      .def_static("affine", &InterpolantR::affine)
      .def_static("exponential", &InterpolantR::exponential)
      .def("__call__", &InterpolantR::operator())
      .def("star", &InterpolantR::star);

  py::class_<SpectralSample>(m, "SpectralSample")
      .def_readonly("lam", &SpectralSample::lambda)
      .def_readonly("c", &SpectralSample::c)
      .def_readonly("seed", &SpectralSample::seed)
      .def_property_readonly("n", &SpectralSample::n);

  m.def("sample_eigenvalues", &sample_eigenvalues, py::arg("domain"), py::arg("n"),
        py::arg("seed"));
  m.def("norming_constants", &norming_constants, py::arg("lam"), py::arg("r"));
  m.def("evolve_norming", &evolve_norming, py::arg("c"), py::arg("lam"), py::arg("t"));
  m.def("make_sample", &make_sample, py::arg("domain"), py::arg("r"), py::arg("n"),
        py::arg("seed"));

  m.def("nsoliton_residue", &nsoliton_residue, py::arg("sample"), py::arg("x"), py::arg("t"));
  m.def("nsoliton_dressing", &nsoliton_dressing, py::arg("sample"), py::arg("x"),
        py::arg("t"));
  m.def("amplitude_bound", &amplitude_bound);

  py::class_<ContourGrid>(m, "ContourGrid")
      .def_static("build", &ContourGrid::build, py::arg("domain"),
                  py::arg("nodes_per_circle"), py::arg("clearance"))
      .def_property_readonly("radius", &ContourGrid::radius)
      .def_property_readonly("length", &ContourGrid::length)
      .def_property_readonly("nodes", &ContourGrid::nodes);

  py::class_<RHSolution>(m, "RHSolution")
      .def_property_readonly("psi", &recover_field)
      .def_property_readonly("modsq", &recover_modsq)
      .def_readonly("sie_residual", &RHSolution::sie_residual)
      .def("eval_M",
           [](const RHSolution& sol, cdouble z) {
             const Mat2 M = eval_M_off(sol, z);
             return std::vector<cdouble>{M(0, 0), M(0, 1), M(1, 0), M(1, 1)};
           });

  m.def("solve_averaged", &solve_averaged_at, py::arg("domain"), py::arg("r"),
        py::arg("grid"), py::arg("x"), py::arg("t"), py::arg("with_dx") = true);

  m.def(
      "solve_random",
      [](const SpectralSample& s, const ContourGrid& grid, double x, double t) {
        const auto g = std::make_shared<const ContourGrid>(grid);
        const JumpField jump = JumpField::random(s, SpacetimePoint(x, t));
        RHSolution sol = solve_sie(jump, g);
        return solve_sie_dx(jump, sol);
      },
      py::arg("sample"), py::arg("grid"), py::arg("x"), py::arg("t"));

  m.def(
      "linear_statistic",
      [](const SpectralSample& s, const EigenvalueDomain& d, const InterpolantR& r,
         cdouble z) { return linear_statistic(s, AveragedKernel(d, r), z); },
      py::arg("sample"), py::arg("domain"), py::arg("r"), py::arg("z"));

  m.def(
      "g1_variance",
      [](const EigenvalueDomain& d, const InterpolantR& r, const ContourGrid& grid, double x,
         double t) {
        const auto kernel = std::make_shared<const AveragedKernel>(d, r);
        const auto g = std::make_shared<const ContourGrid>(grid);
        const RHSolution avg = averaged_solution(kernel, g, SpacetimePoint(x, t), true);
        const CltMoments mom = clt_moments_g1(avg, *kernel);
        return py::make_tuple(mom.variance, mom.covariance);
      },
      py::arg("domain"), py::arg("r"), py::arg("grid"), py::arg("x"), py::arg("t"));

  m.def("default_config",
        [] { return ExperimentConfig::defaults().to_json().dump(); });
  m.def("config_hash", [](const std::string& config_json) {
    return ExperimentConfig::from_json(nlohmann::json::parse(config_json)).content_hash();
  });
  m.def("run_experiment", &run_json, py::arg("which"), py::arg("config_json"),
        "run lln|clt|corr|verify from a JSON config string; returns a JSON summary");
}
