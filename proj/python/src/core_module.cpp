#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <optional>
#include <string>

#include <nlohmann/json.hpp>

#include "pdpath/continuation.hpp"
#include "pdpath/diagnostics.hpp"
#include "pdpath/experiment.hpp"
#include "pdpath/io.hpp"
#include "pdpath/linops.hpp"
#include "pdpath/pareto.hpp"
#include "pdpath/prox.hpp"
#include "pdpath/solver.hpp"

namespace py = pybind11;
using namespace pdpath;

namespace {

std::string op_kind_name(OpKind k) {
  switch (k) {
    case OpKind::Dense: return "dense";
    case OpKind::Conv2d: return "conv2d";
    case OpKind::Grad2d: return "grad2d";
    case OpKind::Zero: return "zero";
    case OpKind::Identity: return "identity";
    case OpKind::Scaled: return "composite-scaled";
  }
  return "?";
}

std::string prox_kind_name(ProxKind k) {
  switch (k) {
    case ProxKind::Zero: return "zero";
    case ProxKind::BoxIndicator: return "box_indicator";
    case ProxKind::L1: return "l1";
    case ProxKind::GroupL21: return "group_l21";
    case ProxKind::SquaredL2: return "squared_l2";
  }
  return "?";
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Primal-dual continuation solver for composite convex problems";

  py::class_<NormBound>(m, "NormBound")
      .def_readonly("value", &NormBound::value)
      .def_readonly("tight", &NormBound::tight);

  py::class_<LinearMap>(m, "LinearMap")
      .def_static("identity", &LinearMap::identity, py::arg("dim"))
      .def_static("zero", &LinearMap::zero, py::arg("in_dim"), py::arg("out_dim"))
      .def_static("dense", &LinearMap::dense, py::arg("rows"), py::arg("cols"),
                  py::arg("entries"))
      .def_static("dense_from_csv", &LinearMap::dense_from_csv, py::arg("path"))
      .def_static("grad2d", &LinearMap::grad2d, py::arg("height"), py::arg("width"))
      .def_static("conv2d", &LinearMap::conv2d, py::arg("height"), py::arg("width"),
                  py::arg("kh"), py::arg("kw"), py::arg("kernel"),
                  py::arg("periodic") = true)
      .def_static("scaled", &LinearMap::scaled, py::arg("factor"), py::arg("inner"))
      .def_property_readonly("in_dim", &LinearMap::in_dim)
      .def_property_readonly("out_dim", &LinearMap::out_dim)
      .def_property_readonly("kind",
                             [](const LinearMap& a) { return op_kind_name(a.kind()); })
      .def("apply", &LinearMap::apply, py::arg("x"))
      .def("adjoint", &LinearMap::adjoint, py::arg("y"))
      .def("norm_bound", [](const LinearMap& a) { return a.norm_bound(); });

  m.def("power_iteration_norm", &power_iteration_norm, py::arg("A"),
        py::arg("tol") = 1e-9, py::arg("max_iters") = 10000);
  m.def("norm_bound", &norm_bound, py::arg("A"), py::arg("tol") = 1e-9,
        py::arg("max_iters") = 10000);

  py::class_<ProxFunction>(m, "ProxFunction")
      .def_static("zero", &ProxFunction::zero, py::arg("dim"))
      .def_static("box_indicator", &ProxFunction::box_indicator, py::arg("dim"),
                  py::arg("lo"), py::arg("hi"))
      .def_static("l1", &ProxFunction::l1, py::arg("dim"))
      .def_static("group_l21", &ProxFunction::group_l21, py::arg("dim"),
                  py::arg("group_size"))
      .def_static("squared_l2", &ProxFunction::squared_l2, py::arg("center"))
      .def_property_readonly("dim", &ProxFunction::dim)
      .def_property_readonly(
          "kind", [](const ProxFunction& f) { return prox_kind_name(f.kind()); })
      .def("eval", &ProxFunction::eval, py::arg("u"))
      .def("prox", &ProxFunction::prox, py::arg("scale"), py::arg("a"))
      .def("conjugate_prox", &ProxFunction::conjugate_prox, py::arg("scale"),
           py::arg("a"))
      .def("conjugate_eval", &ProxFunction::conjugate_eval, py::arg("v"))
      .def("conjugate_domain_bounded", &ProxFunction::conjugate_domain_bounded);

  m.def("prox_oracle", &prox_oracle, py::arg("F"), py::arg("scale"), py::arg("a"),
        py::arg("grid_radius"), py::arg("grid_step"));
  m.def("moreau_conjugate_prox", &moreau_conjugate_prox, py::arg("F"),
        py::arg("scale"), py::arg("a"));

  py::class_<SmoothTerm>(m, "SmoothTerm")
      .def_static("zero", &SmoothTerm::zero, py::arg("dim"))
      .def_static("quadratic_distance", &SmoothTerm::quadratic_distance,
                  py::arg("y"))
      .def_static("least_squares", &SmoothTerm::least_squares, py::arg("K"),
                  py::arg("y"))
      .def_readonly("dim", &SmoothTerm::dim)
      .def_readonly("lipschitz", &SmoothTerm::lipschitz)
      .def("value", [](const SmoothTerm& f, const Vec& u) { return f.value(u); })
      .def("gradient",
           [](const SmoothTerm& f, const Vec& u) { return f.gradient(u); });

  py::class_<ProblemSpec>(m, "ProblemSpec")
      .def(py::init<SmoothTerm, ProxFunction, ProxFunction, LinearMap, double,
                    double>(),
           py::arg("f"), py::arg("g"), py::arg("h"), py::arg("A"),
           py::arg("lambda_"), py::arg("mu"))
      .def_readonly("f", &ProblemSpec::f)
      .def_readonly("g", &ProblemSpec::g)
      .def_readonly("h", &ProblemSpec::h)
      .def_readonly("A", &ProblemSpec::A)
      .def_readonly("lambda_", &ProblemSpec::lambda)
      .def_readonly("mu", &ProblemSpec::mu)
      .def("objective",
           py::overload_cast<const Vec&>(&ProblemSpec::objective, py::const_),
           py::arg("u"))
      .def("objective",
           py::overload_cast<const Vec&, double, double>(&ProblemSpec::objective,
                                                         py::const_),
           py::arg("u"), py::arg("lambda_"), py::arg("mu"));

  py::class_<StepSizes>(m, "StepSizes")
      .def(py::init<double, double>(), py::arg("alpha"), py::arg("beta"))
      .def_readwrite("alpha", &StepSizes::alpha)
      .def_readwrite("beta", &StepSizes::beta);

  py::class_<StepCheck>(m, "StepCheck")
      .def_readonly("ok", &StepCheck::ok)
      .def_readonly("slack", &StepCheck::slack)
      .def_readonly("message", &StepCheck::message);

  m.def("validate_steps", &validate_steps, py::arg("alpha"), py::arg("beta"),
        py::arg("lipschitz"), py::arg("norm_a"));
  m.def("default_steps", &default_steps, py::arg("p"));

  py::class_<IterateState>(m, "IterateState")
      .def(py::init<>())
      .def_readwrite("u", &IterateState::u)
      .def_readwrite("v", &IterateState::v)
      .def_readwrite("n", &IterateState::n);

  m.def("initial_state", &initial_state, py::arg("p"));
  m.def("pd_step", &pd_step, py::arg("state"), py::arg("p"), py::arg("s"),
        py::arg("lambda_n"), py::arg("mu_n"));
  m.def("pd_step_dual_first", &pd_step_dual_first, py::arg("state"), py::arg("p"),
        py::arg("s"), py::arg("lambda_n"), py::arg("mu_n"));
  m.def("fixed_point_residual", &fixed_point_residual, py::arg("state"),
        py::arg("p"), py::arg("s"));
  m.def("m_norm", &m_norm, py::arg("x_u"), py::arg("x_v"), py::arg("mu"),
        py::arg("s"), py::arg("A"));

  py::class_<ParamSchedule>(m, "ParamSchedule")
      .def_static("constant", &ParamSchedule::constant, py::arg("value"))
      .def_static("geometric", &ParamSchedule::geometric, py::arg("start"),
                  py::arg("target"), py::arg("rho"))
      .def_static("log_spaced_then_constant",
                  &ParamSchedule::log_spaced_then_constant, py::arg("from_"),
                  py::arg("to"), py::arg("count"))
      .def("__call__", &ParamSchedule::operator(), py::arg("n"))
      .def_property_readonly("target", &ParamSchedule::target)
      .def("certificate_total", &ParamSchedule::certificate_total)
      .def("tail_bound", &ParamSchedule::tail_bound, py::arg("horizon"));

  py::class_<Schedule>(m, "Schedule")
      .def(py::init<ParamSchedule, ParamSchedule>(), py::arg("lambda_"),
           py::arg("mu"))
      .def_static("constant", &Schedule::constant, py::arg("lambda_"),
                  py::arg("mu"))
      .def_readonly("lambda_", &Schedule::lambda)
      .def_readonly("mu", &Schedule::mu);

  py::class_<CertificateReport>(m, "CertificateReport")
      .def_readonly("lambda_partial_sum", &CertificateReport::lambda_partial_sum)
      .def_readonly("mu_partial_sum", &CertificateReport::mu_partial_sum)
      .def_readonly("lambda_tail_bound", &CertificateReport::lambda_tail_bound)
      .def_readonly("mu_tail_bound", &CertificateReport::mu_tail_bound)
      .def_readonly("lambda_sqrt_partial_sum",
                    &CertificateReport::lambda_sqrt_partial_sum)
      .def_readonly("summable", &CertificateReport::summable);

  m.def("certify", &certify, py::arg("schedule"), py::arg("horizon"));

  py::class_<TraceConfig>(m, "TraceConfig")
      .def(py::init<>())
      .def_readwrite("snapshot_every", &TraceConfig::snapshot_every)
      .def_readwrite("record_every", &TraceConfig::record_every);

  py::class_<TrajectoryRow>(m, "TrajectoryRow")
      .def_readonly("n", &TrajectoryRow::n)
      .def_readonly("lambda_n", &TrajectoryRow::lambda_n)
      .def_readonly("mu_n", &TrajectoryRow::mu_n)
      .def_readonly("f", &TrajectoryRow::f)
      .def_readonly("g", &TrajectoryRow::g)
      .def_readonly("hAu", &TrajectoryRow::hAu)
      .def_readonly("objective_target", &TrajectoryRow::objective_target)
      .def_readonly("residual", &TrajectoryRow::residual);

  py::class_<Snapshot>(m, "Snapshot")
      .def_readonly("n", &Snapshot::n)
      .def_readonly("u", &Snapshot::u)
      .def_readonly("v", &Snapshot::v);

  py::class_<Trajectory>(m, "Trajectory")
      .def_readonly("rows", &Trajectory::rows)
      .def_readonly("snapshots", &Trajectory::snapshots)
      .def_readonly("final_state", &Trajectory::final_state)
      .def_readonly("steps", &Trajectory::steps)
      .def_readonly("iterations", &Trajectory::iterations)
      .def_readonly("converged", &Trajectory::converged);

  m.def("run", &run, py::arg("p"), py::arg("schedule"), py::arg("s"),
        py::arg("max_iters"), py::arg("tol"), py::arg("trace") = TraceConfig{},
        py::arg("warm_start") = std::nullopt);
  m.def("run_fixed", &run_fixed, py::arg("p"), py::arg("s"), py::arg("max_iters"),
        py::arg("tol"), py::arg("trace") = TraceConfig{},
        py::arg("warm_start") = std::nullopt);

  m.def("write_trajectory_csv", &write_trajectory_csv, py::arg("path"),
        py::arg("trajectory"));

  py::class_<ParetoRecord>(m, "ParetoRecord")
      .def(py::init<>())
      .def_readwrite("tau1", &ParetoRecord::tau1)
      .def_readwrite("tau2", &ParetoRecord::tau2)
      .def_readwrite("sigma", &ParetoRecord::sigma)
      .def_readwrite("lambda_", &ParetoRecord::lambda)
      .def_readwrite("mu", &ParetoRecord::mu)
      .def_readwrite("n", &ParetoRecord::n)
      .def_readwrite("feasible", &ParetoRecord::feasible);

  m.def("record", &record, py::arg("u"), py::arg("p"), py::arg("lambda_n"),
        py::arg("mu_n"), py::arg("n"));
  m.def("records_from", &records_from, py::arg("trajectory"));

  py::class_<MonotoneViolation>(m, "MonotoneViolation")
      .def_readonly("i", &MonotoneViolation::i)
      .def_readonly("j", &MonotoneViolation::j)
      .def_readonly("slack", &MonotoneViolation::slack);

  py::class_<ConvexityViolation>(m, "ConvexityViolation")
      .def_readonly("i", &ConvexityViolation::i)
      .def_readonly("gap", &ConvexityViolation::gap);

  m.def("check_monotone", &check_monotone, py::arg("records"),
        py::arg("tol") = 1e-5);
  m.def("check_convex", &check_convex, py::arg("records"), py::arg("tol") = 1e-5);
  m.def("subgradient_check", &subgradient_check, py::arg("rec"), py::arg("all"),
        py::arg("tol"));

  py::class_<GridSpec>(m, "GridSpec")
      .def(py::init<>())
      .def_readwrite("lo", &GridSpec::lo)
      .def_readwrite("hi", &GridSpec::hi)
      .def_readwrite("points_per_dim", &GridSpec::points_per_dim)
      .def("spacing", &GridSpec::spacing);

  m.def("value_function_oracle", &value_function_oracle, py::arg("p"),
        py::arg("tau1"), py::arg("tau2"), py::arg("grid"));
  m.def("dual_function_oracle", &dual_function_oracle, py::arg("p"),
        py::arg("tau1"), py::arg("tau2"), py::arg("lambda_"), py::arg("mu"),
        py::arg("grid"));

  py::class_<InexactnessReport>(m, "InexactnessReport")
      .def_readonly("eps", &InexactnessReport::eps)
      .def_readonly("delta", &InexactnessReport::delta)
      .def_readonly("err_norm", &InexactnessReport::err_norm)
      .def_readonly("M1", &InexactnessReport::M1)
      .def_readonly("M2", &InexactnessReport::M2)
      .def_readonly("m2_available", &InexactnessReport::m2_available)
      .def_readonly("sum_err", &InexactnessReport::sum_err)
      .def_readonly("sum_sqrt_eps", &InexactnessReport::sum_sqrt_eps)
      .def_readonly("sum_delta", &InexactnessReport::sum_delta);

  m.def("estimate_M1", &estimate_M1, py::arg("trajectory"), py::arg("p"),
        py::arg("s"), py::arg("schedule"));
  m.def("compute_report", &compute_report, py::arg("trajectory"), py::arg("p"),
        py::arg("s"), py::arg("schedule"));
  m.def("sample_conjugate_domain", &sample_conjugate_domain, py::arg("h"),
        py::arg("count"));
  m.def("dual_inclusion_gap", &dual_inclusion_gap, py::arg("trajectory"),
        py::arg("p"), py::arg("s"), py::arg("schedule"), py::arg("report"),
        py::arg("n"), py::arg("dual_points"));

  m.def(
      "run_experiment",
      [](const std::string& config_json, const std::string& out_dir,
         int parallel) {
        const ExperimentConfig cfg =
            ExperimentConfig::from_json(nlohmann::json::parse(config_json));
        return run_experiment(cfg, out_dir, parallel);
      },
      py::arg("config_json"), py::arg("out_dir"), py::arg("parallel") = 1,
      "Run the sweep + continuation deblurring experiment from a JSON config "
      "string; writes CSVs, PGMs and a manifest into out_dir.");
  m.def("validate_records", &validate_records, py::arg("records_dir"),
        py::arg("tol") = 1e-4);

#ifdef PDPATH_VERSION
  m.attr("__version__") = PDPATH_VERSION;
#else
  m.attr("__version__") = "dev";
#endif
}
