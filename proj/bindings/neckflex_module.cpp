#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "neckflex/biomech.hpp"
#include "neckflex/errors.hpp"
#include "neckflex/fitlab.hpp"
#include "neckflex/mechanism.hpp"
#include "neckflex/protocol.hpp"
#include "neckflex/signal.hpp"
#include "neckflex/stats.hpp"

namespace py = pybind11;
using namespace neckflex;

PYBIND11_MODULE(_neckflex, m) {
  m.doc() = "Bar-array neck orthosis: bending mechanics, head statics, EMG "
            "envelopes and rank statistics";

  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<NumericError>(m, "NumericError");

  // --- mechanism ------------------------------------------------------------

  py::class_<BarArraySpec>(m, "BarArraySpec")
      .def(py::init<>())
      .def_readwrite("bar_diameter", &BarArraySpec::bar_diameter)
      .def_readwrite("free_length", &BarArraySpec::free_length)
      .def_readwrite("youngs_modulus", &BarArraySpec::youngs_modulus)
      .def_readwrite("bar_count", &BarArraySpec::bar_count)
      .def_readwrite("coupled_count", &BarArraySpec::coupled_count)
      .def_readwrite("triad_separation", &BarArraySpec::triad_separation)
      .def_readwrite("gap", &BarArraySpec::gap)
      .def("validate", &BarArraySpec::validate);

  py::class_<StiffnessMode>(m, "StiffnessMode")
      .def_static("base", &StiffnessMode::base)
      .def_static("loaded", &StiffnessMode::loaded)
      .def_static("gap_controlled", &StiffnessMode::gap_controlled, py::arg("gap_m"))
      .def_property_readonly("gap", &StiffnessMode::gap)
      .def_property_readonly("triad_coupled", &StiffnessMode::triad_coupled);

  py::enum_<Branch>(m, "Branch")
      .value("pre", Branch::pre)
      .value("post", Branch::post);

  py::class_<MomentSample>(m, "MomentSample")
      .def_readonly("theta", &MomentSample::theta)
      .def_readonly("moment", &MomentSample::moment)
      .def_readonly("branch", &MomentSample::branch);

  py::class_<MomentCurve>(m, "MomentCurve")
      .def_readonly("samples", &MomentCurve::samples)
      .def_readonly("transition", &MomentCurve::transition)
      .def_readonly("preload_moment", &MomentCurve::preload_moment);

  m.def("gamma_integral", &gamma_integral, py::arg("theta"),
        py::arg("rel_tol") = 1e-9, "Tip-angle integral of the elastica model");
  m.def("single_bar_inertia", &single_bar_inertia, py::arg("diameter"));
  m.def("equivalent_inertia", &equivalent_inertia, py::arg("spec"), py::arg("mode"));
  m.def("base_moment", &base_moment, py::arg("spec"), py::arg("theta"),
        py::arg("mode"));
  m.def("end_shortening", &end_shortening, py::arg("spec"), py::arg("theta"));
  m.def("transition_angle", &transition_angle, py::arg("spec"));
  m.def("preload_offset", &preload_offset, py::arg("spec"));
  m.def("moment_curve", &moment_curve, py::arg("spec"), py::arg("thetas"));

  // --- biomech ----------------------------------------------------------------

  py::class_<Vec2>(m, "Vec2")
      .def(py::init<>())
      .def(py::init([](double x, double z) { return Vec2{x, z}; }), py::arg("x"),
           py::arg("z"))
      .def_readwrite("x", &Vec2::x)
      .def_readwrite("z", &Vec2::z);

  py::class_<HeadStatics>(m, "HeadStatics")
      .def(py::init<>())
      .def_readwrite("head_weight", &HeadStatics::head_weight)
      .def_readwrite("com_lever", &HeadStatics::com_lever)
      .def_readwrite("base_lever", &HeadStatics::base_lever)
      .def_readwrite("inclination", &HeadStatics::inclination)
      .def("validate", &HeadStatics::validate);

  py::class_<FrameForces>(m, "FrameForces")
      .def_readonly("bending", &FrameForces::bending)
      .def_readonly("sliding", &FrameForces::sliding);

  py::class_<StaticsResult>(m, "StaticsResult")
      .def_readonly("gravity", &StaticsResult::gravity)
      .def_readonly("base_force_torque", &StaticsResult::base_force_torque)
      .def_readonly("base_moment", &StaticsResult::base_moment)
      .def_readonly("assistive", &StaticsResult::assistive)
      .def_readonly("muscle", &StaticsResult::muscle);

  py::class_<AssistSample>(m, "AssistSample")
      .def_readonly("theta", &AssistSample::theta)
      .def_readonly("fraction", &AssistSample::fraction)
      .def_readonly("excluded", &AssistSample::excluded);

  py::class_<AssistProfile>(m, "AssistProfile")
      .def_readonly("samples", &AssistProfile::samples)
      .def_readonly("peak", &AssistProfile::peak)
      .def_readonly("peak_theta", &AssistProfile::peak_theta)
      .def_readonly("excluded_count", &AssistProfile::excluded_count);

  m.def("head_frame_forces", &head_frame_forces, py::arg("statics"));
  m.def("gravity_moment", &gravity_moment, py::arg("statics"));
  m.def("base_force_moment", &base_force_moment, py::arg("statics"));
  m.def("muscle_moment", &muscle_moment, py::arg("statics"),
        py::arg("device_base_moment"));
  m.def("ideal_base_moment", &ideal_base_moment, py::arg("statics"));
  m.def("assist_fraction", &assist_fraction, py::arg("curve"), py::arg("sweep"));

  // --- signal -------------------------------------------------------------------

  py::class_<EnvelopeParams>(m, "EnvelopeParams")
      .def(py::init<>())
      .def_readwrite("sample_rate", &EnvelopeParams::sample_rate)
      .def_readwrite("filter_order", &EnvelopeParams::filter_order)
      .def_readwrite("band_low", &EnvelopeParams::band_low)
      .def_readwrite("band_high", &EnvelopeParams::band_high)
      .def_readwrite("window", &EnvelopeParams::window)
      .def("validate", &EnvelopeParams::validate);

  m.def("envelope", &envelope, py::arg("x"), py::arg("params") = EnvelopeParams{},
        "Mean removal, zero-phase band-pass, rectification, moving average");

  // --- fitlab -----------------------------------------------------------------------

  py::enum_<BranchDir>(m, "BranchDir")
      .value("load", BranchDir::load)
      .value("unload", BranchDir::unload);

  py::class_<BendSample>(m, "BendSample")
      .def(py::init<>())
      .def_readwrite("time", &BendSample::time)
      .def_readwrite("force", &BendSample::force)
      .def_readwrite("displacement", &BendSample::displacement)
      .def_readwrite("angle", &BendSample::angle)
      .def_readwrite("branch", &BendSample::branch);

  py::class_<BendTestTrace>(m, "BendTestTrace")
      .def(py::init<>())
      .def_readwrite("samples", &BendTestTrace::samples)
      .def("validate", &BendTestTrace::validate);

  py::class_<BenchNoise>(m, "BenchNoise")
      .def(py::init<>())
      .def_readwrite("force_rel", &BenchNoise::force_rel)
      .def_readwrite("seed", &BenchNoise::seed);

  py::class_<FitResult>(m, "FitResult")
      .def_readonly("stiffness_pre", &FitResult::stiffness_pre)
      .def_readonly("stiffness_post", &FitResult::stiffness_post)
      .def_readonly("transition", &FitResult::transition)
      .def_readonly("friction", &FitResult::friction)
      .def_readonly("residual_rms", &FitResult::residual_rms);

  m.def("read_bend_csv", &read_bend_csv, py::arg("path"));
  m.def("write_bend_csv", &write_bend_csv, py::arg("path"), py::arg("trace"));
  m.def("fit_parameters", &fit_parameters, py::arg("trace"), py::arg("load_height"),
        py::arg("free_length"));
  m.def("synthesize_bend_trace", &synthesize_bend_trace, py::arg("spec"),
        py::arg("angles"), py::arg("load_height"), py::arg("friction"),
        py::arg("noise") = BenchNoise{});

  // --- protocol ----------------------------------------------------------------------

  py::enum_<Plane>(m, "Plane")
      .value("sagittal", Plane::sagittal)
      .value("transverse", Plane::transverse)
      .value("coronal", Plane::coronal);

  py::class_<PostureTarget>(m, "PostureTarget")
      .def(py::init<>())
      .def(py::init([](Plane p, double a) { return PostureTarget{p, a}; }),
           py::arg("plane"), py::arg("angle_deg"))
      .def_readwrite("plane", &PostureTarget::plane)
      .def_readwrite("angle_deg", &PostureTarget::angle_deg);

  py::class_<PlanTiming>(m, "PlanTiming")
      .def(py::init<>())
      .def_readwrite("neutral", &PlanTiming::neutral)
      .def_readwrite("approach", &PlanTiming::approach)
      .def_readwrite("hold", &PlanTiming::hold)
      .def_readwrite("recovery", &PlanTiming::recovery)
      .def("validate", &PlanTiming::validate);

  py::class_<PlannedCycle>(m, "PlannedCycle")
      .def_readonly("target", &PlannedCycle::target)
      .def_readonly("t_start", &PlannedCycle::t_start)
      .def_readonly("t_approach_start", &PlannedCycle::t_approach_start)
      .def_readonly("t_hold_start", &PlannedCycle::t_hold_start)
      .def_readonly("t_hold_end", &PlannedCycle::t_hold_end)
      .def_readonly("t_end", &PlannedCycle::t_end);

  py::class_<TrialPlan>(m, "TrialPlan")
      .def_readonly("cycles", &TrialPlan::cycles)
      .def_readonly("seed", &TrialPlan::seed)
      .def("duration", &TrialPlan::duration);

  m.def("standard_postures", &standard_postures);
  m.def("generate_sequence", &generate_sequence, py::arg("seed"),
        py::arg("timing") = PlanTiming{});
  m.def("read_plan_csv", &read_plan_csv, py::arg("path"));
  m.def("write_plan_csv", &write_plan_csv, py::arg("path"), py::arg("plan"));

  // --- stats --------------------------------------------------------------------------

  py::enum_<PMethod>(m, "PMethod")
      .value("exact", PMethod::exact)
      .value("normal_approx", PMethod::normal_approx);

  py::class_<WilcoxonResult>(m, "WilcoxonResult")
      .def_readonly("w_plus", &WilcoxonResult::w_plus)
      .def_readonly("p_value", &WilcoxonResult::p_value)
      .def_readonly("n_effective", &WilcoxonResult::n_effective)
      .def_readonly("method", &WilcoxonResult::method);

  m.def("wilcoxon_signed_rank", &wilcoxon_signed_rank, py::arg("base"),
        py::arg("loaded"),
        "Two-sided paired signed-rank test on loaded - base");
}
