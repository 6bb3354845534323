// Python bindings for the whole-body controller: kinematics, the weighted
// redundancy resolution, capability metrics, motion primitives, and the
// scenario pipeline (parse / override / run / CSV export).
#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <atomic>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "wbc/coordination.hpp"
#include "wbc/dmp.hpp"
#include "wbc/kinematics.hpp"
#include "wbc/redundancy.hpp"
#include "wbc/scenario.hpp"
#include "wbc/types.hpp"

namespace py = pybind11;
using namespace wbc;

namespace {

/// Run a scenario document and return the CSV log through the same exporter
/// the command line uses, so both interfaces emit identical bytes.
std::string run_scenario_csv(const std::string& text) {
  static std::atomic<int> counter{0};
  const ScenarioLog log = run_scenario(parse_config(text));
  const std::filesystem::path path =
      std::filesystem::temp_directory_path() /
      ("pywbc_" + std::to_string(counter++) + ".csv");
  export_csv(log, path.string());
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  std::filesystem::remove(path);
  return buf.str();
}

}  // namespace

PYBIND11_MODULE(pywbc, m) {
  m.doc() =
      "Whole-body controller for a velocity-controlled omnidirectional mobile "
      "manipulator: kinematics, weighted least-norm redundancy resolution, "
      "capability metrics, coupled motion primitives, and scenario runs.";

  py::register_exception<SingularTask>(m, "SingularTask");
  py::register_exception<ParseError>(m, "ParseError");
  py::register_exception<ValidationError>(m, "ValidationError");
  py::register_exception<InsufficientData>(m, "InsufficientData");
  py::register_exception<IoError>(m, "IoError");

  py::class_<RobotModel>(m, "RobotModel", "Geometry of the 9-DoF platform")
      .def_static("reference", &RobotModel::reference,
                  "The documented reference arm on a 0.3 m omni base")
      .def_readonly("joint_lower", &RobotModel::joint_lower)
      .def_readonly("joint_upper", &RobotModel::joint_upper)
      .def_readonly("base_radius", &RobotModel::base_radius)
      .def_readonly("arm_mount_translation", &RobotModel::arm_mount_translation);

  py::class_<Pose>(m, "Pose", "Position and orientation of a frame")
      .def_readonly("position", &Pose::position)
      .def_readonly("orientation", &Pose::orientation);

  py::class_<CapabilityMetrics>(m, "CapabilityMetrics")
      .def_readonly("manipulability", &CapabilityMetrics::manipulability)
      .def_readonly("joint_limit_penalty",
                    &CapabilityMetrics::joint_limit_penalty)
      .def_readonly("capability", &CapabilityMetrics::capability);

  py::class_<CmOptimizationParams>(m, "CmOptimizationParams")
      .def(py::init<>())
      .def_readwrite("null_gain", &CmOptimizationParams::null_gain)
      .def_readwrite("cm_upper", &CmOptimizationParams::cm_upper)
      .def_readwrite("cm_lower", &CmOptimizationParams::cm_lower)
      .def_readwrite("jl_scale", &CmOptimizationParams::jl_scale)
      .def_readwrite("grad_step", &CmOptimizationParams::grad_step);

  py::class_<CmGradient>(m, "CmGradient")
      .def_readonly("cartesian", &CmGradient::cartesian)
      .def_readonly("joint", &CmGradient::joint)
      .def_readonly("degenerate", &CmGradient::degenerate);

  py::class_<RepulsiveFieldParams>(m, "RepulsiveFieldParams")
      .def(py::init<>())
      .def_readwrite("gain", &RepulsiveFieldParams::gain)
      .def_readwrite("threshold", &RepulsiveFieldParams::threshold);

  py::class_<DiscObstacle>(m, "DiscObstacle", "Disc obstacle in the plane")
      .def(py::init([](const Vector2d& center, double radius) {
             return DiscObstacle{center, radius};
           }),
           py::arg("center"), py::arg("radius"))
      .def_readwrite("center", &DiscObstacle::center)
      .def_readwrite("radius", &DiscObstacle::radius);

  py::class_<ForcingTerm>(m, "ForcingTerm", "Radial-basis forcing term")
      .def_readonly("basis_centers", &ForcingTerm::basis_centers)
      .def_readonly("basis_widths", &ForcingTerm::basis_widths)
      .def_readonly("weights", &ForcingTerm::weights)
      .def("evaluate", &ForcingTerm::evaluate, py::arg("s"), py::arg("dims"));

  // --- kinematics ----------------------------------------------------------
  m.def("forward_kinematics", &forward_kinematics, py::arg("q"),
        py::arg("model"),
        "End-effector pose in the arm mount frame");
  m.def("ee_in_base", &ee_in_base, py::arg("q"), py::arg("model"),
        "End-effector pose in the base frame");
  m.def("arm_jacobian", &arm_jacobian, py::arg("q"), py::arg("model"),
        "6x6 geometric Jacobian of the arm in the mount frame");
  m.def("base_jacobian", &base_jacobian, py::arg("ee_pos_in_base"),
        "6x3 map from base twist (vx, vy, wz) to the end-effector twist");
  m.def(
      "whole_body_jacobian",
      [](const Vector6d& q, const RobotModel& model) {
        WholeBodyState state;
        state.arm_joints = q;
        state.ee_pose_in_base = ee_in_base(q, model);
        return whole_body_jacobian(state, model);
      },
      py::arg("q"), py::arg("model"),
      "6x9 map from stacked [arm twist; base twist] to the end-effector twist");

  // --- redundancy resolution ----------------------------------------------
  m.def(
      "weighting_matrix",
      [](double sigma_xy, double sigma_phi) {
        return weighting_matrix({sigma_xy, sigma_phi});
      },
      py::arg("sigma_xy"), py::arg("sigma_phi"),
      "9x9 diagonal motion-distribution matrix (1 = arm only, 0 = base only)");
  m.def("resolve_wln", &resolve_wln, py::arg("v_ee"), py::arg("j_wb"),
        py::arg("q_weight"), py::arg("null_velocity"),
        "Weighted least-norm split of an end-effector twist; raises "
        "SingularTask when the task system is too ill-conditioned");
  m.def("resolve_wln_damped", &resolve_wln_damped, py::arg("v_ee"),
        py::arg("j_wb"), py::arg("q_weight"), py::arg("null_velocity"),
        py::arg("damping") = 1e-3,
        "Fallback resolution with a damped task system");
  m.def("movement_capability", &movement_capability, py::arg("q"),
        py::arg("model"), py::arg("params") = CmOptimizationParams{},
        "Manipulability times the joint-limit penalty");
  m.def("cm_gradient", &cm_gradient, py::arg("q"), py::arg("model"),
        py::arg("params") = CmOptimizationParams{},
        "Capability gradient in joint space and mapped to Cartesian axes");

  // --- coordination and fields --------------------------------------------
  m.def("transition_alpha", &transition_alpha, py::arg("value"),
        py::arg("upper"), py::arg("lower"),
        "Raised-cosine blend: 0 at/above upper, 1 at/below lower");
  m.def("repulsive_force", &repulsive_force, py::arg("base_xy"),
        py::arg("obstacles"), py::arg("field") = RepulsiveFieldParams{},
        py::arg("footprint_radius") = 0.3,
        "Negative gradient of the inverse-square obstacle potential");

  // --- primitives ----------------------------------------------------------
  py::class_<CdmpParams>(m, "CdmpParams")
      .def(py::init<>())
      .def_readwrite("tau", &CdmpParams::tau)
      .def_readwrite("alpha_z", &CdmpParams::alpha_z)
      .def_readwrite("beta_z", &CdmpParams::beta_z)
      .def_readwrite("alpha_s", &CdmpParams::alpha_s)
      .def_readwrite("dims", &CdmpParams::dims);

  m.def("learn_forcing_term", &learn_forcing_term, py::arg("demo_positions"),
        py::arg("params") = CdmpParams{}, py::arg("basis_count") = 25,
        py::arg("dt") = 0.01,
        "Fit RBF weights so a primitive reproduces a sampled demonstration");

  // --- scenario pipeline ---------------------------------------------------
  m.def("bundled_scenarios",
        []() { return bundled_scenarios(); },
        "Bundled scenario documents keyed by name");
  m.def("load_scenario_text", &load_scenario_text, py::arg("name_or_path"),
        "Resolve a name against the bundle or the filesystem");
  m.def("apply_override", &apply_override, py::arg("text"), py::arg("spec"),
        "Apply a dotted.path=json-value edit to a scenario document");
  m.def(
      "validate_config",
      [](const std::string& text) { parse_config(text); },
      py::arg("text"),
      "Raise ParseError/ValidationError if the document is not runnable");
  m.def(
      "print_config",
      [](const std::string& text) { return print_config(parse_config(text)); },
      py::arg("text"),
      "Parse and reserialize a document with every default materialized");
  m.def("csv_header", &csv_header, "Column header of the CSV export");
  m.def("run_scenario", &run_scenario_csv, py::arg("text"),
        "Run a scenario document and return the per-cycle log as CSV text");
}
