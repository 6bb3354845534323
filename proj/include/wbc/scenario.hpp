#pragma once

#include <map>
#include <string>
#include <vector>

#include "wbc/controller.hpp"
#include "wbc/sim.hpp"
#include "wbc/types.hpp"

namespace wbc {

/// How the end-effector reference stream is produced.
enum class ReferenceType { kNone, kVelocityProfile };

/// A fully resolved run description: robot, initial state, controller
/// settings, world actors, plant parameters, and the reference stream.
struct ScenarioConfig {
  std::string name = "unnamed";
  double duration = 10.0;
  double dt = 0.01;
  RobotModel robot = RobotModel::reference();
  Vector3d initial_base_pose = Vector3d::Zero();
  Vector6d initial_arm_joints = Vector6d::Zero();
  ControllerConfig controller;
  World world;
  BasePlantParams plant;
  ReferenceType reference_type = ReferenceType::kNone;
  /// (time, world-frame end-effector twist) knots, linearly interpolated.
  std::vector<std::pair<double, Vector6d>> velocity_profile;
};

/// One control cycle of telemetry.
struct CycleRecord {
  double t = 0.0;
  Vector3d base_pose = Vector3d::Zero();       // world x, y, yaw
  Vector6d arm_joints = Vector6d::Zero();
  Vector6d arm_velocity_ref = Vector6d::Zero();
  Vector6d arm_velocity_wln = Vector6d::Zero();
  Vector3d base_velocity_raw = Vector3d::Zero();
  Vector3d base_velocity_corrected = Vector3d::Zero();
  Vector3d base_velocity_ref = Vector3d::Zero();
  Vector6d ee_velocity_cmd = Vector6d::Zero();  // world frame
  Vector3d ee_cmd_position = Vector3d::Zero();  // integral of the command
  Vector3d ee_position = Vector3d::Zero();      // measured, with vibration
  Vector2d ee_vibration = Vector2d::Zero();     // structural offset, base frame
  Vector6d external_force = Vector6d::Zero();   // world frame
  double capability = 0.0;
  double alpha = 0.0;
  double sigma_xy = 0.0;
  double sigma_phi = 0.0;
  double obstacle_distance = 0.0;
  Vector6d ee_deviation = Vector6d::Zero();     // arm-frame, this cycle
  Vector6d error_integral = Vector6d::Zero();   // world frame
  double workspace_d = 0.0;
  double workspace_phi = 0.0;
  double d_rate = 0.0;
  double phi_rate = 0.0;
  double f_xy = 0.0;
  double f_phi = 0.0;
};

struct ScenarioLog {
  std::vector<CycleRecord> records;
};

/// Parse a JSON scenario document. Duplicate keys, unknown keys, and type
/// mismatches raise ParseError; constraint violations raise ValidationError.
ScenarioConfig parse_config(const std::string& text);

/// Serialize a config back to JSON with every default materialized.
std::string print_config(const ScenarioConfig& config);

/// Apply a `dotted.path=json-value` override to a JSON document.
std::string apply_override(const std::string& text, const std::string& spec);

/// Bundled scenario documents, keyed by name.
const std::map<std::string, std::string>& bundled_scenarios();

/// Resolve a name against the bundle or the filesystem and return the raw
/// JSON text. Raises IoError if neither matches.
std::string load_scenario_text(const std::string& name_or_path);

/// Column header of the CSV export.
std::string csv_header();

/// Write one record per control cycle; numbers printed with %.9g.
void export_csv(const ScenarioLog& log, const std::string& path);

/// Run the scenario in 100 Hz lockstep: world step, sensor sampling, control
/// step, plant steps, state integration. Returns one record per cycle.
ScenarioLog run_scenario(const ScenarioConfig& config);

/// Command line entry: run / list-scenarios / validate.
int cli_main(int argc, char** argv);

}  // namespace wbc
