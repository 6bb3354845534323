#include "wbc/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace wbc {

using nlohmann::json;

namespace {

constexpr double kPi = 3.14159265358979323846;

/// Parse rejecting duplicate object keys (the callback sees every key event,
/// including ones a later duplicate would overwrite).
json parse_strict(const std::string& text) {
  std::vector<std::set<std::string>> stack;
  json::parser_callback_t cb = [&stack](int, json::parse_event_t event, json& parsed) {
    if (event == json::parse_event_t::object_start) {
      stack.emplace_back();
    } else if (event == json::parse_event_t::object_end) {
      stack.pop_back();
    } else if (event == json::parse_event_t::key) {
      const auto key = parsed.get<std::string>();
      if (!stack.back().insert(key).second) {
        throw ParseError("duplicate key '" + key + "'");
      }
    }
    return true;
  };
  try {
    return json::parse(text, cb);
  } catch (const ParseError&) {
    throw;
  } catch (const json::exception& e) {
    throw ParseError(e.what());
  }
}

void reject_unknown(const json& obj, const std::string& path,
                    std::initializer_list<const char*> allowed) {
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    const bool known = std::any_of(allowed.begin(), allowed.end(),
                                   [&](const char* k) { return it.key() == k; });
    if (!known) throw ParseError("unknown key '" + path + "." + it.key() + "'");
  }
}

const json& member(const json& obj, const std::string& path, const char* key) {
  if (!obj.is_object()) throw ParseError("'" + path + "' must be an object");
  return obj.at(key);
}

double get_num(const json& obj, const std::string& path, const char* key, double fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = member(obj, path, key);
  if (!v.is_number()) throw ParseError("'" + path + "." + key + "' must be a number");
  return v.get<double>();
}

bool get_bool(const json& obj, const std::string& path, const char* key, bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = member(obj, path, key);
  if (!v.is_boolean()) throw ParseError("'" + path + "." + key + "' must be a boolean");
  return v.get<bool>();
}

std::string get_str(const json& obj, const std::string& path, const char* key,
                    const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = member(obj, path, key);
  if (!v.is_string()) throw ParseError("'" + path + "." + key + "' must be a string");
  return v.get<std::string>();
}

VectorXd get_vec(const json& obj, const std::string& path, const char* key, int size,
                 const VectorXd& fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = member(obj, path, key);
  if (!v.is_array() || static_cast<int>(v.size()) != size) {
    throw ParseError("'" + path + "." + key + "' must be an array of " +
                     std::to_string(size) + " numbers");
  }
  VectorXd out(size);
  for (int i = 0; i < size; ++i) {
    if (!v[i].is_number()) {
      throw ParseError("'" + path + "." + key + "' must contain only numbers");
    }
    out[i] = v[i].get<double>();
  }
  return out;
}

/// Rows of the form [t, v1, ..., vn], times non-decreasing.
std::vector<std::pair<double, VectorXd>> get_rows(const json& obj, const std::string& path,
                                                  const char* key, int values) {
  std::vector<std::pair<double, VectorXd>> rows;
  if (!obj.contains(key)) return rows;
  const json& v = member(obj, path, key);
  if (!v.is_array()) throw ParseError("'" + path + "." + key + "' must be an array");
  for (const auto& row : v) {
    if (!row.is_array() || static_cast<int>(row.size()) != values + 1) {
      throw ParseError("'" + path + "." + key + "' rows must have " +
                       std::to_string(values + 1) + " numbers");
    }
    VectorXd vals(values);
    for (int i = 0; i < values; ++i) {
      if (!row[i + 1].is_number()) {
        throw ParseError("'" + path + "." + key + "' rows must contain only numbers");
      }
      vals[i] = row[i + 1].get<double>();
    }
    if (!row[0].is_number()) {
      throw ParseError("'" + path + "." + key + "' rows must contain only numbers");
    }
    rows.emplace_back(row[0].get<double>(), vals);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (rows[i].first < rows[i - 1].first) {
      throw ValidationError("'" + path + "." + key + "' times must be non-decreasing");
    }
  }
  return rows;
}

void check(bool ok, const std::string& constraint) {
  if (!ok) throw ValidationError(constraint);
}

MotionMode parse_mode(const std::string& text) {
  if (text == "locomotion") return MotionMode::kLocomotion;
  if (text == "manipulation") return MotionMode::kManipulation;
  if (text == "loco_manipulation") return MotionMode::kLocoManipulation;
  if (text == "intuitive_phri") return MotionMode::kIntuitivePhri;
  throw ValidationError(
      "mode must be one of locomotion, manipulation, loco_manipulation, intuitive_phri");
}

const char* mode_name(MotionMode mode) {
  switch (mode) {
    case MotionMode::kLocomotion: return "locomotion";
    case MotionMode::kManipulation: return "manipulation";
    case MotionMode::kLocoManipulation: return "loco_manipulation";
    case MotionMode::kIntuitivePhri: return "intuitive_phri";
  }
  return "loco_manipulation";
}

RobotModel parse_robot(const json& obj) {
  RobotModel model = RobotModel::reference();
  reject_unknown(obj, "robot",
                 {"base_radius", "arm_mount_translation", "arm_mount_yaw", "arm_links",
                  "joint_limits_deg"});
  model.base_radius = get_num(obj, "robot", "base_radius", model.base_radius);
  check(model.base_radius > 0.0, "robot.base_radius must be positive");
  model.arm_mount_translation =
      get_vec(obj, "robot", "arm_mount_translation", 3, model.arm_mount_translation);
  const double mount_yaw = get_num(obj, "robot", "arm_mount_yaw", 0.0);
  model.arm_mount_rotation =
      Eigen::AngleAxisd(mount_yaw, Vector3d::UnitZ()).toRotationMatrix();
  if (obj.contains("arm_links")) {
    const json& links = member(obj, "robot", "arm_links");
    if (!links.is_array() || links.size() != 6) {
      throw ParseError("'robot.arm_links' must be an array of 6 link objects");
    }
    model.arm_links.clear();
    int idx = 0;
    for (const auto& link : links) {
      const std::string path = "robot.arm_links[" + std::to_string(idx++) + "]";
      if (!link.is_object()) throw ParseError("'" + path + "' must be an object");
      reject_unknown(link, path, {"length", "twist", "offset", "joint_offset"});
      LinkParameters p;
      p.length = get_num(link, path, "length", 0.0);
      p.twist = get_num(link, path, "twist", 0.0);
      p.offset = get_num(link, path, "offset", 0.0);
      p.joint_offset = get_num(link, path, "joint_offset", 0.0);
      model.arm_links.push_back(p);
    }
  }
  if (obj.contains("joint_limits_deg")) {
    const json& limits = member(obj, "robot", "joint_limits_deg");
    if (!limits.is_array() || limits.size() != 6) {
      throw ParseError("'robot.joint_limits_deg' must be an array of 6 [lo, hi] pairs");
    }
    for (int i = 0; i < 6; ++i) {
      const json& pair = limits[i];
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() ||
          !pair[1].is_number()) {
        throw ParseError("'robot.joint_limits_deg' entries must be [lo, hi] numbers");
      }
      model.joint_lower[i] = pair[0].get<double>() * kPi / 180.0;
      model.joint_upper[i] = pair[1].get<double>() * kPi / 180.0;
      check(model.joint_lower[i] < model.joint_upper[i],
            "robot.joint_limits_deg requires lower < upper");
    }
  }
  return model;
}

ControllerConfig parse_controller(const json& obj) {
  ControllerConfig c;
  reject_unknown(obj, "controller",
                 {"mode", "sigma_xy", "sigma_phi", "dmp", "base_dmp", "filter",
                  "capability", "obstacle", "workspace", "hri",
                  "cancellation_enabled", "force"});
  c.mode = parse_mode(get_str(obj, "controller", "mode", "loco_manipulation"));
  c.factors.sigma_xy = get_num(obj, "controller", "sigma_xy", 0.5);
  c.factors.sigma_phi = get_num(obj, "controller", "sigma_phi", 0.5);
  check(c.factors.sigma_xy >= 0.0 && c.factors.sigma_xy <= 1.0,
        "controller.sigma_xy must lie in [0, 1]");
  check(c.factors.sigma_phi >= 0.0 && c.factors.sigma_phi <= 1.0,
        "controller.sigma_phi must lie in [0, 1]");
  if (obj.contains("dmp")) {
    const json& d = member(obj, "controller", "dmp");
    reject_unknown(d, "controller.dmp", {"tau", "alpha_z", "beta_z", "alpha_s"});
    c.dmp.tau = get_num(d, "controller.dmp", "tau", c.dmp.tau);
    c.dmp.alpha_z = get_num(d, "controller.dmp", "alpha_z", c.dmp.alpha_z);
    c.dmp.beta_z = get_num(d, "controller.dmp", "beta_z", c.dmp.beta_z);
    c.dmp.alpha_s = get_num(d, "controller.dmp", "alpha_s", c.dmp.alpha_s);
    check(c.dmp.tau > 0.0, "controller.dmp.tau must be positive");
    check(c.dmp.alpha_z > 0.0, "controller.dmp.alpha_z must be positive");
    check(c.dmp.beta_z > 0.0, "controller.dmp.beta_z must be positive");
    check(c.dmp.alpha_s > 0.0, "controller.dmp.alpha_s must be positive");
  }
  c.base_dmp = c.dmp;
  if (obj.contains("base_dmp")) {
    const json& d = member(obj, "controller", "base_dmp");
    reject_unknown(d, "controller.base_dmp", {"alpha_z", "beta_z"});
    c.base_dmp.alpha_z =
        get_num(d, "controller.base_dmp", "alpha_z", c.base_dmp.alpha_z);
    c.base_dmp.beta_z =
        get_num(d, "controller.base_dmp", "beta_z", c.base_dmp.beta_z);
    check(c.base_dmp.alpha_z > 0.0, "controller.base_dmp.alpha_z must be positive");
    check(c.base_dmp.beta_z > 0.0, "controller.base_dmp.beta_z must be positive");
  }
  if (obj.contains("filter")) {
    const json& f = member(obj, "controller", "filter");
    reject_unknown(f, "controller.filter", {"enabled", "cutoff", "damping"});
    c.filter_enabled = get_bool(f, "controller.filter", "enabled", c.filter_enabled);
    c.filter.cutoff = get_num(f, "controller.filter", "cutoff", c.filter.cutoff);
    c.filter.damping = get_num(f, "controller.filter", "damping", c.filter.damping);
    check(c.filter.cutoff > 0.0, "controller.filter.cutoff must be positive");
    check(c.filter.damping > 0.0, "controller.filter.damping must be positive");
  }
  if (obj.contains("capability")) {
    const json& p = member(obj, "controller", "capability");
    reject_unknown(p, "controller.capability",
                   {"null_gain", "upper", "lower", "joint_gain", "gradient_step"});
    c.cm_params.null_gain = get_num(p, "controller.capability", "null_gain",
                                    c.cm_params.null_gain);
    c.cm_params.cm_upper = get_num(p, "controller.capability", "upper", c.cm_params.cm_upper);
    c.cm_params.cm_lower = get_num(p, "controller.capability", "lower", c.cm_params.cm_lower);
    c.cm_params.jl_scale = get_num(p, "controller.capability", "joint_gain",
                                   c.cm_params.jl_scale);
    c.cm_params.grad_step = get_num(p, "controller.capability", "gradient_step",
                                    c.cm_params.grad_step);
    check(c.cm_params.null_gain >= 0.0, "controller.capability.null_gain must be >= 0");
    check(c.cm_params.cm_lower > 0.0 && c.cm_params.cm_lower < c.cm_params.cm_upper,
          "controller.capability band requires 0 < lower < upper");
    check(c.cm_params.jl_scale > 0.0, "controller.capability.joint_gain must be positive");
    check(c.cm_params.grad_step > 0.0,
          "controller.capability.gradient_step must be positive");
  }
  if (obj.contains("obstacle")) {
    const json& o = member(obj, "controller", "obstacle");
    reject_unknown(o, "controller.obstacle", {"gain", "threshold"});
    c.field.gain = get_num(o, "controller.obstacle", "gain", c.field.gain);
    c.field.threshold = get_num(o, "controller.obstacle", "threshold", c.field.threshold);
    check(c.field.gain >= 0.0, "controller.obstacle.gain must be >= 0");
    check(c.field.threshold > 0.0, "controller.obstacle.threshold must be positive");
  }
  if (obj.contains("workspace")) {
    const json& w = member(obj, "controller", "workspace");
    reject_unknown(w, "controller.workspace",
                   {"extend_lower", "extend_upper", "deflect_lower_deg", "deflect_upper_deg"});
    c.workspace.extend_lower =
        get_num(w, "controller.workspace", "extend_lower", c.workspace.extend_lower);
    c.workspace.extend_upper =
        get_num(w, "controller.workspace", "extend_upper", c.workspace.extend_upper);
    c.workspace.deflect_lower =
        get_num(w, "controller.workspace", "deflect_lower_deg",
                c.workspace.deflect_lower * 180.0 / kPi) * kPi / 180.0;
    c.workspace.deflect_upper =
        get_num(w, "controller.workspace", "deflect_upper_deg",
                c.workspace.deflect_upper * 180.0 / kPi) * kPi / 180.0;
    check(c.workspace.extend_lower > 0.0 &&
              c.workspace.extend_lower < c.workspace.extend_upper,
          "controller.workspace extend band requires 0 < lower < upper");
    check(c.workspace.deflect_lower > 0.0 &&
              c.workspace.deflect_lower < c.workspace.deflect_upper &&
              c.workspace.deflect_upper <= kPi,
          "controller.workspace deflect band requires 0 < lower < upper <= 180 deg");
  }
  if (obj.contains("hri")) {
    const json& h = member(obj, "controller", "hri");
    reject_unknown(h, "controller.hri", {"enabled", "gain"});
    c.hri_switch = get_bool(h, "controller.hri", "enabled", c.hri_switch != 0) ? 1 : 0;
    c.hri_gain = get_num(h, "controller.hri", "gain", c.hri_gain);
    check(c.hri_gain >= 0.0, "controller.hri.gain must be >= 0");
  }
  c.comp_switch = get_bool(obj, "controller", "cancellation_enabled", true) ? 1 : 0;
  if (obj.contains("force")) {
    const json& f = member(obj, "controller", "force");
    reject_unknown(f, "controller.force", {"k_p", "k_d", "k_f", "selection", "desired"});
    c.force_gains.k_p = get_num(f, "controller.force", "k_p", c.force_gains.k_p);
    c.force_gains.k_d = get_num(f, "controller.force", "k_d", c.force_gains.k_d);
    c.force_gains.k_f = get_num(f, "controller.force", "k_f", c.force_gains.k_f);
    c.selection = get_vec(f, "controller.force", "selection", 6, c.selection);
    c.desired_force = get_vec(f, "controller.force", "desired", 6, c.desired_force);
    for (int i = 0; i < 6; ++i) {
      check(c.selection[i] == 0.0 || c.selection[i] == 1.0,
            "controller.force.selection entries must be 0 or 1");
    }
  }
  return c;
}

World parse_world(const json& obj) {
  World world;
  reject_unknown(obj, "world", {"obstacles", "surface", "force_script"});
  if (obj.contains("obstacles")) {
    const json& list = member(obj, "world", "obstacles");
    if (!list.is_array()) throw ParseError("'world.obstacles' must be an array");
    int idx = 0;
    for (const auto& entry : list) {
      const std::string path = "world.obstacles[" + std::to_string(idx++) + "]";
      if (!entry.is_object()) throw ParseError("'" + path + "' must be an object");
      reject_unknown(entry, path, {"center", "radius", "velocity", "waypoints"});
      ObstacleActor actor;
      actor.center = get_vec(entry, path, "center", 2, actor.center);
      actor.radius = get_num(entry, path, "radius", actor.radius);
      check(actor.radius >= 0.0, "world obstacle radius must be >= 0");
      actor.velocity = get_vec(entry, path, "velocity", 2, actor.velocity);
      for (const auto& [t, xy] : get_rows(entry, path, "waypoints", 2)) {
        actor.waypoints.emplace_back(t, Vector2d(xy[0], xy[1]));
      }
      if (!actor.waypoints.empty()) actor.center = actor.waypoints.front().second;
      world.obstacles.push_back(actor);
    }
  }
  if (obj.contains("surface")) {
    const json& s = member(obj, "world", "surface");
    reject_unknown(s, "world.surface", {"present", "point", "normal", "stiffness"});
    world.surface.present = get_bool(s, "world.surface", "present", true);
    world.surface.point = get_vec(s, "world.surface", "point", 3, world.surface.point);
    world.surface.normal = get_vec(s, "world.surface", "normal", 3, world.surface.normal);
    world.surface.stiffness = get_num(s, "world.surface", "stiffness",
                                      world.surface.stiffness);
    check(world.surface.normal.norm() > 1e-9, "world.surface.normal must be nonzero");
    check(world.surface.stiffness >= 0.0, "world.surface.stiffness must be >= 0");
  }
  for (const auto& [t, w] : get_rows(obj, "world", "force_script", 6)) {
    world.force_script.push_back({t, Vector6d(w)});
  }
  return world;
}

json links_json(const RobotModel& model) {
  json out = json::array();
  for (const auto& link : model.arm_links) {
    out.push_back({{"length", link.length},
                   {"twist", link.twist},
                   {"offset", link.offset},
                   {"joint_offset", link.joint_offset}});
  }
  return out;
}

json vec_json(const VectorXd& v) {
  json out = json::array();
  for (int i = 0; i < v.size(); ++i) out.push_back(v[i]);
  return out;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text) {
  const json doc = parse_strict(text);
  if (!doc.is_object()) throw ParseError("scenario document must be a JSON object");
  reject_unknown(doc, "$",
                 {"name", "duration", "dt", "robot", "initial", "controller", "world",
                  "plant", "reference"});
  ScenarioConfig cfg;
  cfg.name = get_str(doc, "$", "name", cfg.name);
  cfg.duration = get_num(doc, "$", "duration", cfg.duration);
  cfg.dt = get_num(doc, "$", "dt", cfg.dt);
  check(cfg.duration > 0.0, "duration must be positive");
  check(cfg.dt > 0.0, "dt must be positive");
  check(cfg.duration >= cfg.dt, "duration must cover at least one cycle");
  if (doc.contains("robot")) cfg.robot = parse_robot(doc.at("robot"));
  if (doc.contains("initial")) {
    const json& init = doc.at("initial");
    reject_unknown(init, "initial", {"base_pose", "arm_joints"});
    cfg.initial_base_pose = get_vec(init, "initial", "base_pose", 3, cfg.initial_base_pose);
    cfg.initial_arm_joints =
        get_vec(init, "initial", "arm_joints", 6, cfg.initial_arm_joints);
  }
  for (int i = 0; i < 6; ++i) {
    check(cfg.initial_arm_joints[i] >= cfg.robot.joint_lower[i] &&
              cfg.initial_arm_joints[i] <= cfg.robot.joint_upper[i],
          "initial.arm_joints must lie within the joint limits");
  }
  if (doc.contains("controller")) cfg.controller = parse_controller(doc.at("controller"));
  if (doc.contains("world")) cfg.world = parse_world(doc.at("world"));
  if (doc.contains("plant")) {
    const json& p = doc.at("plant");
    reject_unknown(p, "plant", {"bandwidth", "flex_freq", "flex_damping", "flex_gain"});
    cfg.plant.bandwidth = get_num(p, "plant", "bandwidth", cfg.plant.bandwidth);
    cfg.plant.flex_freq = get_num(p, "plant", "flex_freq", cfg.plant.flex_freq);
    cfg.plant.flex_damping = get_num(p, "plant", "flex_damping", cfg.plant.flex_damping);
    cfg.plant.flex_gain = get_num(p, "plant", "flex_gain", cfg.plant.flex_gain);
    check(cfg.plant.bandwidth > 0.0, "plant.bandwidth must be positive");
    check(cfg.plant.flex_freq > 0.0, "plant.flex_freq must be positive");
    check(cfg.plant.flex_damping >= 0.0, "plant.flex_damping must be >= 0");
  }
  if (doc.contains("reference")) {
    const json& r = doc.at("reference");
    reject_unknown(r, "reference", {"type", "profile"});
    const std::string type = get_str(r, "reference", "type", "none");
    if (type == "none") {
      cfg.reference_type = ReferenceType::kNone;
    } else if (type == "velocity") {
      cfg.reference_type = ReferenceType::kVelocityProfile;
    } else {
      throw ValidationError("reference.type must be 'none' or 'velocity'");
    }
    for (const auto& [t, v] : get_rows(r, "reference", "profile", 6)) {
      cfg.velocity_profile.emplace_back(t, Vector6d(v));
    }
    if (cfg.reference_type == ReferenceType::kVelocityProfile) {
      check(!cfg.velocity_profile.empty(),
            "reference.profile must not be empty for type 'velocity'");
    }
  }
  cfg.controller.dt = cfg.dt;
  cfg.controller.filter.dt = cfg.dt;
  return cfg;
}

std::string print_config(const ScenarioConfig& config) {
  json doc;
  doc["name"] = config.name;
  doc["duration"] = config.duration;
  doc["dt"] = config.dt;

  json robot;
  robot["base_radius"] = config.robot.base_radius;
  robot["arm_mount_translation"] = vec_json(config.robot.arm_mount_translation);
  robot["arm_mount_yaw"] =
      std::atan2(config.robot.arm_mount_rotation(1, 0), config.robot.arm_mount_rotation(0, 0));
  robot["arm_links"] = links_json(config.robot);
  json limits = json::array();
  for (int i = 0; i < 6; ++i) {
    limits.push_back({config.robot.joint_lower[i] * 180.0 / kPi,
                      config.robot.joint_upper[i] * 180.0 / kPi});
  }
  robot["joint_limits_deg"] = limits;
  doc["robot"] = robot;

  doc["initial"] = {{"base_pose", vec_json(config.initial_base_pose)},
                    {"arm_joints", vec_json(config.initial_arm_joints)}};

  const ControllerConfig& c = config.controller;
  json ctrl;
  ctrl["mode"] = mode_name(c.mode);
  ctrl["sigma_xy"] = c.factors.sigma_xy;
  ctrl["sigma_phi"] = c.factors.sigma_phi;
  ctrl["dmp"] = {{"tau", c.dmp.tau},
                 {"alpha_z", c.dmp.alpha_z},
                 {"beta_z", c.dmp.beta_z},
                 {"alpha_s", c.dmp.alpha_s}};
  ctrl["base_dmp"] = {{"alpha_z", c.base_dmp.alpha_z},
                      {"beta_z", c.base_dmp.beta_z}};
  ctrl["filter"] = {{"enabled", c.filter_enabled},
                    {"cutoff", c.filter.cutoff},
                    {"damping", c.filter.damping}};
  ctrl["capability"] = {{"null_gain", c.cm_params.null_gain},
                        {"upper", c.cm_params.cm_upper},
                        {"lower", c.cm_params.cm_lower},
                        {"joint_gain", c.cm_params.jl_scale},
                        {"gradient_step", c.cm_params.grad_step}};
  ctrl["obstacle"] = {{"gain", c.field.gain}, {"threshold", c.field.threshold}};
  ctrl["workspace"] = {{"extend_lower", c.workspace.extend_lower},
                       {"extend_upper", c.workspace.extend_upper},
                       {"deflect_lower_deg", c.workspace.deflect_lower * 180.0 / kPi},
                       {"deflect_upper_deg", c.workspace.deflect_upper * 180.0 / kPi}};
  ctrl["hri"] = {{"enabled", c.hri_switch != 0}, {"gain", c.hri_gain}};
  ctrl["cancellation_enabled"] = c.comp_switch != 0;
  ctrl["force"] = {{"k_p", c.force_gains.k_p},
                   {"k_d", c.force_gains.k_d},
                   {"k_f", c.force_gains.k_f},
                   {"selection", vec_json(c.selection)},
                   {"desired", vec_json(c.desired_force)}};
  doc["controller"] = ctrl;

  json world;
  json obstacles = json::array();
  for (const auto& actor : config.world.obstacles) {
    json entry;
    entry["center"] = vec_json(actor.center);
    entry["radius"] = actor.radius;
    entry["velocity"] = vec_json(actor.velocity);
    json waypoints = json::array();
    for (const auto& [t, xy] : actor.waypoints) waypoints.push_back({t, xy.x(), xy.y()});
    entry["waypoints"] = waypoints;
    obstacles.push_back(entry);
  }
  world["obstacles"] = obstacles;
  world["surface"] = {{"present", config.world.surface.present},
                      {"point", vec_json(config.world.surface.point)},
                      {"normal", vec_json(config.world.surface.normal)},
                      {"stiffness", config.world.surface.stiffness}};
  json script = json::array();
  for (const auto& sample : config.world.force_script) {
    json row = json::array();
    row.push_back(sample.t);
    for (int i = 0; i < 6; ++i) row.push_back(sample.wrench[i]);
    script.push_back(row);
  }
  world["force_script"] = script;
  doc["world"] = world;

  doc["plant"] = {{"bandwidth", config.plant.bandwidth},
                  {"flex_freq", config.plant.flex_freq},
                  {"flex_damping", config.plant.flex_damping},
                  {"flex_gain", config.plant.flex_gain}};

  json reference;
  reference["type"] =
      config.reference_type == ReferenceType::kVelocityProfile ? "velocity" : "none";
  json profile = json::array();
  for (const auto& [t, v] : config.velocity_profile) {
    json row = json::array();
    row.push_back(t);
    for (int i = 0; i < 6; ++i) row.push_back(v[i]);
    profile.push_back(row);
  }
  reference["profile"] = profile;
  doc["reference"] = reference;

  return doc.dump(2) + "\n";
}

std::string apply_override(const std::string& text, const std::string& spec) {
  const auto eq = spec.find('=');
  if (eq == std::string::npos || eq == 0) {
    throw ParseError("override must look like dotted.path=json-value");
  }
  const std::string path = spec.substr(0, eq);
  const std::string value_text = spec.substr(eq + 1);
  json value;
  try {
    value = json::parse(value_text);
  } catch (const json::exception&) {
    value = value_text;  // bare words become strings, e.g. mode=manipulation
  }
  json doc = parse_strict(text);
  std::vector<std::string> tokens;
  std::stringstream stream(path);
  std::string token;
  while (std::getline(stream, token, '.')) {
    if (token.empty()) throw ParseError("override path has an empty segment");
    tokens.push_back(token);
  }
  json* cur = &doc;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    const bool numeric = std::all_of(tok.begin(), tok.end(),
                                     [](char ch) { return ch >= '0' && ch <= '9'; });
    if (numeric && cur->is_array()) {
      const std::size_t idx = std::stoul(tok);
      if (idx >= cur->size()) throw ParseError("override index out of range: " + tok);
      cur = &(*cur)[idx];
    } else {
      cur = &(*cur)[tok];
    }
  }
  const std::string& last = tokens.back();
  const bool numeric = std::all_of(last.begin(), last.end(),
                                   [](char ch) { return ch >= '0' && ch <= '9'; });
  if (numeric && cur->is_array()) {
    const std::size_t idx = std::stoul(last);
    if (idx >= cur->size()) throw ParseError("override index out of range: " + last);
    (*cur)[idx] = value;
  } else {
    (*cur)[last] = value;
  }
  return doc.dump(2);
}

const std::map<std::string, std::string>& bundled_scenarios() {
  static const std::map<std::string, std::string> bundle = {
      {"trajectory_tracking", R"json({
  "name": "trajectory_tracking",
  "duration": 4.0,
  "initial": {"arm_joints": [0.0, -0.75, 0.10, 0.0, 1.40, 0.0]},
  "controller": {"mode": "loco_manipulation", "sigma_xy": 0.5, "sigma_phi": 0.5},
  "plant": {"flex_gain": 12.0},
  "reference": {"type": "velocity", "profile": [[0.0, 0.1, 0.0, 0.0, 0.0, 0.0, 0.0]]}
})json"},
      {"robust_wbc_obstacles", R"json({
  "name": "robust_wbc_obstacles",
  "duration": 36.0,
  "initial": {"arm_joints": [0.0, -0.75, 0.10, 0.0, 1.40, 0.0]},
  "controller": {"mode": "loco_manipulation",
                 "base_dmp": {"alpha_z": 2.5, "beta_z": 0.625}},
  "world": {"obstacles": [{"radius": 0.25, "waypoints": [
    [0.0, 3.0, 0.0], [2.0, 3.0, 0.0], [5.0, 1.2, 0.0], [8.0, 0.85, 0.0],
    [11.0, 0.716, 0.0], [15.0, 0.716, 0.0], [21.0, 0.491, 0.0],
    [22.5, 0.491, 0.0], [24.5, 1.5, 0.0], [25.5, 3.0, 0.0], [36.0, 3.0, 0.0]]}]}
})json"},
      {"line_tracking_obstacles", R"json({
  "name": "line_tracking_obstacles",
  "duration": 15.0,
  "initial": {"arm_joints": [0.0, -0.75, 0.10, 0.0, 1.40, 0.0]},
  "controller": {"mode": "locomotion"},
  "world": {"obstacles": [
    {"center": [1.5, 0.52], "radius": 0.25},
    {"center": [3.0, -0.52], "radius": 0.25}]},
  "reference": {"type": "velocity", "profile": [[0.0, 0.3, 0.0, 0.0, 0.0, 0.0, 0.0]]}
})json"},
      {"wiping_force", R"json({
  "name": "wiping_force",
  "duration": 25.0,
  "initial": {"arm_joints": [0.0, -0.75, 0.10, 0.0, 1.40, 0.0]},
  "controller": {
    "mode": "manipulation",
    "force": {"k_p": 0.0005, "k_d": 0.0, "k_f": 0.01,
              "selection": [0, 1, 1, 1, 1, 1],
              "desired": [-10.0, 0.0, 0.0, 0.0, 0.0, 0.0]}},
  "world": {
    "surface": {"present": true, "point": [0.60, 0.0, 0.40],
                "normal": [-1.0, 0.0, 0.0], "stiffness": 1000.0},
    "obstacles": [{"radius": 0.25, "waypoints": [
      [0.0, 0.0, -2.5], [10.0, 0.0, -2.5], [14.0, 0.0, -0.65],
      [18.0, 0.0, -0.65], [22.0, 0.0, -2.5], [25.0, 0.0, -2.5]]}]},
  "reference": {"type": "velocity", "profile": [
    [0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [2.0, 0.0, 0.04, 0.0, 0.0, 0.0, 0.0],
    [8.0, 0.0, -0.04, 0.0, 0.0, 0.0, 0.0],
    [14.0, 0.0, 0.04, 0.0, 0.0, 0.0, 0.0],
    [20.0, 0.0, -0.04, 0.0, 0.0, 0.0, 0.0],
    [25.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]]}
})json"},
      {"intuitive_phri", R"json({
  "name": "intuitive_phri",
  "duration": 20.0,
  "robot": {"arm_links": [
    {"length": 0.0, "twist": 0.0, "offset": 0.22, "joint_offset": 0.0},
    {"length": 0.0, "twist": -1.5707963267948966, "offset": 0.0, "joint_offset": 0.0},
    {"length": 0.50, "twist": 0.0, "offset": 0.0, "joint_offset": 0.0},
    {"length": 0.0, "twist": -1.5707963267948966, "offset": 0.52, "joint_offset": 0.0},
    {"length": 0.0, "twist": 1.5707963267948966, "offset": 0.0, "joint_offset": 0.0},
    {"length": 0.0, "twist": -1.5707963267948966, "offset": 0.14, "joint_offset": 0.0}]},
  "initial": {"arm_joints": [0.0, -0.75, 0.35, 0.0, 1.20, 0.0]},
  "controller": {
    "mode": "intuitive_phri",
    "hri": {"enabled": true, "gain": 0.05},
    "force": {"k_p": 0.0, "k_f": 0.01}},
  "world": {"force_script": [
    [0.0, 0, 0, 0, 0, 0, 0], [2.0, 0, 0, 0, 0, 0, 0],
    [2.2, 2, 0, 0, 0, 0, 0], [3.3, 2, 0, 0, 0, 0, 0],
    [3.7, -2, 0, 0, 0, 0, 0], [4.6, -2, 0, 0, 0, 0, 0],
    [4.8, 0, 0, 0, 0, 0, 0], [5.0, 0, 0, 0, 0, 0, 0],
    [5.3, 4, 0, 2, 0, 0, 0], [8.7, 4, 0, 2, 0, 0, 0],
    [9.0, 0, 0, 0, 0, 0, 0],
    [9.3, 0, 3.5, 0, 0, 0, 0], [11.7, 0, 3.5, 0, 0, 0, 0],
    [12.0, 0, 0, 0, 0, 0, 0],
    [12.3, -4, 0, -2, 0, 0, 0], [13.7, -4, 0, -2, 0, 0, 0],
    [14.0, 0, 0, 0, 0, 0, 0],
    [14.3, 0, 3, 0, 0, 0, 2], [16.7, 0, 3, 0, 0, 0, 2],
    [17.0, 0, 0, 0, 0, 0, 0], [20.0, 0, 0, 0, 0, 0, 0]]}
})json"}};
  return bundle;
}

std::string load_scenario_text(const std::string& name_or_path) {
  const auto& bundle = bundled_scenarios();
  const auto it = bundle.find(name_or_path);
  if (it != bundle.end()) return it->second;
  std::ifstream stream(name_or_path);
  if (!stream) {
    throw IoError("no bundled scenario or readable file named '" + name_or_path + "'");
  }
  std::stringstream buffer;
  buffer << stream.rdbuf();
  return buffer.str();
}

std::string csv_header() {
  std::string h = "t,base_x,base_y,base_yaw,q1,q2,q3,q4,q5,q6";
  auto six = [&h](const std::string& stem) {
    for (int i = 1; i <= 6; ++i) h += "," + stem + "_" + std::to_string(i);
  };
  six("va_ref");
  six("va_wln");
  h += ",vb_raw_x,vb_raw_y,vb_raw_w,vb_corr_x,vb_corr_y,vb_corr_w";
  h += ",vb_ref_x,vb_ref_y,vb_ref_w";
  h += ",vee_cmd_x,vee_cmd_y,vee_cmd_z,vee_cmd_wx,vee_cmd_wy,vee_cmd_wz";
  h += ",ee_cmd_x,ee_cmd_y,ee_cmd_z,ee_x,ee_y,ee_z,vib_x,vib_y";
  h += ",fext_x,fext_y,fext_z,fext_wx,fext_wy,fext_wz";
  h += ",cm,alpha,sigma_xy,sigma_phi,d_obs";
  six("dev");
  six("eint");
  h += ",ws_d,ws_phi,d_rate,phi_rate,f_xy,f_phi";
  return h;
}

void export_csv(const ScenarioLog& log, const std::string& path) {
  std::FILE* file = std::fopen(path.c_str(), "wb");
  if (!file) throw IoError("cannot open '" + path + "' for writing");
  const std::string header = csv_header();
  std::fprintf(file, "%s\n", header.c_str());
  std::vector<double> row;
  for (const auto& r : log.records) {
    row.clear();
    row.push_back(r.t);
    for (int i = 0; i < 3; ++i) row.push_back(r.base_pose[i]);
    for (int i = 0; i < 6; ++i) row.push_back(r.arm_joints[i]);
    for (int i = 0; i < 6; ++i) row.push_back(r.arm_velocity_ref[i]);
    for (int i = 0; i < 6; ++i) row.push_back(r.arm_velocity_wln[i]);
    for (int i = 0; i < 3; ++i) row.push_back(r.base_velocity_raw[i]);
    for (int i = 0; i < 3; ++i) row.push_back(r.base_velocity_corrected[i]);
    for (int i = 0; i < 3; ++i) row.push_back(r.base_velocity_ref[i]);
    for (int i = 0; i < 6; ++i) row.push_back(r.ee_velocity_cmd[i]);
    for (int i = 0; i < 3; ++i) row.push_back(r.ee_cmd_position[i]);
    for (int i = 0; i < 3; ++i) row.push_back(r.ee_position[i]);
    for (int i = 0; i < 2; ++i) row.push_back(r.ee_vibration[i]);
    for (int i = 0; i < 6; ++i) row.push_back(r.external_force[i]);
    row.push_back(r.capability);
    row.push_back(r.alpha);
    row.push_back(r.sigma_xy);
    row.push_back(r.sigma_phi);
    row.push_back(r.obstacle_distance);
    for (int i = 0; i < 6; ++i) row.push_back(r.ee_deviation[i]);
    for (int i = 0; i < 6; ++i) row.push_back(r.error_integral[i]);
    row.push_back(r.workspace_d);
    row.push_back(r.workspace_phi);
    row.push_back(r.d_rate);
    row.push_back(r.phi_rate);
    row.push_back(r.f_xy);
    row.push_back(r.f_phi);
    for (std::size_t i = 0; i < row.size(); ++i) {
      std::fprintf(file, i == 0 ? "%.9g" : ",%.9g", row[i]);
    }
    std::fputc('\n', file);
  }
  std::fclose(file);
}

namespace {

Vector6d profile_velocity(const std::vector<std::pair<double, Vector6d>>& profile,
                          double t) {
  if (profile.empty()) return Vector6d::Zero();
  if (t <= profile.front().first) return profile.front().second;
  if (t >= profile.back().first) return profile.back().second;
  for (std::size_t i = 0; i + 1 < profile.size(); ++i) {
    if (t <= profile[i + 1].first) {
      const double span = profile[i + 1].first - profile[i].first;
      const double u = span > 0.0 ? (t - profile[i].first) / span : 1.0;
      return profile[i].second + u * (profile[i + 1].second - profile[i].second);
    }
  }
  return profile.back().second;
}

}  // namespace

ScenarioLog run_scenario(const ScenarioConfig& config) {
  ScenarioConfig cfg = config;
  cfg.controller.dt = cfg.dt;
  cfg.controller.filter.dt = cfg.dt;
  const RobotModel& model = cfg.robot;

  Vector3d base_pose = cfg.initial_base_pose;
  Vector6d q_a = cfg.initial_arm_joints;
  World world = cfg.world;
  BasePlantState plant;
  Vector3d vibration = Vector3d::Zero();
  ObstacleSensor sensor(15.0);
  LoopContext ctx;

  const int cycles = static_cast<int>(std::llround(cfg.duration / cfg.dt));
  ScenarioLog log;
  log.records.reserve(cycles);
  Vector3d ee_cmd_pos = Vector3d::Zero();
  bool ee_cmd_init = false;

  for (int k = 0; k < cycles; ++k) {
    const double t = k * cfg.dt;
    if (k > 0) world = world_step(world, t - cfg.dt, cfg.dt);

    const Pose ee_b = ee_in_base(q_a, model);
    const Matrix3d w_r_b = world_to_base_rotation(base_pose[2]).transpose();
    const Vector3d base_org(base_pose[0], base_pose[1], 0.0);
    const Vector3d ee_true_w = base_org + w_r_b * (ee_b.position + vibration);
    if (!ee_cmd_init) {
      ee_cmd_pos = base_org + w_r_b * ee_b.position;
      ee_cmd_init = true;
    }

    sensor.sample(world, base_pose, model.base_radius, t);
    SensorReadings sensors;
    sensors.external_force_world =
        scripted_force(world, t) + contact_force(world.surface, ee_true_w);
    sensors.obstacle_valid = sensor.valid();
    if (sensor.valid()) {
      sensors.obstacle_distance = sensor.distance();
      sensors.obstacle_away_direction = sensor.away_direction();
    }

    ReferenceInput ref;
    if (cfg.reference_type == ReferenceType::kVelocityProfile) {
      ref.ee_velocity_world = profile_velocity(cfg.velocity_profile, t);
    }

    WholeBodyState state;
    state.base_pose = base_pose;
    state.arm_joints = q_a;
    state.ee_pose_in_base = ee_b;
    const ControlOutputs out =
        control_step(state, ref, sensors, cfg.controller, model, ctx);
    ee_cmd_pos += cfg.dt * out.ee_velocity_cmd_world.head<3>();

    CycleRecord rec;
    rec.t = t;
    rec.base_pose = base_pose;
    rec.arm_joints = q_a;
    rec.arm_velocity_ref = out.arm_velocity_ref;
    rec.arm_velocity_wln = out.arm_velocity_wln;
    rec.base_velocity_raw = out.base_velocity_raw;
    rec.base_velocity_corrected = out.base_velocity_corrected;
    rec.base_velocity_ref = out.base_velocity_ref;
    rec.ee_velocity_cmd = out.ee_velocity_cmd_world;
    rec.ee_cmd_position = ee_cmd_pos;
    rec.ee_position = ee_true_w;
    rec.ee_vibration = vibration.head<2>();
    rec.external_force = sensors.external_force_world;
    rec.capability = out.metrics.capability;
    rec.alpha = out.alpha;
    rec.sigma_xy = out.sigma_xy;
    rec.sigma_phi = out.sigma_phi;
    rec.obstacle_distance = sensors.obstacle_valid ? sensors.obstacle_distance : -1.0;
    rec.ee_deviation = out.ee_deviation;
    rec.error_integral = out.error_integral_world;
    rec.workspace_d = out.workspace.d;
    rec.workspace_phi = out.workspace.phi;
    rec.d_rate = out.d_rate;
    rec.phi_rate = out.phi_rate;
    rec.f_xy = out.workspace.f_xy;
    rec.f_phi = out.workspace.f_phi;
    log.records.push_back(rec);

    const BasePlantResult plant_res =
        base_plant_step(out.base_velocity_ref, plant, cfg.plant, cfg.dt);
    plant = plant_res.state;
    vibration = plant_res.ee_vibration_offset;
    q_a = arm_plant_step(out.arm_velocity_ref, q_a, model, cfg.dt);
    base_pose.head<2>() +=
        cfg.dt * (w_r_b.topLeftCorner<2, 2>() * plant_res.actual_velocity.head<2>());
    base_pose[2] += cfg.dt * plant_res.actual_velocity[2];
  }
  return log;
}

int cli_main(int argc, char** argv) {
  CLI::App app{"whole-body controller scenario runner"};
  app.require_subcommand(1);

  std::string scenario;
  std::string out_path;
  double duration = -1.0;
  std::vector<std::string> overrides;

  CLI::App* run = app.add_subcommand("run", "run a scenario and export its log");
  run->add_option("--scenario", scenario, "bundled name or path to a JSON file")
      ->required();
  run->add_option("--out", out_path, "CSV output path");
  run->add_option("--duration", duration, "override the configured duration, s");
  run->add_option("--override", overrides, "dotted.path=json-value config edits");

  CLI::App* list = app.add_subcommand("list-scenarios", "print bundled scenario names");

  std::string validate_target;
  CLI::App* validate = app.add_subcommand("validate", "parse and validate a scenario");
  validate->add_option("--scenario", validate_target, "bundled name or path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  try {
    if (list->parsed()) {
      for (const auto& [name, text] : bundled_scenarios()) {
        std::cout << name << "\n";
      }
      return 0;
    }
    if (validate->parsed()) {
      const ScenarioConfig cfg = parse_config(load_scenario_text(validate_target));
      std::cout << "valid: " << cfg.name << "\n";
      return 0;
    }
    if (run->parsed()) {
      std::string text = load_scenario_text(scenario);
      for (const auto& edit : overrides) text = apply_override(text, edit);
      if (duration > 0.0) {
        text = apply_override(text, "duration=" + std::to_string(duration));
      }
      const ScenarioConfig cfg = parse_config(text);
      const ScenarioLog log = run_scenario(cfg);
      if (!out_path.empty()) {
        export_csv(log, out_path);
      }
      const CycleRecord& last = log.records.back();
      std::cout << cfg.name << ": " << log.records.size() << " cycles, final base ("
                << last.base_pose[0] << ", " << last.base_pose[1] << ", "
                << last.base_pose[2] << "), final ee (" << last.ee_position[0] << ", "
                << last.ee_position[1] << ", " << last.ee_position[2] << ")\n";
      return 0;
    }
  } catch (const ParseError& e) {
    std::cerr << "parse error: " << e.what() << "\n";
    return 2;
  } catch (const ValidationError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
  return 2;
}

}  // namespace wbc
