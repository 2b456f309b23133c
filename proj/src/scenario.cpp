// Copyright 2026 The safewalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "safewalk/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace safewalk {

using nlohmann::json;

std::string to_string(PlantMode m) { return m == PlantMode::Kinematic ? "kinematic" : "dynamic"; }

PlantMode plant_from_string(const std::string& s) {
  if (s == "kinematic") return PlantMode::Kinematic;
  if (s == "dynamic") return PlantMode::Dynamic;
  throw InvalidArgument("unknown plant mode '" + s + "'");
}

std::string to_string(FilterMode m) {
  return m == FilterMode::Kinematic ? "kinematic" : "extended";
}

FilterMode filter_mode_from_string(const std::string& s) {
  if (s == "kinematic") return FilterMode::Kinematic;
  if (s == "extended") return FilterMode::ExtendedDegree2;
  throw InvalidArgument("unknown filter mode '" + s + "'");
}

RectRegiond Scenario::manway() const {
  const double c = std::cos(manway_theta), s = std::sin(manway_theta);
  const Vec2d u(c, s), w(-s, c);
  const Vec2d hu = u * (manway_size.x() / 2), hw = w * (manway_size.y() / 2);
  return RectRegiond({manway_center - hu - hw, manway_center + hu - hw,
                      manway_center + hu + hw, manway_center - hu + hw});
}

namespace {

Ellipsed resolve(const EllipseSpec& e, const Scenario& s) {
  if (e.beta) return ellipse_from_rect(s.manway(), *e.beta);
  if (!e.a || !e.b) throw InvalidArgument("ellipse needs either beta or both a and b");
  return Ellipsed(s.manway_center, *e.a, *e.b, s.manway_theta);
}

int ratio(double fast, double slow, const char* what) {
  const double r = fast / slow;
  const long n = std::lround(r);
  if (n < 1 || std::abs(r - static_cast<double>(n)) > 1e-9 * r) {
    throw InvalidArgument(std::string(what) + " must be an integer multiple");
  }
  return static_cast<int>(n);
}

}  // namespace

Ellipsed Scenario::path() const { return resolve(path_ellipse, *this); }
Ellipsed Scenario::gait_region() const { return resolve(gait_ellipse, *this); }

int Scenario::qp_ticks_per_plan() const { return ratio(qp_hz, planner_hz, "qp_hz / planner_hz"); }

int Scenario::impedance_ticks_per_qp() const {
  return ratio(impedance_hz, qp_hz, "impedance_hz / qp_hz");
}

long Scenario::tick_count() const { return std::lround(duration * planner_hz); }

void Scenario::validate() const {
  auto positive = [](double v, const char* what) {
    if (!(v > 0.0) || !std::isfinite(v)) throw InvalidArgument(std::string(what) + " must be > 0");
  };
  if (waypoints.empty()) throw InvalidArgument("waypoint list must not be empty");
  if (filter_off_waypoint < -1 || filter_off_waypoint >= static_cast<int>(waypoints.size())) {
    throw InvalidArgument("filter_off_waypoint out of range");
  }
  positive(manway_size.x(), "manway width");
  positive(manway_size.y(), "manway height");
  manway();
  path();
  gait_region();
  positive(waypoint_tolerance, "waypoint_tolerance");
  positive(epsilon, "epsilon");
  if (!(boundary_margin >= 0.0)) throw InvalidArgument("boundary_margin must be >= 0");
  positive(timings.trot_phase, "trot_phase");
  positive(timings.static_phase, "static_phase");
  if (!(h_hyst >= 0.0)) throw InvalidArgument("h_hyst must be >= 0");
  if (!(k_raibert >= 0.0)) throw InvalidArgument("k_raibert must be >= 0");
  if (!(kp >= 0.0) || !(kd >= 0.0)) throw InvalidArgument("nominal gains must be >= 0");
  positive(alpha0, "alpha0");
  positive(lambda, "lambda");
  positive(v_max, "v_max");
  positive(v_max_quasi_static, "v_max_quasi_static");
  if (!(nominal_noise >= 0.0)) throw InvalidArgument("nominal_noise must be >= 0");
  positive(body_height, "body_height");
  positive(reach, "reach");
  positive(planner_hz, "planner_hz");
  positive(qp_hz, "qp_hz");
  positive(impedance_hz, "impedance_hz");
  positive(duration, "duration");
  qp_ticks_per_plan();
  impedance_ticks_per_qp();
  model.validate();
  wbc.validate();
  for (const auto& w : waypoints) {
    if (!w.allFinite()) throw InvalidArgument("waypoints must be finite");
  }
  if (!start.allFinite()) throw InvalidArgument("start must be finite");
}

namespace {

json vec(const Vec2d& v) { return json::array({v.x(), v.y()}); }

Vec2d to_vec(const json& j, const char* what) {
  if (!j.is_array() || j.size() != 2) {
    throw InvalidArgument(std::string(what) + " must be a 2-element array");
  }
  return Vec2d(j[0].get<double>(), j[1].get<double>());
}

template <int N>
json vecn(const Eigen::Matrix<double, N, 1>& v) {
  json a = json::array();
  for (int i = 0; i < N; ++i) a.push_back(v(i));
  return a;
}

template <int N>
void read_vecn(const json& j, const char* key, Eigen::Matrix<double, N, 1>& v) {
  if (!j.contains(key)) return;
  const json& a = j.at(key);
  if (!a.is_array() || static_cast<int>(a.size()) != N) {
    throw InvalidArgument(std::string("wbc.") + key + " must have " + std::to_string(N) +
                          " entries");
  }
  for (int i = 0; i < N; ++i) v(i) = a[static_cast<std::size_t>(i)].get<double>();
}

json ellipse_json(const EllipseSpec& e) {
  json o = json::object();
  if (e.beta) o["beta"] = *e.beta;
  if (e.a) o["a"] = *e.a;
  if (e.b) o["b"] = *e.b;
  return o;
}

EllipseSpec read_ellipse(const json& j) {
  EllipseSpec e;
  if (j.contains("beta")) e.beta = j.at("beta").get<double>();
  if (j.contains("a")) e.a = j.at("a").get<double>();
  if (j.contains("b")) e.b = j.at("b").get<double>();
  return e;
}

}  // namespace

Scenario Scenario::from_json_text(const std::string& text, const std::string& base_dir) {
  Scenario s;
  try {
    const json j = json::parse(text);
    s.name = j.value("name", s.name);
    if (j.contains("manway")) {
      const json& m = j.at("manway");
      if (m.contains("center")) s.manway_center = to_vec(m.at("center"), "manway.center");
      if (m.contains("size")) s.manway_size = to_vec(m.at("size"), "manway.size");
      s.manway_theta = m.value("theta", s.manway_theta);
    }
    if (j.contains("start")) s.start = to_vec(j.at("start"), "start");
    if (j.contains("waypoints")) {
      for (const json& w : j.at("waypoints")) s.waypoints.push_back(to_vec(w, "waypoint"));
    }
    s.filter_off_waypoint = j.value("filter_off_waypoint", s.filter_off_waypoint);
    s.waypoint_tolerance = j.value("waypoint_tolerance", s.waypoint_tolerance);
    if (j.contains("path_ellipse")) s.path_ellipse = read_ellipse(j.at("path_ellipse"));
    if (j.contains("gait_ellipse")) s.gait_ellipse = read_ellipse(j.at("gait_ellipse"));
    s.epsilon = j.value("epsilon", s.epsilon);
    s.boundary_margin = j.value("boundary_margin", s.boundary_margin);
    if (j.contains("gait")) {
      const json& g = j.at("gait");
      s.timings.trot_phase = g.value("trot_phase", s.timings.trot_phase);
      s.timings.static_phase = g.value("static_phase", s.timings.static_phase);
      s.h_hyst = g.value("h_hyst", s.h_hyst);
      s.k_raibert = g.value("k_raibert", s.k_raibert);
      if (g.contains("initial")) s.initial_gait = gait_from_string(g.at("initial").get<std::string>());
    }
    if (j.contains("controller")) {
      const json& c = j.at("controller");
      s.kp = c.value("kp", s.kp);
      s.kd = c.value("kd", s.kd);
      s.alpha0 = c.value("alpha0", s.alpha0);
      if (c.contains("filter_mode")) {
        s.filter_mode = filter_mode_from_string(c.at("filter_mode").get<std::string>());
      }
      s.lambda = c.value("lambda", s.lambda);
      s.v_max = c.value("v_max", s.v_max);
      s.v_max_quasi_static = c.value("v_max_quasi_static", s.v_max_quasi_static);
      s.nominal_noise = c.value("nominal_noise", s.nominal_noise);
    }
    if (j.contains("robot")) {
      const json& r = j.at("robot");
      s.body_height = r.value("body_height", s.body_height);
      s.reach = r.value("reach", s.reach);
      if (r.contains("hip_offsets")) {
        const json& h = r.at("hip_offsets");
        if (!h.is_array() || h.size() != 4) throw InvalidArgument("hip_offsets needs 4 entries");
        for (std::size_t i = 0; i < 4; ++i) s.hip_offsets[i] = to_vec(h[i], "hip offset");
      }
      if (r.contains("model")) s.model = RobotModel::from_json_text(r.at("model").dump());
      if (r.contains("model_file")) {
        const std::filesystem::path f = r.at("model_file").get<std::string>();
        s.model = RobotModel::from_json_file(
            (f.is_absolute() ? f : std::filesystem::path(base_dir) / f).string());
      }
    }
    if (j.contains("wbc")) {
      const json& w = j.at("wbc");
      read_vecn(w, "kp", s.wbc.kp);
      read_vecn(w, "kd", s.wbc.kd);
      read_vecn(w, "kp_imp", s.wbc.kp_imp);
      read_vecn(w, "kd_imp", s.wbc.kd_imp);
      read_vecn(w, "w_qdd", s.wbc.w_qdd);
      s.wbc.w_u = w.value("w_u", s.wbc.w_u);
      s.wbc.gamma = w.value("gamma", s.wbc.gamma);
    }
    if (j.contains("rates")) {
      const json& r = j.at("rates");
      s.planner_hz = r.value("planner_hz", s.planner_hz);
      s.qp_hz = r.value("qp_hz", s.qp_hz);
      s.impedance_hz = r.value("impedance_hz", s.impedance_hz);
    }
    s.duration = j.value("duration", s.duration);
    s.seed = j.value("seed", s.seed);
    if (j.contains("plant")) s.plant = plant_from_string(j.at("plant").get<std::string>());
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("scenario: ") + e.what());
  }
  s.validate();
  return s;
}

Scenario Scenario::from_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open scenario: " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return from_json_text(ss.str(), std::filesystem::path(path).parent_path().string());
}

std::string Scenario::to_json_text() const {
  json wp = json::array();
  for (const auto& w : waypoints) wp.push_back(vec(w));
  json hips = json::array();
  for (const auto& h : hip_offsets) hips.push_back(vec(h));
  json j{
      {"name", name},
      {"manway", {{"center", vec(manway_center)}, {"size", vec(manway_size)},
                  {"theta", manway_theta}}},
      {"start", vec(start)},
      {"waypoints", wp},
      {"filter_off_waypoint", filter_off_waypoint},
      {"waypoint_tolerance", waypoint_tolerance},
      {"path_ellipse", ellipse_json(path_ellipse)},
      {"gait_ellipse", ellipse_json(gait_ellipse)},
      {"epsilon", epsilon},
      {"boundary_margin", boundary_margin},
      {"gait", {{"trot_phase", timings.trot_phase}, {"static_phase", timings.static_phase},
                {"h_hyst", h_hyst}, {"k_raibert", k_raibert},
                {"initial", std::string(to_string(initial_gait))}}},
      {"controller", {{"kp", kp}, {"kd", kd}, {"alpha0", alpha0},
                      {"filter_mode", to_string(filter_mode)}, {"lambda", lambda},
                      {"v_max", v_max}, {"v_max_quasi_static", v_max_quasi_static},
                      {"nominal_noise", nominal_noise}}},
      {"robot", {{"body_height", body_height}, {"reach", reach}, {"hip_offsets", hips},
                 {"model", json::parse(model.to_json_text())}}},
      {"wbc", {{"kp", vecn(wbc.kp)}, {"kd", vecn(wbc.kd)}, {"kp_imp", vecn(wbc.kp_imp)},
               {"kd_imp", vecn(wbc.kd_imp)}, {"w_qdd", vecn(wbc.w_qdd)}, {"w_u", wbc.w_u},
               {"gamma", wbc.gamma}}},
      {"rates", {{"planner_hz", planner_hz}, {"qp_hz", qp_hz}, {"impedance_hz", impedance_hz}}},
      {"duration", duration},
      {"seed", seed},
      {"plant", to_string(plant)},
  };
  return j.dump(2);
}

Scenario manway_approach_scenario() {
  Scenario s;
  s.name = "manway_approach";
  s.waypoints = {Vec2d(0.8, -0.3), Vec2d(0.5, 0.0)};
  s.filter_off_waypoint = 0;
  return s;
}

}  // namespace safewalk
