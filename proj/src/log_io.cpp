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

#include "safewalk/log_io.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace safewalk {

using nlohmann::json;

namespace {

GaitType gait_of(const json& j) { return gait_from_string(j.get<std::string>()); }

Leg leg_from_string(const std::string& s) {
  for (Leg l : kAllLegs) {
    if (to_string(l) == s) return l;
  }
  throw InvalidArgument("unknown leg '" + s + "'");
}

json vec(const Vec2d& v) { return json::array({v.x(), v.y()}); }
Vec2d to_vec(const json& j) { return Vec2d(j.at(0).get<double>(), j.at(1).get<double>()); }

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot open for writing: " + path.string());
  out << text;
  out.flush();
  if (!out) throw Error("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open: " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

class CsvWriter {
 public:
  explicit CsvWriter(std::string header) { text_ = std::move(header) + "\n"; }
  CsvWriter& num(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return field(buf);
  }
  CsvWriter& integer(long long v) { return field(std::to_string(v)); }
  CsvWriter& text(std::string_view v) { return field(std::string(v)); }
  CsvWriter& quoted(const std::string& v) {
    std::string q = "\"";
    for (char c : v) {
      if (c == '"') q += '"';
      q += c;
    }
    return field(q + "\"");
  }
  void end_row() {
    text_ += "\n";
    first_ = true;
  }
  const std::string& str() const { return text_; }

 private:
  CsvWriter& field(const std::string& f) {
    if (!first_) text_ += ",";
    text_ += f;
    first_ = false;
    return *this;
  }
  std::string text_;
  bool first_ = true;
};

}  // namespace

std::string log_to_json(const TrajectoryLog& log) {
  const std::size_t n = log.ticks.size();
  auto column = [&](auto get) {
    json a = json::array();
    for (const TickRecord& r : log.ticks) a.push_back(get(r));
    return a;
  };
  json ticks{
      {"t", column([](const TickRecord& r) { return r.t; })},
      {"phi", column([](const TickRecord& r) { return vec(r.phi); })},
      {"phidot", column([](const TickRecord& r) { return vec(r.phidot); })},
      {"h_path", column([](const TickRecord& r) { return r.h_path; })},
      {"h_gait", column([](const TickRecord& r) { return r.h_gait; })},
      {"selected_gait",
       column([](const TickRecord& r) { return std::string(to_string(r.selected_gait)); })},
      {"active_gait",
       column([](const TickRecord& r) { return std::string(to_string(r.active_gait)); })},
      {"phase_index", column([](const TickRecord& r) { return r.phase_index; })},
      {"phases_completed", column([](const TickRecord& r) { return r.phases_completed; })},
      {"contact", column([](const TickRecord& r) {
         return json::array({r.contact[0], r.contact[1], r.contact[2], r.contact[3]});
       })},
      {"nu_d", column([](const TickRecord& r) { return vec(r.nu_d); })},
      {"nu_safe", column([](const TickRecord& r) { return vec(r.nu_safe); })},
      {"filter_active", column([](const TickRecord& r) { return r.filter_active; })},
      {"waypoint_index", column([](const TickRecord& r) { return r.waypoint_index; })},
      {"feet", column([](const TickRecord& r) {
         return json::array({vec(r.feet[0]), vec(r.feet[1]), vec(r.feet[2]), vec(r.feet[3])});
       })},
      {"base_height", column([](const TickRecord& r) { return r.base_height; })},
      {"pitch", column([](const TickRecord& r) { return r.pitch; })},
      {"wbc", column([](const TickRecord& r) {
         return json::array({r.wbc.dynamics, r.wbc.contact, r.wbc.friction, r.wbc.torque});
       })},
      {"contact_forces", column([](const TickRecord& r) {
         return json::array({r.contact_forces(0), r.contact_forces(1), r.contact_forces(2),
                             r.contact_forces(3)});
       })},
      {"torque_saturated", column([](const TickRecord& r) { return r.torque_saturated; })},
  };
  json footholds = json::array();
  for (const FootholdEvent& f : log.footholds) {
    footholds.push_back({{"leg", std::string(to_string(f.leg))},
                         {"t_liftoff", f.t_liftoff},
                         {"t_touchdown", f.t_touchdown},
                         {"planned", vec(f.planned)},
                         {"replanned", vec(f.replanned)},
                         {"placed", vec(f.placed)},
                         {"was_replanned", f.was_replanned},
                         {"used_fallback_edge", f.used_fallback_edge},
                         {"unreachable", f.unreachable}});
  }
  json events = json::array();
  for (const RunEvent& e : log.events) {
    events.push_back({{"t", e.t}, {"kind", e.kind}, {"message", e.message}});
  }
  json j{{"schema_version", kLogSchemaVersion},
         {"scenario", json::parse(log.scenario.to_json_text())},
         {"tick_count", n},
         {"ticks", ticks},
         {"footholds", footholds},
         {"events", events},
         {"aborted", log.aborted}};
  return j.dump();
}

TrajectoryLog log_from_json(const std::string& text) {
  TrajectoryLog log;
  try {
    const json j = json::parse(text);
    if (j.at("schema_version").get<int>() != kLogSchemaVersion) {
      throw InvalidArgument("unsupported log schema version");
    }
    log.scenario = Scenario::from_json_text(j.at("scenario").dump());
    const std::size_t n = j.at("tick_count").get<std::size_t>();
    const json& c = j.at("ticks");
    log.ticks.resize(n);
    for (std::size_t k = 0; k < n; ++k) {
      TickRecord& r = log.ticks[k];
      r.t = c.at("t").at(k).get<double>();
      r.phi = to_vec(c.at("phi").at(k));
      r.phidot = to_vec(c.at("phidot").at(k));
      r.h_path = c.at("h_path").at(k).get<double>();
      r.h_gait = c.at("h_gait").at(k).get<double>();
      r.selected_gait = gait_of(c.at("selected_gait").at(k));
      r.active_gait = gait_of(c.at("active_gait").at(k));
      r.phase_index = c.at("phase_index").at(k).get<int>();
      r.phases_completed = c.at("phases_completed").at(k).get<std::uint64_t>();
      for (std::size_t i = 0; i < 4; ++i) {
        r.contact[i] = c.at("contact").at(k).at(i).get<bool>();
        r.feet[i] = to_vec(c.at("feet").at(k).at(i));
      }
      r.nu_d = to_vec(c.at("nu_d").at(k));
      r.nu_safe = to_vec(c.at("nu_safe").at(k));
      r.filter_active = c.at("filter_active").at(k).get<bool>();
      r.waypoint_index = c.at("waypoint_index").at(k).get<int>();
      r.base_height = c.at("base_height").at(k).get<double>();
      r.pitch = c.at("pitch").at(k).get<double>();
      const json& w = c.at("wbc").at(k);
      r.wbc = {w.at(0).get<double>(), w.at(1).get<double>(), w.at(2).get<double>(),
               w.at(3).get<double>()};
      for (int i = 0; i < 4; ++i) {
        r.contact_forces(i) = c.at("contact_forces").at(k).at(static_cast<std::size_t>(i)).get<double>();
      }
      r.torque_saturated = c.at("torque_saturated").at(k).get<bool>();
    }
    for (const json& f : j.at("footholds")) {
      FootholdEvent e;
      e.leg = leg_from_string(f.at("leg").get<std::string>());
      e.t_liftoff = f.at("t_liftoff").get<double>();
      e.t_touchdown = f.at("t_touchdown").get<double>();
      e.planned = to_vec(f.at("planned"));
      e.replanned = to_vec(f.at("replanned"));
      e.placed = to_vec(f.at("placed"));
      e.was_replanned = f.at("was_replanned").get<bool>();
      e.used_fallback_edge = f.at("used_fallback_edge").get<bool>();
      e.unreachable = f.at("unreachable").get<bool>();
      log.footholds.push_back(e);
    }
    for (const json& e : j.at("events")) {
      log.events.push_back({e.at("t").get<double>(), e.at("kind").get<std::string>(),
                            e.at("message").get<std::string>()});
    }
    log.aborted = j.at("aborted").get<bool>();
  } catch (const json::exception& e) {
    throw InvalidArgument(std::string("malformed log: ") + e.what());
  }
  return log;
}

void write_log(const TrajectoryLog& log, const std::filesystem::path& path) {
  write_text(path, log_to_json(log));
}

TrajectoryLog read_log(const std::filesystem::path& path) {
  return log_from_json(read_text(path));
}

std::vector<std::filesystem::path> write_csvs(const TrajectoryLog& log,
                                              const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory: " + dir.string());
  std::vector<std::filesystem::path> written;
  auto emit = [&](const char* name, const CsvWriter& w) {
    const auto path = dir / name;
    write_text(path, w.str());
    written.push_back(path);
  };

  CsvWriter base("t,x,y,vx,vy,nu_d_x,nu_d_y,nu_safe_x,nu_safe_y,filter_active,waypoint");
  CsvWriter barrier("t,h_path,h_gait");
  CsvWriter gait("t,selected,active,phase_index,phases_completed,c_FL,c_FR,c_BL,c_BR");
  CsvWriter feet("t,FL_x,FL_y,FR_x,FR_y,BL_x,BL_y,BR_x,BR_y");
  CsvWriter wbc("t,base_z,pitch,res_dynamics,res_contact,res_friction,res_torque,"
                "F_front_t,F_front_n,F_rear_t,F_rear_n,saturated");
  for (const TickRecord& r : log.ticks) {
    base.num(r.t).num(r.phi.x()).num(r.phi.y()).num(r.phidot.x()).num(r.phidot.y())
        .num(r.nu_d.x()).num(r.nu_d.y()).num(r.nu_safe.x()).num(r.nu_safe.y())
        .integer(r.filter_active).integer(r.waypoint_index).end_row();
    barrier.num(r.t).num(r.h_path).num(r.h_gait).end_row();
    gait.num(r.t).text(to_string(r.selected_gait)).text(to_string(r.active_gait))
        .integer(r.phase_index).integer(static_cast<long long>(r.phases_completed));
    for (bool c : r.contact) gait.integer(c);
    gait.end_row();
    feet.num(r.t);
    for (const Vec2d& f : r.feet) feet.num(f.x()).num(f.y());
    feet.end_row();
    wbc.num(r.t).num(r.base_height).num(r.pitch).num(r.wbc.dynamics).num(r.wbc.contact)
        .num(r.wbc.friction).num(r.wbc.torque);
    for (int i = 0; i < 4; ++i) wbc.num(r.contact_forces(i));
    wbc.integer(r.torque_saturated).end_row();
  }
  CsvWriter steps("leg,t_liftoff,t_touchdown,planned_x,planned_y,replanned_x,replanned_y,"
                  "placed_x,placed_y,was_replanned,used_fallback_edge,unreachable");
  for (const FootholdEvent& f : log.footholds) {
    steps.text(to_string(f.leg)).num(f.t_liftoff).num(f.t_touchdown)
        .num(f.planned.x()).num(f.planned.y()).num(f.replanned.x()).num(f.replanned.y())
        .num(f.placed.x()).num(f.placed.y()).integer(f.was_replanned)
        .integer(f.used_fallback_edge).integer(f.unreachable).end_row();
  }
  CsvWriter events("t,kind,message");
  for (const RunEvent& e : log.events) events.num(e.t).text(e.kind).quoted(e.message).end_row();

  emit("base.csv", base);
  emit("barrier.csv", barrier);
  emit("gait.csv", gait);
  emit("feet.csv", feet);
  emit("footholds.csv", steps);
  if (log.scenario.plant == PlantMode::Dynamic) emit("wbc.csv", wbc);
  emit("events.csv", events);
  return written;
}

std::string summary_to_json(const RunSummary& s) {
  auto switches = [](const std::vector<GaitSwitch>& v) {
    json a = json::array();
    for (const auto& w : v) {
      a.push_back({{"t", w.t}, {"from", std::string(to_string(w.from))},
                   {"to", std::string(to_string(w.to))}});
    }
    return a;
  };
  json j{{"schema_version", s.schema_version},
         {"scenario", s.scenario},
         {"plant", s.plant},
         {"seed", s.seed},
         {"ticks", s.ticks},
         {"final_position_error", s.final_position_error},
         {"min_h_path", s.min_h_path},
         {"waypoint_reached_times", s.waypoint_reached_times},
         {"selected_gait_switches", switches(s.selected_switches)},
         {"active_gait_switches", switches(s.active_switches)},
         {"foothold_count", s.foothold_count},
         {"replan_count", s.replan_count},
         {"unreachable_count", s.unreachable_count},
         {"aborted", s.aborted},
         {"max_wbc_dynamics_residual", s.max_wbc_dynamics_residual},
         {"max_wbc_contact_residual", s.max_wbc_contact_residual},
         {"max_base_height_error", s.max_base_height_error}};
  return j.dump(2) + "\n";
}

void write_summary(const RunSummary& summary, const std::filesystem::path& path) {
  write_text(path, summary_to_json(summary));
}

std::string report_to_json(const ValidationReport& r) {
  json v = json::array();
  for (const Violation& x : r.violations) {
    v.push_back({{"t", x.t}, {"kind", x.kind}, {"detail", x.detail}});
  }
  json j{{"ok", r.ok()},
         {"min_h_path", r.min_h_path},
         {"min_h_path_filter_active", std::isfinite(r.min_h_path_filter_active)
                                          ? json(r.min_h_path_filter_active)
                                          : json(nullptr)},
         {"unsafe_footholds", r.unsafe_footholds},
         {"violations", v}};
  return j.dump(2) + "\n";
}

}  // namespace safewalk
