/*
    Licensed under the Apache License, Version 2.0 (the "License");
    you may not use this file except in compliance with the License.
    You may obtain a copy of the License at

        https://www.apache.org/licenses/LICENSE-2.0

    Unless required by applicable law or agreed to in writing, software
    distributed under the License is distributed on an "AS IS" BASIS,
    WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
    See the License for the specific language governing permissions and
    limitations under the License.
*/
#pragma once

// JSON mappings for the simulator's value types. Doubles are written in shortest round-trip
// form, so a value read back is bit-identical to the value written.

#include "hrcsim/config.hpp"
#include "hrcsim/events.hpp"
#include "hrcsim/metrics.hpp"
#include "hrcsim/scenario.hpp"
#include "hrcsim/world.hpp"

#include <json.hpp>

#include <cstdint>
#include <cstdio>
#include <string>

namespace hrcsim {

using json = nlohmann::json;

inline constexpr int kFormatVersion = 1;

// --- primitives -------------------------------------------------------------

inline void to_json(json& j, const Point3& p) { j = json::array({p.x, p.y, p.z}); }
inline void from_json(const json& j, Point3& p) {
    if (!j.is_array() || j.size() != 3) {
        throw json::type_error::create(302, "point must be an array of 3 numbers", &j);
    }
    p = {j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

inline void to_json(json& j, const Box& b) { j = {{"min", b.min}, {"max", b.max}}; }
inline void from_json(const json& j, Box& b) {
    j.at("min").get_to(b.min);
    j.at("max").get_to(b.max);
}

inline void to_json(json& j, const Interval& iv) { j = json::array({iv.begin, iv.end}); }
inline void from_json(const json& j, Interval& iv) {
    if (!j.is_array() || j.size() != 2) {
        throw json::type_error::create(302, "interval must be [begin, end]", &j);
    }
    iv = {j[0].get<double>(), j[1].get<double>()};
}

NLOHMANN_JSON_SERIALIZE_ENUM(Agent, {{Agent::Human, "human"}, {Agent::Robot, "robot"}})
NLOHMANN_JSON_SERIALIZE_ENUM(WorkpieceStatus, {{WorkpieceStatus::OnTable, "on_table"},
                                               {WorkpieceStatus::HeldByHuman, "held_by_human"},
                                               {WorkpieceStatus::HeldByRobot, "held_by_robot"},
                                               {WorkpieceStatus::Placed, "placed"}})
NLOHMANN_JSON_SERIALIZE_ENUM(GateState, {{GateState::Clear, "clear"}, {GateState::Hold, "hold"}})
NLOHMANN_JSON_SERIALIZE_ENUM(ScriptAction, {{ScriptAction::PickPlace, "pick_place"}, {ScriptAction::Hover, "hover"}})

template <class T>
json opt_json(const std::optional<T>& v) {
    return v ? json(*v) : json(nullptr);
}

template <class T>
std::optional<T> opt_from(const json& j, const char* key) {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return it->template get<T>();
}

// --- world ------------------------------------------------------------------

inline void to_json(json& j, const TargetSlot& s) {
    j = {{"slot_id", s.slot_id}, {"center", s.center}, {"assigned_workpiece", s.assigned_workpiece}};
}
inline void from_json(const json& j, TargetSlot& s) {
    j.at("slot_id").get_to(s.slot_id);
    j.at("center").get_to(s.center);
    j.at("assigned_workpiece").get_to(s.assigned_workpiece);
}

inline void to_json(json& j, const Workpiece& w) {
    j = {{"id", w.id}, {"pose", w.pose}, {"status", w.status}, {"marker_id", w.marker_id},
         {"placed_slot", opt_json(w.placed_slot)}};
}
inline void from_json(const json& j, Workpiece& w) {
    j.at("id").get_to(w.id);
    j.at("pose").get_to(w.pose);
    j.at("status").get_to(w.status);
    j.at("marker_id").get_to(w.marker_id);
    w.placed_slot = opt_from<int>(j, "placed_slot");
}

inline void to_json(json& j, const AgentState& a) {
    j = {{"kind", a.kind}, {"effector", a.effector}, {"held", opt_json(a.held)}, {"activity", opt_json(a.activity)}};
}
inline void from_json(const json& j, AgentState& a) {
    j.at("kind").get_to(a.kind);
    j.at("effector").get_to(a.effector);
    a.held = opt_from<int>(j, "held");
    a.activity = opt_from<std::string>(j, "activity");
}

inline void to_json(json& j, const WorldState& w) {
    j = {{"time", w.time},
         {"human", w.human},
         {"robot", w.robot},
         {"workpieces", w.workpieces},
         {"slots", w.slots},
         {"bounds", w.bounds},
         {"place_tolerance", w.rules.place_tolerance},
         {"grasp_reach", w.rules.grasp_reach}};
}
inline void from_json(const json& j, WorldState& w) {
    j.at("time").get_to(w.time);
    j.at("human").get_to(w.human);
    j.at("robot").get_to(w.robot);
    j.at("workpieces").get_to(w.workpieces);
    j.at("slots").get_to(w.slots);
    j.at("bounds").get_to(w.bounds);
    j.at("place_tolerance").get_to(w.rules.place_tolerance);
    j.at("grasp_reach").get_to(w.rules.grasp_reach);
}

// --- scenario ---------------------------------------------------------------

inline void to_json(json& j, const ScenarioWorkpiece& w) {
    j = {{"id", w.id}, {"marker_id", w.marker_id}, {"pose", w.pose}};
}
inline void from_json(const json& j, ScenarioWorkpiece& w) {
    j.at("id").get_to(w.id);
    w.marker_id = j.value("marker_id", 100 + w.id);
    j.at("pose").get_to(w.pose);
}

inline void to_json(json& j, const Scenario& s) {
    j = {{"version", kFormatVersion},
         {"name", s.name},
         {"goal", s.goal_description},
         {"bounds", s.bounds},
         {"workpieces", s.workpieces},
         {"slots", s.slots},
         {"reserve_pose", s.reserve_pose},
         {"robot_home", s.robot_home},
         {"human_rest", s.human_rest},
         {"place_tolerance", s.place_tolerance}};
}
inline void from_json(const json& j, Scenario& s) {
    j.at("name").get_to(s.name);
    s.goal_description = j.value("goal", std::string{});
    j.at("bounds").get_to(s.bounds);
    j.at("workpieces").get_to(s.workpieces);
    j.at("slots").get_to(s.slots);
    j.at("reserve_pose").get_to(s.reserve_pose);
    j.at("robot_home").get_to(s.robot_home);
    j.at("human_rest").get_to(s.human_rest);
    s.place_tolerance = j.value("place_tolerance", 0.01);
}

// --- config -----------------------------------------------------------------

inline void to_json(json& j, const SensorConfig& c) {
    j = {{"marker_noise_sigma", c.marker_noise_sigma}, {"marker_dropout_prob", c.marker_dropout_prob},
         {"occlusion_radius", c.occlusion_radius},     {"hand_noise_sigma", c.hand_noise_sigma},
         {"hand_latency_ticks", c.hand_latency_ticks}, {"hand_dropout_prob", c.hand_dropout_prob},
         {"seed", c.seed}};
}
inline void from_json(const json& j, SensorConfig& c) {
    const SensorConfig d;
    c.marker_noise_sigma = j.value("marker_noise_sigma", d.marker_noise_sigma);
    c.marker_dropout_prob = j.value("marker_dropout_prob", d.marker_dropout_prob);
    c.occlusion_radius = j.value("occlusion_radius", d.occlusion_radius);
    c.hand_noise_sigma = j.value("hand_noise_sigma", d.hand_noise_sigma);
    c.hand_latency_ticks = j.value("hand_latency_ticks", d.hand_latency_ticks);
    c.hand_dropout_prob = j.value("hand_dropout_prob", d.hand_dropout_prob);
    c.seed = j.value("seed", d.seed);
}

inline void to_json(json& j, const IntentParams& p) {
    j = {{"beta", p.beta}, {"switch_margin", p.switch_margin}, {"hold_required", p.hold_required}};
}
inline void from_json(const json& j, IntentParams& p) {
    const IntentParams d;
    p.beta = j.value("beta", d.beta);
    p.switch_margin = j.value("switch_margin", d.switch_margin);
    p.hold_required = j.value("hold_required", d.hold_required);
}

inline void to_json(json& j, const SimConfig& c) {
    j = {{"version", kFormatVersion},
         {"dt", c.dt},
         {"robot_speed", c.robot_speed},
         {"human_speed", c.human_speed},
         {"grasp_ticks", c.grasp_ticks},
         {"release_ticks", c.release_ticks},
         {"sensor", c.sensor},
         {"intent", c.intent},
         {"gate", {{"d_pause", c.gate.d_pause}, {"d_resume", c.gate.d_resume}, {"enabled", c.gate_enabled}}},
         {"collision_threshold", c.collision_threshold},
         {"seed", c.seed},
         {"max_sim_time", c.max_sim_time},
         {"intent_radius", c.intent_radius},
         {"planar_intent", c.planar_intent},
         {"human_carry_height", c.human_carry_height},
         {"human_hover_height", c.human_hover_height},
         {"playback_active_speed", c.playback_active_speed},
         {"human_clearance", c.human_clearance},
         {"forced_holds", c.forced_holds}};
}
inline void from_json(const json& j, SimConfig& c) {
    const SimConfig d;
    c.dt = j.value("dt", d.dt);
    c.robot_speed = j.value("robot_speed", d.robot_speed);
    c.human_speed = j.value("human_speed", d.human_speed);
    c.grasp_ticks = j.value("grasp_ticks", d.grasp_ticks);
    c.release_ticks = j.value("release_ticks", d.release_ticks);
    c.sensor = j.value("sensor", d.sensor);
    c.intent = j.value("intent", d.intent);
    if (auto g = j.find("gate"); g != j.end()) {
        c.gate.d_pause = g->value("d_pause", d.gate.d_pause);
        c.gate.d_resume = g->value("d_resume", d.gate.d_resume);
        c.gate_enabled = g->value("enabled", d.gate_enabled);
    }
    c.collision_threshold = j.value("collision_threshold", d.collision_threshold);
    c.seed = j.value("seed", d.seed);
    c.max_sim_time = j.value("max_sim_time", d.max_sim_time);
    c.intent_radius = j.value("intent_radius", d.intent_radius);
    c.planar_intent = j.value("planar_intent", d.planar_intent);
    c.human_carry_height = j.value("human_carry_height", d.human_carry_height);
    c.human_hover_height = j.value("human_hover_height", d.human_hover_height);
    c.playback_active_speed = j.value("playback_active_speed", d.playback_active_speed);
    c.human_clearance = j.value("human_clearance", d.human_clearance);
    c.forced_holds = j.value("forced_holds", d.forced_holds);
}

// --- human models -------------------------------------------------------------

inline void to_json(json& j, const ScriptStep& s) {
    j = {{"workpiece", s.workpiece}, {"delay", s.start_delay}, {"action", s.action}};
}
inline void from_json(const json& j, ScriptStep& s) {
    j.at("workpiece").get_to(s.workpiece);
    s.start_delay = j.value("delay", 0.0);
    s.action = j.value("action", ScriptAction::PickPlace);
}

inline void to_json(json& j, const PlaybackRecord& r) {
    j = {{"t", r.t}};
    switch (r.kind) {
    case PlaybackKind::Hand: j["hand"] = r.position; break;
    case PlaybackKind::Grasp: j["grasp"] = r.workpiece; break;
    case PlaybackKind::Release: j["release"] = opt_json(r.slot); break;
    }
}
inline void from_json(const json& j, PlaybackRecord& r) {
    j.at("t").get_to(r.t);
    if (j.contains("hand")) {
        r.kind = PlaybackKind::Hand;
        j.at("hand").get_to(r.position);
    } else if (j.contains("grasp")) {
        r.kind = PlaybackKind::Grasp;
        j.at("grasp").get_to(r.workpiece);
    } else if (j.contains("release")) {
        r.kind = PlaybackKind::Release;
        r.slot = opt_from<int>(j, "release");
    } else {
        throw json::other_error::create(501, "playback record needs hand, grasp or release", &j);
    }
}

inline void to_json(json& j, const HumanModel& m) {
    std::visit(
        [&j](const auto& h) {
            using T = std::decay_t<decltype(h)>;
            if constexpr (std::is_same_v<T, ScriptedHuman>) {
                j = {{"kind", "scripted"}, {"steps", h.steps}};
            } else if constexpr (std::is_same_v<T, PlaybackHuman>) {
                j = {{"kind", "playback"}, {"records", h.records}};
            } else {
                j = {{"kind", "interactive"}};
            }
        },
        m);
}
inline void from_json(const json& j, HumanModel& m) {
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "scripted") {
        m = ScriptedHuman{j.value("steps", std::vector<ScriptStep>{})};
    } else if (kind == "playback") {
        m = PlaybackHuman{j.at("records").get<std::vector<PlaybackRecord>>()};
    } else if (kind == "interactive") {
        m = InteractiveHuman{};
    } else {
        throw json::other_error::create(501, "unknown human model kind '" + kind + "'", &j);
    }
}

// --- events -------------------------------------------------------------------

inline void to_json(json& j, const SimEvent& e) {
    j = {{"t", e.time}};
    std::visit(
        [&j](const auto& d) {
            using T = std::decay_t<decltype(d)>;
            if constexpr (std::is_same_v<T, ev::AgentActive>) {
                j["kind"] = "AgentActive";
                j["agent"] = d.agent;
                j["start"] = d.start;
                if (d.start) j["label"] = d.label;
            } else if constexpr (std::is_same_v<T, ev::Move>) {
                j["kind"] = "Move";
                j["agent"] = d.agent;
                j["pos"] = d.position;
            } else if constexpr (std::is_same_v<T, ev::Grasp>) {
                j["kind"] = "Grasp";
                j["agent"] = d.agent;
                j["wp"] = d.workpiece;
            } else if constexpr (std::is_same_v<T, ev::Place>) {
                j["kind"] = "Place";
                j["agent"] = d.agent;
                j["wp"] = d.workpiece;
                j["slot"] = d.slot;
            } else if constexpr (std::is_same_v<T, ev::Drop>) {
                j["kind"] = "Drop";
                j["agent"] = d.agent;
                j["wp"] = d.workpiece;
                j["requested_slot"] = opt_json(d.requested_slot);
                j["pos"] = d.position;
            } else if constexpr (std::is_same_v<T, ev::SafetyHold>) {
                j["kind"] = "SafetyHold";
                j["start"] = d.start;
            } else if constexpr (std::is_same_v<T, ev::DistanceSample>) {
                j["kind"] = "DistanceSample";
                j["d"] = d.distance;
            } else if constexpr (std::is_same_v<T, ev::GoalInferred>) {
                j["kind"] = "GoalInferred";
                j["wp"] = opt_json(d.workpiece);
            } else if constexpr (std::is_same_v<T, ev::GoalSelected>) {
                j["kind"] = "GoalSelected";
                j["wp"] = d.workpiece;
                j["slot"] = d.slot;
                j["human_goal"] = opt_json(d.human_goal);
                j["d"] = d.distance;
            } else if constexpr (std::is_same_v<T, ev::PlanOutcome>) {
                j["kind"] = "PlanOutcome";
                j["wp"] = d.workpiece;
                j["label"] = d.label;
            } else if constexpr (std::is_same_v<T, ev::TaskComplete>) {
                j["kind"] = "TaskComplete";
            } else if constexpr (std::is_same_v<T, ev::HumanCommand>) {
                j["kind"] = "HumanCommand";
                j["command"] = d.command;
            } else if constexpr (std::is_same_v<T, ev::CommandRejected>) {
                j["kind"] = "CommandRejected";
                j["command"] = d.command;
                j["reason"] = d.reason;
            } else if constexpr (std::is_same_v<T, ev::StateTrace>) {
                j["kind"] = "StateTrace";
                j["what"] = d.what;
                j["path"] = d.path;
                if (!d.outcome.empty()) j["outcome"] = d.outcome;
            } else if constexpr (std::is_same_v<T, ev::Warning>) {
                j["kind"] = "Warning";
                j["text"] = d.text;
            }
        },
        e.data);
}

inline void from_json(const json& j, SimEvent& e) {
    j.at("t").get_to(e.time);
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "AgentActive") {
        e.data = ev::AgentActive{j.at("agent").get<Agent>(), j.at("start").get<bool>(), j.value("label", std::string{})};
    } else if (kind == "Move") {
        e.data = ev::Move{j.at("agent").get<Agent>(), j.at("pos").get<Point3>()};
    } else if (kind == "Grasp") {
        e.data = ev::Grasp{j.at("agent").get<Agent>(), j.at("wp").get<int>()};
    } else if (kind == "Place") {
        e.data = ev::Place{j.at("agent").get<Agent>(), j.at("wp").get<int>(), j.at("slot").get<int>()};
    } else if (kind == "Drop") {
        e.data = ev::Drop{j.at("agent").get<Agent>(), j.at("wp").get<int>(), opt_from<int>(j, "requested_slot"),
                          j.at("pos").get<Point3>()};
    } else if (kind == "SafetyHold") {
        e.data = ev::SafetyHold{j.at("start").get<bool>()};
    } else if (kind == "DistanceSample") {
        e.data = ev::DistanceSample{j.at("d").get<double>()};
    } else if (kind == "GoalInferred") {
        e.data = ev::GoalInferred{opt_from<int>(j, "wp")};
    } else if (kind == "GoalSelected") {
        e.data = ev::GoalSelected{j.at("wp").get<int>(), j.at("slot").get<int>(), opt_from<int>(j, "human_goal"),
                                  j.at("d").get<double>()};
    } else if (kind == "PlanOutcome") {
        e.data = ev::PlanOutcome{j.at("wp").get<int>(), j.at("label").get<std::string>()};
    } else if (kind == "TaskComplete") {
        e.data = ev::TaskComplete{};
    } else if (kind == "HumanCommand") {
        e.data = ev::HumanCommand{j.at("command").get<std::string>()};
    } else if (kind == "CommandRejected") {
        e.data = ev::CommandRejected{j.at("command").get<std::string>(), j.at("reason").get<std::string>()};
    } else if (kind == "StateTrace") {
        e.data = ev::StateTrace{j.at("what").get<std::string>(), j.at("path").get<std::string>(),
                                j.value("outcome", std::string{})};
    } else if (kind == "Warning") {
        e.data = ev::Warning{j.at("text").get<std::string>()};
    } else {
        throw json::other_error::create(501, "unknown event kind '" + kind + "'", &j);
    }
}

// --- metrics --------------------------------------------------------------------

inline void to_json(json& j, const MetricsReport& r) {
    j = {{"robot_idle_pct", r.robot_idle_pct},
         {"human_idle_pct", r.human_idle_pct},
         {"functional_delay_pct", r.functional_delay_pct},
         {"concurrent_activity_pct", r.concurrent_activity_pct},
         {"collisions", r.collisions},
         {"actions_robot", r.actions_robot},
         {"actions_human", r.actions_human},
         {"completion_time_s", r.completion_time},
         {"complete", r.complete},
         {"grasps_robot", r.grasps_robot},
         {"grasps_human", r.grasps_human},
         {"releases_robot", r.releases_robot},
         {"releases_human", r.releases_human}};
}
inline void from_json(const json& j, MetricsReport& r) {
    j.at("robot_idle_pct").get_to(r.robot_idle_pct);
    j.at("human_idle_pct").get_to(r.human_idle_pct);
    j.at("functional_delay_pct").get_to(r.functional_delay_pct);
    j.at("concurrent_activity_pct").get_to(r.concurrent_activity_pct);
    j.at("collisions").get_to(r.collisions);
    j.at("actions_robot").get_to(r.actions_robot);
    j.at("actions_human").get_to(r.actions_human);
    j.at("completion_time_s").get_to(r.completion_time);
    j.at("complete").get_to(r.complete);
    r.grasps_robot = j.value("grasps_robot", 0);
    r.grasps_human = j.value("grasps_human", 0);
    r.releases_robot = j.value("releases_robot", 0);
    r.releases_human = j.value("releases_human", 0);
}

/// FNV-1a over the canonical JSON text, as 16 hex digits.
inline std::string content_hash(const json& j) {
    std::uint64_t h = 14695981039346656037ull;
    for (unsigned char c : j.dump()) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

} // namespace hrcsim
