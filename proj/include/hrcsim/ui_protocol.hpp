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

/**
 * Browser protocol: JSON text frames, each carrying "v" (protocol version) and "type".
 *
 * Server to client: snapshot, event, metrics, error.
 * Client to server: hand_move, grasp, release, pause, resume, reset.
 *
 * Unknown fields are ignored; an unknown type, a missing field or another version is a
 * DecodeError. Session holds the simulation behind one connection and does not know about sockets.
 */

#include "hrcsim/errors.hpp"
#include "hrcsim/kernel.hpp"
#include "hrcsim/serialization.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hrcsim::ui {

inline constexpr int kProtocolVersion = 1;

struct AgentView {
    Point3 position;
    std::optional<int> held;
    bool active = false;
    friend bool operator==(const AgentView&, const AgentView&) = default;
};

struct Snapshot {
    std::uint64_t tick = 0;
    double time = 0.0;
    std::vector<Workpiece> workpieces;
    std::vector<TargetSlot> slots;
    AgentView human;
    AgentView robot;
    std::optional<int> human_goal;
    std::optional<int> robot_goal;
    GateState gate = GateState::Clear;
    std::vector<std::string> plan_path;
    bool complete = false;
    friend bool operator==(const Snapshot&, const Snapshot&) = default;
};

struct EventMsg {
    SimEvent event;
    friend bool operator==(const EventMsg&, const EventMsg&) = default;
};

struct MetricsMsg {
    MetricsReport metrics;
    friend bool operator==(const MetricsMsg&, const MetricsMsg&) = default;
};

struct ErrorMsg {
    std::string code;
    std::string text;
    friend bool operator==(const ErrorMsg&, const ErrorMsg&) = default;
};

using ServerMsg = std::variant<Snapshot, EventMsg, MetricsMsg, ErrorMsg>;

namespace client {
struct HandMove {
    Point3 target;
    friend bool operator==(const HandMove&, const HandMove&) = default;
};
struct Grasp {
    int workpiece = 0;
    friend bool operator==(const Grasp&, const Grasp&) = default;
};
struct Release {
    std::optional<int> slot;
    std::optional<Point3> pose;
    friend bool operator==(const Release&, const Release&) = default;
};
struct Pause {
    friend bool operator==(const Pause&, const Pause&) = default;
};
struct Resume {
    friend bool operator==(const Resume&, const Resume&) = default;
};
struct Reset {
    friend bool operator==(const Reset&, const Reset&) = default;
};
} // namespace client

using ClientMsg = std::variant<client::HandMove, client::Grasp, client::Release, client::Pause, client::Resume,
                               client::Reset>;

// --- codec ---------------------------------------------------------------------------

namespace detail {

inline json envelope(const char* type) { return {{"v", kProtocolVersion}, {"type", type}}; }

/// Checks the version and returns the type tag.
inline std::string open_envelope(const json& j) {
    if (!j.is_object()) throw DecodeError("message is not a JSON object");
    const auto v = j.find("v");
    if (v == j.end()) throw DecodeError("missing field 'v'");
    if (!v->is_number_integer() || v->get<int>() != kProtocolVersion) {
        throw DecodeError("unsupported protocol version " + v->dump());
    }
    const auto t = j.find("type");
    if (t == j.end()) throw DecodeError("missing field 'type'");
    if (!t->is_string()) throw DecodeError("field 'type' must be a string");
    return t->get<std::string>();
}

template <class T>
T field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end()) throw DecodeError(std::string("missing field '") + name + "'");
    try {
        return it->get<T>();
    } catch (const json::exception&) {
        throw DecodeError(std::string("bad value for field '") + name + "'");
    }
}

template <class T>
std::optional<T> optional_field(const json& j, const char* name) {
    const auto it = j.find(name);
    if (it == j.end() || it->is_null()) return std::nullopt;
    return field<T>(j, name);
}

inline json parse(const std::string& text) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw DecodeError(std::string("not JSON: ") + e.what());
    }
}

inline json agent_json(const AgentView& a) {
    return {{"pos", a.position}, {"held", opt_json(a.held)}, {"active", a.active}};
}
inline AgentView agent_from(const json& j) {
    return {field<Point3>(j, "pos"), optional_field<int>(j, "held"), j.value("active", false)};
}

} // namespace detail

inline std::string encode(const ServerMsg& msg) {
    json j;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, Snapshot>) {
                j = detail::envelope("snapshot");
                j["tick"] = m.tick;
                j["t"] = m.time;
                j["workpieces"] = m.workpieces;
                j["slots"] = m.slots;
                j["human"] = detail::agent_json(m.human);
                j["robot"] = detail::agent_json(m.robot);
                j["human_goal"] = opt_json(m.human_goal);
                j["robot_goal"] = opt_json(m.robot_goal);
                j["gate"] = m.gate;
                j["plan"] = m.plan_path;
                j["complete"] = m.complete;
            } else if constexpr (std::is_same_v<T, EventMsg>) {
                j = detail::envelope("event");
                j["event"] = m.event;
            } else if constexpr (std::is_same_v<T, MetricsMsg>) {
                j = detail::envelope("metrics");
                j["metrics"] = m.metrics;
            } else {
                j = detail::envelope("error");
                j["code"] = m.code;
                j["text"] = m.text;
            }
        },
        msg);
    return j.dump();
}

inline ServerMsg decode_server(const std::string& text) {
    const json j = detail::parse(text);
    const std::string type = detail::open_envelope(j);
    try {
        if (type == "snapshot") {
            Snapshot s;
            s.tick = detail::field<std::uint64_t>(j, "tick");
            s.time = detail::field<double>(j, "t");
            s.workpieces = detail::field<std::vector<Workpiece>>(j, "workpieces");
            s.slots = j.value("slots", std::vector<TargetSlot>{});
            s.human = detail::agent_from(detail::field<json>(j, "human"));
            s.robot = detail::agent_from(detail::field<json>(j, "robot"));
            s.human_goal = detail::optional_field<int>(j, "human_goal");
            s.robot_goal = detail::optional_field<int>(j, "robot_goal");
            s.gate = detail::field<GateState>(j, "gate");
            s.plan_path = j.value("plan", std::vector<std::string>{});
            s.complete = j.value("complete", false);
            return s;
        }
        if (type == "event") return EventMsg{detail::field<SimEvent>(j, "event")};
        if (type == "metrics") return MetricsMsg{detail::field<MetricsReport>(j, "metrics")};
        if (type == "error") return ErrorMsg{detail::field<std::string>(j, "code"), j.value("text", std::string{})};
    } catch (const json::exception& e) {
        throw DecodeError(type + ": " + e.what());
    }
    throw DecodeError("unknown message type '" + type + "'");
}

inline std::string encode(const ClientMsg& msg) {
    json j;
    std::visit(
        [&j](const auto& m) {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, client::HandMove>) {
                j = detail::envelope("hand_move");
                j["target"] = m.target;
            } else if constexpr (std::is_same_v<T, client::Grasp>) {
                j = detail::envelope("grasp");
                j["workpiece"] = m.workpiece;
            } else if constexpr (std::is_same_v<T, client::Release>) {
                j = detail::envelope("release");
                if (m.slot) j["slot"] = *m.slot;
                if (m.pose) j["pose"] = *m.pose;
            } else if constexpr (std::is_same_v<T, client::Pause>) {
                j = detail::envelope("pause");
            } else if constexpr (std::is_same_v<T, client::Resume>) {
                j = detail::envelope("resume");
            } else {
                j = detail::envelope("reset");
            }
        },
        msg);
    return j.dump();
}

inline ClientMsg decode_client(const std::string& text) {
    const json j = detail::parse(text);
    const std::string type = detail::open_envelope(j);
    if (type == "hand_move") return client::HandMove{detail::field<Point3>(j, "target")};
    if (type == "grasp") return client::Grasp{detail::field<int>(j, "workpiece")};
    if (type == "release") {
        client::Release r{detail::optional_field<int>(j, "slot"), detail::optional_field<Point3>(j, "pose")};
        if (!r.slot && !r.pose) throw DecodeError("release needs field 'slot' or 'pose'");
        return r;
    }
    if (type == "pause") return client::Pause{};
    if (type == "resume") return client::Resume{};
    if (type == "reset") return client::Reset{};
    throw DecodeError("unknown message type '" + type + "'");
}

// --- session ---------------------------------------------------------------------------

/// One interactive simulation. Messages from the client are queued for the next tick; replies
/// that do not need a tick (errors, pause acknowledgements) are returned immediately.
class Session {
  public:
    Session(Scenario scenario, SimConfig config, int snapshot_every = 2)
        : scenario_(std::move(scenario)), config_(std::move(config)), snapshot_every_(snapshot_every) {
        if (snapshot_every_ < 1) throw ValidationError("snapshot_every", "must be >= 1");
        reset();
    }

    std::vector<ServerMsg> on_message(const ClientMsg& msg) {
        std::vector<ServerMsg> out;
        std::visit(
            [&](const auto& m) {
                using T = std::decay_t<decltype(m)>;
                if constexpr (std::is_same_v<T, client::HandMove>) {
                    sim_->commands().push(cmd::HandMove{m.target});
                } else if constexpr (std::is_same_v<T, client::Grasp>) {
                    if (sim_->world().find_workpiece(m.workpiece) == nullptr) {
                        out.push_back(ErrorMsg{"unknown_workpiece", "no workpiece " + std::to_string(m.workpiece)});
                    } else {
                        sim_->commands().push(cmd::Grasp{m.workpiece});
                    }
                } else if constexpr (std::is_same_v<T, client::Release>) {
                    if (m.slot && sim_->world().find_slot(*m.slot) == nullptr) {
                        out.push_back(ErrorMsg{"unknown_slot", "no slot " + std::to_string(*m.slot)});
                    } else {
                        sim_->commands().push(cmd::Release{m.slot, m.pose});
                    }
                } else if constexpr (std::is_same_v<T, client::Pause>) {
                    paused_ = true;
                } else if constexpr (std::is_same_v<T, client::Resume>) {
                    paused_ = false;
                } else {
                    reset();
                    out.push_back(snapshot());
                }
            },
            msg);
        return out;
    }

    /// Advances one tick unless paused or finished.
    std::vector<ServerMsg> tick() {
        std::vector<ServerMsg> out;
        if (paused_ || sim_->finished()) return out;
        for (SimEvent& e : sim_->step()) {
            if (e.as<ev::DistanceSample>()) continue;
            if (const auto* r = e.as<ev::CommandRejected>()) {
                out.push_back(ErrorMsg{"command_rejected", r->command + ": " + r->reason});
            }
            out.push_back(EventMsg{std::move(e)});
        }
        if (sim_->finished()) {
            out.push_back(snapshot());
            out.push_back(MetricsMsg{compute_metrics(sim_->log(), config_.collision_threshold)});
        } else if (sim_->tick() % static_cast<std::uint64_t>(snapshot_every_) == 0) {
            out.push_back(snapshot());
        }
        return out;
    }

    void disconnect() { paused_ = true; }
    void resume() { paused_ = false; }
    bool paused() const { return paused_; }

    Snapshot snapshot() const {
        Snapshot s;
        s.tick = sim_->tick();
        s.time = sim_->time();
        s.workpieces = sim_->world().workpieces;
        s.slots = sim_->world().slots;
        const WorldState& w = sim_->world();
        s.human = {w.human.effector, w.human.held, !w.human.idle()};
        s.robot = {w.robot.effector, w.robot.held, !w.robot.idle()};
        s.human_goal = sim_->intent().current_goal;
        if (sim_->robot_goal()) s.robot_goal = sim_->robot_goal()->workpiece_id;
        s.gate = sim_->gate_state();
        s.plan_path = sim_->plan_status().active_path;
        s.complete = sim_->complete();
        return s;
    }

    const Simulation& simulation() const { return *sim_; }

  private:
    void reset() { sim_ = std::make_unique<Simulation>(scenario_, config_, InteractiveHuman{}); }

    Scenario scenario_;
    SimConfig config_;
    int snapshot_every_;
    std::unique_ptr<Simulation> sim_;
    bool paused_ = false;
};

} // namespace hrcsim::ui
