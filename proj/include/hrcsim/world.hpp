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

#include "hrcsim/errors.hpp"
#include "hrcsim/geometry.hpp"

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

namespace hrcsim {

enum class Agent { Human, Robot };

enum class WorkpieceStatus { OnTable, HeldByHuman, HeldByRobot, Placed };

inline std::string_view to_string(Agent a) {
    return a == Agent::Human ? "human" : "robot";
}

inline std::string_view to_string(WorkpieceStatus s) {
    switch (s) {
    case WorkpieceStatus::OnTable: return "on_table";
    case WorkpieceStatus::HeldByHuman: return "held_by_human";
    case WorkpieceStatus::HeldByRobot: return "held_by_robot";
    case WorkpieceStatus::Placed: return "placed";
    }
    return "?";
}

inline WorkpieceStatus held_status(Agent a) {
    return a == Agent::Human ? WorkpieceStatus::HeldByHuman : WorkpieceStatus::HeldByRobot;
}

struct Workpiece {
    int id = 0;
    Point3 pose;
    WorkpieceStatus status = WorkpieceStatus::OnTable;
    int marker_id = 0;
    std::optional<int> placed_slot;

    friend bool operator==(const Workpiece&, const Workpiece&) = default;

    bool held() const {
        return status == WorkpieceStatus::HeldByHuman || status == WorkpieceStatus::HeldByRobot;
    }
};

/// Virtual placement marker. Slots only exist in the twin.
struct TargetSlot {
    int slot_id = 0;
    Point3 center;
    int assigned_workpiece = 0;

    friend bool operator==(const TargetSlot&, const TargetSlot&) = default;
};

struct AgentState {
    Agent kind = Agent::Human;
    Point3 effector;
    std::optional<int> held;
    /// Empty while idle, otherwise the label of the current action.
    std::optional<std::string> activity;

    friend bool operator==(const AgentState&, const AgentState&) = default;

    bool idle() const { return !activity.has_value(); }
};

struct WorldRules {
    /// Placement tolerance. A release snaps to its slot center within 5x this radius.
    double place_tolerance = 0.01;
    /// Maximum effector-to-workpiece distance for a grasp.
    double grasp_reach = 0.05;

    friend bool operator==(const WorldRules&, const WorldRules&) = default;

    double snap_radius() const { return 5.0 * place_tolerance; }
};

struct WorldState {
    double time = 0.0;
    AgentState human{Agent::Human, {}, {}, {}};
    AgentState robot{Agent::Robot, {}, {}, {}};
    std::vector<Workpiece> workpieces;
    std::vector<TargetSlot> slots;
    Box bounds;
    WorldRules rules;

    friend bool operator==(const WorldState&, const WorldState&) = default;

    const AgentState& agent(Agent a) const { return a == Agent::Human ? human : robot; }
    AgentState& agent(Agent a) { return a == Agent::Human ? human : robot; }

    const Workpiece* find_workpiece(int id) const {
        auto it = std::find_if(workpieces.begin(), workpieces.end(),
                               [id](const Workpiece& w) { return w.id == id; });
        return it == workpieces.end() ? nullptr : &*it;
    }
    Workpiece* find_workpiece(int id) {
        return const_cast<Workpiece*>(std::as_const(*this).find_workpiece(id));
    }
    const TargetSlot* find_slot(int slot_id) const {
        auto it = std::find_if(slots.begin(), slots.end(),
                               [slot_id](const TargetSlot& s) { return s.slot_id == slot_id; });
        return it == slots.end() ? nullptr : &*it;
    }
    const TargetSlot* slot_for(int workpiece_id) const {
        auto it = std::find_if(slots.begin(), slots.end(), [workpiece_id](const TargetSlot& s) {
            return s.assigned_workpiece == workpiece_id;
        });
        return it == slots.end() ? nullptr : &*it;
    }
    bool slot_occupied(int slot_id) const {
        return std::any_of(workpieces.begin(), workpieces.end(),
                           [slot_id](const Workpiece& w) { return w.placed_slot == slot_id; });
    }
};

// ---------------------------------------------------------------------------
// Events
// ---------------------------------------------------------------------------

/// Advances the clock only.
struct AdvanceTime {
    friend bool operator==(const AdvanceTime&, const AdvanceTime&) = default;
};

struct MoveEffector {
    Agent agent = Agent::Robot;
    Point3 position;
    friend bool operator==(const MoveEffector&, const MoveEffector&) = default;
};

struct Grasp {
    Agent agent = Agent::Robot;
    int workpiece = 0;
    friend bool operator==(const Grasp&, const Grasp&) = default;
};

/// Let go of the held workpiece at the current effector position. With `slot` unset the
/// workpiece's assigned slot is tried.
struct Release {
    Agent agent = Agent::Robot;
    std::optional<int> slot;
    friend bool operator==(const Release&, const Release&) = default;
};

struct SetActivity {
    Agent agent = Agent::Robot;
    std::optional<std::string> activity;
    friend bool operator==(const SetActivity&, const SetActivity&) = default;
};

struct WorldEvent {
    double time = 0.0;
    std::variant<AdvanceTime, MoveEffector, Grasp, Release, SetActivity> payload;
    friend bool operator==(const WorldEvent&, const WorldEvent&) = default;
};

namespace detail {

inline void track_held(WorldState& w, Agent a) {
    const AgentState& ag = w.agent(a);
    if (ag.held) {
        w.find_workpiece(*ag.held)->pose = ag.effector;
    }
}

inline void apply(WorldState&, const AdvanceTime&) {}

inline void apply(WorldState& w, const MoveEffector& e) {
    if (!e.position.finite()) {
        throw IllegalEvent("move: non-finite effector position");
    }
    w.agent(e.agent).effector = e.position;
    track_held(w, e.agent);
}

inline void apply(WorldState& w, const Grasp& e) {
    AgentState& ag = w.agent(e.agent);
    const std::string who{to_string(e.agent)};
    if (ag.held) {
        throw IllegalEvent("grasp: " + who + " already holds workpiece " + std::to_string(*ag.held));
    }
    Workpiece* wp = w.find_workpiece(e.workpiece);
    if (wp == nullptr) {
        throw IllegalEvent("grasp: no workpiece " + std::to_string(e.workpiece));
    }
    if (wp->status != WorkpieceStatus::OnTable) {
        throw IllegalEvent("grasp: workpiece " + std::to_string(e.workpiece) + " is " +
                           std::string(to_string(wp->status)));
    }
    if (distance(ag.effector, wp->pose) > w.rules.grasp_reach) {
        throw IllegalEvent("grasp: workpiece " + std::to_string(e.workpiece) + " out of reach of " +
                           who);
    }
    wp->status = held_status(e.agent);
    ag.held = wp->id;
    wp->pose = ag.effector;
}

inline void apply(WorldState& w, const Release& e) {
    AgentState& ag = w.agent(e.agent);
    if (!ag.held) {
        throw IllegalEvent("release: " + std::string(to_string(e.agent)) + " holds nothing");
    }
    Workpiece& wp = *w.find_workpiece(*ag.held);
    const TargetSlot* slot = e.slot ? w.find_slot(*e.slot) : w.slot_for(wp.id);
    if (e.slot && slot == nullptr) {
        throw IllegalEvent("release: no slot " + std::to_string(*e.slot));
    }
    const bool snaps = slot != nullptr && slot->assigned_workpiece == wp.id &&
                       !w.slot_occupied(slot->slot_id) &&
                       planar_distance(ag.effector, slot->center) <= w.rules.snap_radius();
    if (snaps) {
        wp.pose = slot->center;
        wp.status = WorkpieceStatus::Placed;
        wp.placed_slot = slot->slot_id;
    } else {
        const Point3 rest{ag.effector.x, ag.effector.y, w.bounds.min.z};
        if (!w.bounds.contains(rest)) {
            throw IllegalEvent("release: position outside workspace");
        }
        wp.pose = rest;
        wp.status = WorkpieceStatus::OnTable;
        wp.placed_slot.reset();
    }
    ag.held.reset();
}

inline void apply(WorldState& w, const SetActivity& e) {
    w.agent(e.agent).activity = e.activity;
}

} // namespace detail

/// In-place variant of apply_event. Leaves `world` untouched when it throws.
inline void apply_event_inplace(WorldState& world, const WorldEvent& event) {
    if (event.time < world.time) {
        throw StaleEvent("event at t=" + std::to_string(event.time) + " precedes world time " +
                         std::to_string(world.time));
    }
    WorldState next = world;
    std::visit([&next](const auto& e) { detail::apply(next, e); }, event.payload);
    next.time = event.time;
    world = std::move(next);
}

/// Returns the world after `event`. Throws IllegalEvent or StaleEvent.
inline WorldState apply_event(WorldState world, const WorldEvent& event) {
    apply_event_inplace(world, event);
    return world;
}

inline double min_human_robot_distance(const WorldState& world) {
    return distance(world.human.effector, world.robot.effector);
}

struct TaskProgress {
    int placed_count = 0;
    std::set<int> unplaced_ids;
    bool complete = false;

    friend bool operator==(const TaskProgress&, const TaskProgress&) = default;
};

inline TaskProgress task_progress(const WorldState& world) {
    TaskProgress p;
    for (const Workpiece& w : world.workpieces) {
        const TargetSlot* slot = world.slot_for(w.id);
        const bool in_place = w.status == WorkpieceStatus::Placed && slot != nullptr &&
                              w.placed_slot == slot->slot_id;
        if (in_place) {
            ++p.placed_count;
        } else {
            p.unplaced_ids.insert(w.id);
        }
    }
    p.complete = p.unplaced_ids.empty();
    return p;
}

/// Checks the structural invariants of a world. Returns a description of the first violation.
inline std::optional<std::string> check_invariants(const WorldState& world) {
    std::set<int> ids;
    std::set<int> markers;
    int held_by_human = 0;
    int held_by_robot = 0;
    for (const Workpiece& w : world.workpieces) {
        if (!ids.insert(w.id).second) {
            return "duplicate workpiece id " + std::to_string(w.id);
        }
        if (!markers.insert(w.marker_id).second) {
            return "duplicate marker id " + std::to_string(w.marker_id);
        }
        if (!w.pose.finite()) {
            return "non-finite pose for workpiece " + std::to_string(w.id);
        }
        held_by_human += w.status == WorkpieceStatus::HeldByHuman;
        held_by_robot += w.status == WorkpieceStatus::HeldByRobot;
        if (!w.held() && !world.bounds.contains(w.pose)) {
            return "workpiece " + std::to_string(w.id) + " outside bounds";
        }
        if (w.status == WorkpieceStatus::Placed) {
            const TargetSlot* s = w.placed_slot ? world.find_slot(*w.placed_slot) : nullptr;
            if (s == nullptr || distance(s->center, w.pose) > world.rules.place_tolerance) {
                return "placed workpiece " + std::to_string(w.id) + " not on a slot center";
            }
        }
        for (Agent a : {Agent::Human, Agent::Robot}) {
            const bool holds = world.agent(a).held == w.id;
            if (holds != (w.status == held_status(a))) {
                return "holder mismatch for workpiece " + std::to_string(w.id);
            }
            if (holds && !(w.pose == world.agent(a).effector)) {
                return "held workpiece " + std::to_string(w.id) + " not at holder effector";
            }
        }
    }
    if (held_by_human > 1 || held_by_robot > 1) {
        return "an agent holds more than one workpiece";
    }
    std::set<int> slot_ids;
    std::set<int> assigned;
    for (const TargetSlot& s : world.slots) {
        if (!slot_ids.insert(s.slot_id).second) {
            return "duplicate slot id " + std::to_string(s.slot_id);
        }
        if (!assigned.insert(s.assigned_workpiece).second) {
            return "slot " + std::to_string(s.slot_id) + " shares its workpiece with another slot";
        }
    }
    if (assigned != ids) {
        return "slots are not a bijection onto workpieces";
    }
    return std::nullopt;
}

} // namespace hrcsim
