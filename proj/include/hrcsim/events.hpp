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

#include "hrcsim/geometry.hpp"
#include "hrcsim/world.hpp"

#include <optional>
#include <string>
#include <variant>

namespace hrcsim {

/// Simulation log records. World-changing records (Move, Grasp, Place, Drop, AgentActive) carry
/// enough to re-apply them to a twin during replay.
namespace ev {

struct AgentActive {
    Agent agent = Agent::Human;
    bool start = true;
    std::string label; // set on start
    friend bool operator==(const AgentActive&, const AgentActive&) = default;
};

struct Move {
    Agent agent = Agent::Human;
    Point3 position;
    friend bool operator==(const Move&, const Move&) = default;
};

struct Grasp {
    Agent agent = Agent::Human;
    int workpiece = 0;
    friend bool operator==(const Grasp&, const Grasp&) = default;
};

/// Release that snapped into the workpiece's slot.
struct Place {
    Agent agent = Agent::Human;
    int workpiece = 0;
    int slot = 0;
    friend bool operator==(const Place&, const Place&) = default;
};

/// Release that left the workpiece on the table.
struct Drop {
    Agent agent = Agent::Human;
    int workpiece = 0;
    std::optional<int> requested_slot;
    Point3 position;
    friend bool operator==(const Drop&, const Drop&) = default;
};

struct SafetyHold {
    bool start = true;
    friend bool operator==(const SafetyHold&, const SafetyHold&) = default;
};

/// Ground-truth human-robot distance, one per tick.
struct DistanceSample {
    double distance = 0.0;
    friend bool operator==(const DistanceSample&, const DistanceSample&) = default;
};

struct GoalInferred {
    std::optional<int> workpiece;
    friend bool operator==(const GoalInferred&, const GoalInferred&) = default;
};

/// Emitted on the BLOCK-CHOICE tick; records the human goal that was excluded.
struct GoalSelected {
    int workpiece = 0;
    int slot = 0;
    std::optional<int> human_goal;
    double distance = 0.0;
    friend bool operator==(const GoalSelected&, const GoalSelected&) = default;
};

struct PlanOutcome {
    int workpiece = 0;
    std::string label;
    friend bool operator==(const PlanOutcome&, const PlanOutcome&) = default;
};

struct TaskComplete {
    friend bool operator==(const TaskComplete&, const TaskComplete&) = default;
};

struct HumanCommand {
    std::string command;
    friend bool operator==(const HumanCommand&, const HumanCommand&) = default;
};

struct CommandRejected {
    std::string command;
    std::string reason;
    friend bool operator==(const CommandRejected&, const CommandRejected&) = default;
};

struct StateTrace {
    std::string what; // entered / resumed / exited / preempted
    std::string path;
    std::string outcome;
    friend bool operator==(const StateTrace&, const StateTrace&) = default;
};

struct Warning {
    std::string text;
    friend bool operator==(const Warning&, const Warning&) = default;
};

} // namespace ev

using EventData = std::variant<ev::AgentActive, ev::Move, ev::Grasp, ev::Place, ev::Drop, ev::SafetyHold,
                               ev::DistanceSample, ev::GoalInferred, ev::GoalSelected, ev::PlanOutcome,
                               ev::TaskComplete, ev::HumanCommand, ev::CommandRejected, ev::StateTrace,
                               ev::Warning>;

struct SimEvent {
    double time = 0.0;
    EventData data;

    friend bool operator==(const SimEvent&, const SimEvent&) = default;

    template <class T>
    const T* as() const {
        return std::get_if<T>(&data);
    }
};

} // namespace hrcsim
