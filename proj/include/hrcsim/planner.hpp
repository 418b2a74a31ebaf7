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
#include "hrcsim/intent.hpp"
#include "hrcsim/perception.hpp"

#include <optional>
#include <vector>

namespace hrcsim {

struct GoalSelection {
    int workpiece_id = 0;
    int target_slot_id = 0;
    double selected_at = 0.0;
    double distance_to_ee = 0.0;

    friend bool operator==(const GoalSelection&, const GoalSelection&) = default;
};

/// Workpieces either agent may pick next: on the table with their slot still free.
inline std::vector<GoalCandidate> manipulable_workpieces(const EstimatedWorld& est) {
    std::vector<GoalCandidate> out;
    for (const EstimatedWorkpiece& w : est.workpieces) {
        if (w.status != WorkpieceStatus::OnTable) continue;
        const TargetSlot* slot = est.slot_for(w.id);
        if (slot == nullptr || est.slot_occupied(slot->slot_id)) continue;
        out.push_back({w.id, w.pose});
    }
    return out;
}

/// Drops the inferred human goal from the manipulable set and takes the workpiece nearest the
/// end effector. Ties go to the lowest id.
inline std::optional<GoalSelection> select_robot_goal(const EstimatedWorld& est,
                                                      std::optional<int> human_goal) {
    std::optional<GoalSelection> best;
    for (const GoalCandidate& c : manipulable_workpieces(est)) {
        if (c.workpiece_id == human_goal) continue;
        const double d = distance(est.robot_effector, c.pose);
        const bool better = !best || d < best->distance_to_ee ||
                            (d == best->distance_to_ee && c.workpiece_id < best->workpiece_id);
        if (better) {
            best = GoalSelection{c.workpiece_id, est.slot_for(c.workpiece_id)->slot_id, est.time, d};
        }
    }
    return best;
}

enum class GateState { Clear, Hold };

/// Distance hysteresis: pause below d_pause, resume above d_resume.
struct SafetyGate {
    double d_pause = 0.20;
    double d_resume = 0.30;
    GateState state = GateState::Clear;

    friend bool operator==(const SafetyGate&, const SafetyGate&) = default;

    bool hold() const { return state == GateState::Hold; }

    void validate() const {
        if (!(d_pause > 0.0 && d_pause < d_resume)) {
            throw ValidationError("gate", "require 0 < d_pause < d_resume");
        }
    }
};

inline SafetyGate update_safety(SafetyGate gate, double min_distance) {
    if (gate.state == GateState::Clear && min_distance < gate.d_pause) {
        gate.state = GateState::Hold;
    } else if (gate.state == GateState::Hold && min_distance > gate.d_resume) {
        gate.state = GateState::Clear;
    }
    return gate;
}

} // namespace hrcsim
