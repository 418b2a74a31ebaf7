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
#include "hrcsim/world.hpp"

#include <set>
#include <utility>
#include <string>
#include <vector>

namespace hrcsim {

struct ScenarioWorkpiece {
    int id = 0;
    int marker_id = 0;
    Point3 pose;
    friend bool operator==(const ScenarioWorkpiece&, const ScenarioWorkpiece&) = default;
};

struct Scenario {
    std::string name;
    std::string goal_description;
    Box bounds;
    std::vector<ScenarioWorkpiece> workpieces;
    std::vector<TargetSlot> slots;
    Point3 reserve_pose;
    Point3 robot_home;
    Point3 human_rest;
    double place_tolerance = 0.01;

    friend bool operator==(const Scenario&, const Scenario&) = default;

    /// Throws ValidationError naming the offending field.
    void validate() const {
        auto field = [](const char* list, std::size_t i, const char* f) {
            return std::string(list) + "[" + std::to_string(i) + "]." + f;
        };
        auto coords = [](const Point3& p) {
            return "(" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " + std::to_string(p.z) + ")";
        };
        if (!(place_tolerance > 0.0)) {
            throw ValidationError("place_tolerance", "must be > 0");
        }
        if (!(bounds.min.x < bounds.max.x && bounds.min.y < bounds.max.y && bounds.min.z <= bounds.max.z)) {
            throw ValidationError("bounds", "min must be below max");
        }
        for (const auto& [name, p] : {std::pair{"reserve_pose", reserve_pose}, std::pair{"robot_home", robot_home},
                                      std::pair{"human_rest", human_rest}}) {
            if (!p.finite()) throw ValidationError(name, "non-finite coordinates");
        }
        std::set<int> ids;
        std::set<int> markers;
        for (std::size_t i = 0; i < workpieces.size(); ++i) {
            const ScenarioWorkpiece& w = workpieces[i];
            if (!ids.insert(w.id).second) {
                throw ValidationError(field("workpieces", i, "id"), "duplicate workpiece id " + std::to_string(w.id));
            }
            if (!markers.insert(w.marker_id).second) {
                throw ValidationError(field("workpieces", i, "marker_id"),
                                      "duplicate marker id " + std::to_string(w.marker_id));
            }
            if (!w.pose.finite() || !bounds.contains(w.pose)) {
                throw ValidationError(field("workpieces", i, "pose"),
                                      "workpiece " + std::to_string(w.id) + " at " + coords(w.pose) +
                                          " is outside the workspace bounds");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (distance(w.pose, workpieces[j].pose) <= 2.0 * place_tolerance) {
                    throw ValidationError(field("workpieces", i, "pose"),
                                          "workpieces " + std::to_string(workpieces[j].id) + " and " +
                                              std::to_string(w.id) + " overlap");
                }
            }
        }
        std::set<int> slot_ids;
        std::set<int> assigned;
        for (std::size_t i = 0; i < slots.size(); ++i) {
            const TargetSlot& s = slots[i];
            if (!slot_ids.insert(s.slot_id).second) {
                throw ValidationError(field("slots", i, "slot_id"), "duplicate slot id " + std::to_string(s.slot_id));
            }
            if (!ids.count(s.assigned_workpiece)) {
                throw ValidationError(field("slots", i, "assigned_workpiece"),
                                      "slot " + std::to_string(s.slot_id) + " names unknown workpiece " +
                                          std::to_string(s.assigned_workpiece));
            }
            if (!assigned.insert(s.assigned_workpiece).second) {
                throw ValidationError(field("slots", i, "assigned_workpiece"),
                                      "slot " + std::to_string(s.slot_id) + " is assigned workpiece " +
                                          std::to_string(s.assigned_workpiece) + ", which another slot already has");
            }
            if (!s.center.finite() || !bounds.contains(s.center)) {
                throw ValidationError(field("slots", i, "center"),
                                      "slot " + std::to_string(s.slot_id) + " at " + coords(s.center) +
                                          " is outside the workspace bounds");
            }
            for (std::size_t j = 0; j < i; ++j) {
                if (slots[j].center == s.center) {
                    throw ValidationError(field("slots", i, "center"),
                                          "slot " + std::to_string(s.slot_id) + " coincides with slot " +
                                              std::to_string(slots[j].slot_id));
                }
            }
        }
        if (assigned.size() != ids.size()) {
            throw ValidationError("slots", "every workpiece needs exactly one slot");
        }
    }
};

inline WorldState initial_world(const Scenario& s) {
    WorldState w;
    w.time = 0.0;
    w.bounds = s.bounds;
    w.rules.place_tolerance = s.place_tolerance;
    w.human.effector = s.human_rest;
    w.robot.effector = s.robot_home;
    for (const ScenarioWorkpiece& sw : s.workpieces) {
        w.workpieces.push_back({sw.id, sw.pose, WorkpieceStatus::OnTable, sw.marker_id, std::nullopt});
    }
    w.slots = s.slots;
    return w;
}

/// Nine workpieces in a 3x3 grid on the left half of a 1.2 x 0.8 m table, to be moved into the
/// same arrangement on the right half.
inline Scenario nine_block_mirror() {
    Scenario s;
    s.name = "nine_block_mirror";
    s.goal_description = "move the 3x3 pattern from the left half of the table to the right half, "
                         "keeping the arrangement";
    s.bounds = {{-0.6, -0.4, 0.0}, {0.6, 0.4, 0.4}};
    const double xs[] = {-0.5, -0.3, -0.1};
    const double slot_xs[] = {0.1, 0.3, 0.5};
    const double ys[] = {0.2, 0.0, -0.2};
    for (int row = 0; row < 3; ++row) {
        for (int col = 0; col < 3; ++col) {
            const int id = row * 3 + col + 1;
            s.workpieces.push_back({id, 100 + id, {xs[col], ys[row], 0.0}});
            s.slots.push_back({id, {slot_xs[col], ys[row], 0.0}, id});
        }
    }
    s.reserve_pose = {0.0, 0.25, 0.30};
    s.robot_home = {0.0, 0.35, 0.30};
    s.human_rest = {0.0, -0.60, 0.15};
    s.place_tolerance = 0.01;
    return s;
}

} // namespace hrcsim
