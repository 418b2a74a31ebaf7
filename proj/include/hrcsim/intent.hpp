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
#include <cmath>
#include <optional>
#include <span>
#include <vector>

namespace hrcsim {

/// A workpiece the human could be reaching for.
struct GoalCandidate {
    int workpiece_id = 0;
    Point3 pose;
};

struct GoalEntry {
    int workpiece_id = 0;
    double distance = 0.0;
    double probability = 0.0;

    friend bool operator==(const GoalEntry&, const GoalEntry&) = default;
};

/// Entries sorted by descending probability (ties: ascending distance, then id).
struct GoalDistribution {
    std::vector<GoalEntry> entries;

    friend bool operator==(const GoalDistribution&, const GoalDistribution&) = default;

    bool empty() const { return entries.empty(); }
    const GoalEntry& top() const { return entries.front(); }
};

/// Softmax over negative hand-to-workpiece distance:
///   p_i = exp(-beta d_i) / sum_j exp(-beta d_j)
/// evaluated with the nearest candidate's term factored out.
inline GoalDistribution goal_distribution(const Point3& hand, std::span<const GoalCandidate> candidates,
                                          double beta) {
    GoalDistribution dist;
    if (candidates.empty()) {
        return dist;
    }
    dist.entries.reserve(candidates.size());
    double d_min = INFINITY;
    for (const GoalCandidate& c : candidates) {
        const double d = distance(hand, c.pose);
        dist.entries.push_back({c.workpiece_id, d, 0.0});
        d_min = std::min(d_min, d);
    }
    double z = 0.0;
    for (GoalEntry& e : dist.entries) {
        e.probability = std::exp(-beta * (e.distance - d_min));
        z += e.probability;
    }
    for (GoalEntry& e : dist.entries) {
        e.probability /= z;
    }
    std::sort(dist.entries.begin(), dist.entries.end(), [](const GoalEntry& a, const GoalEntry& b) {
        if (a.probability != b.probability) return a.probability > b.probability;
        if (a.distance != b.distance) return a.distance < b.distance;
        return a.workpiece_id < b.workpiece_id;
    });
    return dist;
}

struct IntentParams {
    double beta = 25.0;          // 1/m
    double switch_margin = 0.1;  // required lead of the argmax over the runner-up
    int hold_required = 3;       // consecutive updates

    friend bool operator==(const IntentParams&, const IntentParams&) = default;

    void validate() const {
        if (!(beta > 0.0)) throw ValidationError("intent.beta", "must be > 0");
        if (switch_margin < 0.0) throw ValidationError("intent.switch_margin", "must be >= 0");
        if (hold_required < 1) throw ValidationError("intent.hold_required", "must be >= 1");
    }
};

/// Debounced human goal.
struct IntentState {
    std::optional<int> current_goal;
    std::optional<int> candidate;
    int candidate_hold_ticks = 0;
    IntentParams params;

    friend bool operator==(const IntentState&, const IntentState&) = default;
};

inline IntentState update_intent(IntentState state, const GoalDistribution& dist) {
    if (dist.empty()) {
        state.current_goal.reset();
        state.candidate.reset();
        state.candidate_hold_ticks = 0;
        return state;
    }
    const GoalEntry& top = dist.top();
    const double runner_up = dist.entries.size() > 1 ? dist.entries[1].probability : 0.0;
    const bool decisive = top.probability - runner_up > state.params.switch_margin;

    if (!decisive || state.current_goal == top.workpiece_id) {
        state.candidate.reset();
        state.candidate_hold_ticks = 0;
        return state;
    }
    if (state.candidate == top.workpiece_id) {
        ++state.candidate_hold_ticks;
    } else {
        state.candidate = top.workpiece_id;
        state.candidate_hold_ticks = 1;
    }
    if (state.candidate_hold_ticks >= state.params.hold_required) {
        state.current_goal = top.workpiece_id;
        state.candidate.reset();
        state.candidate_hold_ticks = 0;
    }
    return state;
}

} // namespace hrcsim
