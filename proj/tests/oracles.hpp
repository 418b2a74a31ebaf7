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

// Independent reference implementations used to check the library. They work tick by tick
// or by exhaustive search and share no code with what they check.

#include "hrcsim/hrcsim.hpp"

#include <cmath>
#include <limits>
#include <vector>

namespace hrcsim::proptest {

struct BruteMetrics {
    double robot_idle_pct = 0.0;
    double human_idle_pct = 0.0;
    double functional_delay_pct = 0.0;
    double concurrent_activity_pct = 0.0;
    int collisions = 0;
};

/// Samples activity once per tick on a log whose events all lie on multiples of dt.
inline BruteMetrics brute_force_metrics(const std::vector<SimEvent>& log, double dt, double d_c) {
    double horizon = 0.0;
    for (const SimEvent& e : log) {
        horizon = std::max(horizon, e.time);
        if (e.as<ev::TaskComplete>()) {
            horizon = e.time;
            break;
        }
    }
    const int ticks = static_cast<int>(std::lround(horizon / dt));

    // State after all events at tick k, for k = 0..ticks.
    std::vector<bool> robot(static_cast<std::size_t>(ticks) + 1, false);
    std::vector<bool> human(robot.size(), false);
    bool r = false;
    bool h = false;
    std::size_t i = 0;
    for (int k = 0; k <= ticks; ++k) {
        while (i < log.size() && std::lround(log[i].time / dt) <= k) {
            if (const auto* a = log[i].as<ev::AgentActive>()) {
                (a->agent == Agent::Robot ? r : h) = a->start;
            }
            ++i;
        }
        robot[static_cast<std::size_t>(k)] = r;
        human[static_cast<std::size_t>(k)] = h;
    }

    BruteMetrics m;
    if (ticks == 0) {
        m.robot_idle_pct = m.human_idle_pct = 100.0;
    } else {
        int robot_busy = 0;
        int human_busy = 0;
        int both = 0;
        int delay = 0;
        for (int k = 0; k < ticks; ++k) {
            const auto K = static_cast<std::size_t>(k);
            robot_busy += robot[K];
            human_busy += human[K];
            both += robot[K] && human[K];
            if (robot[K] || human[K]) continue;
            // Find the both-idle run around tick k and who bounds it.
            int lo = k;
            while (lo > 0 && !robot[static_cast<std::size_t>(lo - 1)] && !human[static_cast<std::size_t>(lo - 1)]) --lo;
            int hi = k;
            while (hi + 1 < ticks && !robot[static_cast<std::size_t>(hi + 1)] && !human[static_cast<std::size_t>(hi + 1)]) ++hi;
            if (lo == 0 || hi + 1 >= ticks) continue;
            const auto before = static_cast<std::size_t>(lo - 1);
            const auto after = static_cast<std::size_t>(hi + 1);
            if ((robot[before] && human[after]) || (human[before] && robot[after])) ++delay;
        }
        m.robot_idle_pct = 100.0 * (ticks - robot_busy) / ticks;
        m.human_idle_pct = 100.0 * (ticks - human_busy) / ticks;
        m.concurrent_activity_pct = 100.0 * both / ticks;
        m.functional_delay_pct = 100.0 * delay / ticks;
    }

    bool prev_below = false;
    for (const SimEvent& e : log) {
        if (e.time > horizon) break;
        if (const auto* d = e.as<ev::DistanceSample>()) {
            const bool below = d->distance < d_c;
            m.collisions += below && !prev_below;
            prev_below = below;
        }
    }
    return m;
}

/// Robot goal by exhaustive scan: every workpiece id, with its own availability test.
inline std::optional<int> brute_force_goal(const EstimatedWorld& est, std::optional<int> human_goal) {
    std::optional<int> best;
    double best_d = std::numeric_limits<double>::infinity();
    for (const EstimatedWorkpiece& w : est.workpieces) {
        if (human_goal && w.id == *human_goal) continue;
        if (w.status != WorkpieceStatus::OnTable) continue;
        int slot = -1;
        for (const TargetSlot& s : est.slots) {
            if (s.assigned_workpiece == w.id) slot = s.slot_id;
        }
        if (slot < 0) continue;
        bool occupied = false;
        for (const EstimatedWorkpiece& o : est.workpieces) {
            occupied = occupied || (o.status == WorkpieceStatus::Placed && o.placed_slot == slot);
        }
        if (occupied) continue;
        const double dx = w.pose.x - est.robot_effector.x;
        const double dy = w.pose.y - est.robot_effector.y;
        const double dz = w.pose.z - est.robot_effector.z;
        const double d = std::sqrt(dx * dx + dy * dy + dz * dz);
        if (d < best_d || (d == best_d && w.id < *best)) {
            best = w.id;
            best_d = d;
        }
    }
    return best;
}

} // namespace hrcsim::proptest
