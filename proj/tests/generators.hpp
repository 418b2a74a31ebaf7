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

// Hand-rolled random generators shared by the property tests.

#include "hrcsim/hrcsim.hpp"

#include <algorithm>
#include <numeric>
#include <random>
#include <vector>

namespace hrcsim::proptest {

class Gen {
  public:
    explicit Gen(std::uint64_t seed) : rng_(seed) {}

    double real(double lo, double hi) { return lo + (hi - lo) * rng_.uniform(); }
    int integer(int lo, int hi) { return lo + static_cast<int>(rng_.uniform() * (hi - lo + 1)); }
    bool coin(double p = 0.5) { return rng_.uniform() < p; }
    Point3 point(const Box& b) {
        return {real(b.min.x, b.max.x), real(b.min.y, b.max.y), real(b.min.z, b.max.z)};
    }
    /// Quantized to `step` so that exact ties are common.
    double grid(double lo, double hi, double step) {
        const int n = static_cast<int>((hi - lo) / step);
        return lo + step * integer(0, n);
    }
    template <class T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            std::swap(v[i - 1], v[static_cast<std::size_t>(integer(0, static_cast<int>(i) - 1))]);
        }
    }

  private:
    Rng rng_;
};

/// Random belief with n workpieces on a coarse grid, some already placed or held.
inline EstimatedWorld random_estimate(Gen& g, int n) {
    EstimatedWorld est;
    est.bounds = {{-0.6, -0.4, 0.0}, {0.6, 0.4, 0.4}};
    est.robot_effector = {g.grid(-0.6, 0.6, 0.05), g.grid(-0.4, 0.4, 0.05), g.grid(0.0, 0.4, 0.05)};
    est.hand_pos = {g.grid(-0.6, 0.6, 0.05), g.grid(-0.4, 0.4, 0.05), g.grid(0.0, 0.4, 0.05)};
    std::vector<int> ids(static_cast<std::size_t>(n));
    std::iota(ids.begin(), ids.end(), 1);
    g.shuffle(ids);
    bool robot_holds = false;
    bool human_holds = false;
    for (int id : ids) {
        EstimatedWorkpiece w;
        w.id = id;
        w.marker_id = 100 + id;
        w.pose = {g.grid(-0.6, 0.0, 0.05), g.grid(-0.4, 0.4, 0.05), 0.0};
        const int roll = g.integer(0, 9);
        if (roll == 0) {
            w.status = WorkpieceStatus::Placed;
            w.placed_slot = id;
        } else if (roll == 1 && !robot_holds) {
            w.status = WorkpieceStatus::HeldByRobot;
            est.robot_held = id;
            robot_holds = true;
        } else if (roll == 2 && !human_holds) {
            w.status = WorkpieceStatus::HeldByHuman;
            est.human_held = id;
            human_holds = true;
        }
        est.workpieces.push_back(w);
        est.slots.push_back({id, {g.grid(0.05, 0.6, 0.05), g.grid(-0.4, 0.4, 0.05), 0.0}, id});
    }
    return est;
}

/// A random well-formed event log: alternating start/end activity per agent, matched
/// grasp/place pairs, one distance sample per tick, optional TaskComplete.
inline std::vector<SimEvent> random_log(Gen& g, int ticks, double dt) {
    std::vector<SimEvent> log;
    bool active[2] = {false, false};
    std::optional<int> holding[2];
    int next_wp = 1;
    for (int k = 1; k <= ticks; ++k) {
        const double t = k * dt;
        for (int a = 0; a < 2; ++a) {
            const Agent agent = a == 0 ? Agent::Human : Agent::Robot;
            if (g.coin(0.15)) {
                active[a] = !active[a];
                log.push_back({t, ev::AgentActive{agent, active[a], active[a] ? "pick_place" : ""}});
            }
            if (!holding[a] && g.coin(0.05)) {
                holding[a] = next_wp++;
                log.push_back({t, ev::Grasp{agent, *holding[a]}});
            } else if (holding[a] && g.coin(0.08)) {
                if (g.coin(0.8)) log.push_back({t, ev::Place{agent, *holding[a], *holding[a]}});
                else log.push_back({t, ev::Drop{agent, *holding[a], std::nullopt, {0.0, 0.0, 0.0}}});
                holding[a].reset();
            }
        }
        log.push_back({t, ev::DistanceSample{g.real(0.0, 0.5)}});
        if (k == ticks && g.coin(0.5)) log.push_back({t, ev::TaskComplete{}});
    }
    return log;
}

} // namespace hrcsim::proptest
