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

// Simulated workpiece tracker (overhead camera + fiducial markers) and hand tracker (mocap
// wristband), plus the last-known-value fusion the robot plans from.

#include "hrcsim/errors.hpp"
#include "hrcsim/random.hpp"
#include "hrcsim/world.hpp"

#include <cstdint>
#include <deque>
#include <vector>

namespace hrcsim {

struct SensorConfig {
    double marker_noise_sigma = 0.002;
    double marker_dropout_prob = 0.01;
    double occlusion_radius = 0.05;
    double hand_noise_sigma = 0.001;
    int hand_latency_ticks = 2;
    double hand_dropout_prob = 0.01;
    std::uint64_t seed = 0;

    friend bool operator==(const SensorConfig&, const SensorConfig&) = default;

    void validate() const {
        auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
        if (!(marker_noise_sigma >= 0.0)) throw ValidationError("sensor.marker_noise_sigma", "must be >= 0");
        if (!(hand_noise_sigma >= 0.0)) throw ValidationError("sensor.hand_noise_sigma", "must be >= 0");
        if (!(occlusion_radius >= 0.0)) throw ValidationError("sensor.occlusion_radius", "must be >= 0");
        if (!prob(marker_dropout_prob)) throw ValidationError("sensor.marker_dropout_prob", "must be in [0,1]");
        if (!prob(hand_dropout_prob)) throw ValidationError("sensor.hand_dropout_prob", "must be in [0,1]");
        if (hand_latency_ticks < 0) throw ValidationError("sensor.hand_latency_ticks", "must be >= 0");
    }

    /// Noise-free, loss-free, zero-latency sensors.
    static SensorConfig ideal() {
        return SensorConfig{0.0, 0.0, 0.0, 0.0, 0, 0.0, 0};
    }
};

struct MarkerObservation {
    int marker_id = 0;
    Point3 pose;
    bool detected = false;

    friend bool operator==(const MarkerObservation&, const MarkerObservation&) = default;
};

struct HandObservation {
    Point3 pos;
    bool valid = false;

    friend bool operator==(const HandObservation&, const HandObservation&) = default;
};

struct ObservationFrame {
    double time = 0.0;
    std::vector<MarkerObservation> markers; // one per workpiece, in workpiece order
    HandObservation hand;

    friend bool operator==(const ObservationFrame&, const ObservationFrame&) = default;
};

/// Random stream plus the hand tracker's delay line.
struct SensorState {
    Rng rng;
    std::deque<Point3> hand_delay;

    explicit SensorState(std::uint64_t seed = 0) : rng(seed) {}

    friend bool operator==(const SensorState&, const SensorState&) = default;
};

inline ObservationFrame observe(const WorldState& world, const SensorConfig& cfg, SensorState& state) {
    ObservationFrame frame;
    frame.time = world.time;
    frame.markers.reserve(world.workpieces.size());

    auto noisy = [&state](const Point3& p, double sigma) {
        // Draws are taken even for sigma == 0 so the stream does not depend on the config.
        const double dx = state.rng.normal();
        const double dy = state.rng.normal();
        const double dz = state.rng.normal();
        return Point3{p.x + sigma * dx, p.y + sigma * dy, p.z + sigma * dz};
    };

    for (const Workpiece& w : world.workpieces) {
        const bool dropped = state.rng.uniform() < cfg.marker_dropout_prob;
        const Point3 sensed = noisy(w.pose, cfg.marker_noise_sigma);
        const bool occluded = w.held() ||
                              planar_distance(world.human.effector, w.pose) < cfg.occlusion_radius ||
                              planar_distance(world.robot.effector, w.pose) < cfg.occlusion_radius;
        MarkerObservation m{w.marker_id, sensed, !(dropped || occluded)};
        if (!m.detected) {
            m.pose = {};
        }
        frame.markers.push_back(m);
    }

    const bool hand_dropped = state.rng.uniform() < cfg.hand_dropout_prob;
    state.hand_delay.push_back(noisy(world.human.effector, cfg.hand_noise_sigma));
    const auto latency = static_cast<std::size_t>(cfg.hand_latency_ticks);
    if (state.hand_delay.size() > latency + 1) {
        state.hand_delay.pop_front();
    }
    if (state.hand_delay.size() == latency + 1 && !hand_dropped) {
        frame.hand = {state.hand_delay.front(), true};
    }
    return frame;
}

struct EstimatedWorkpiece {
    int id = 0;
    int marker_id = 0;
    Point3 pose;
    WorkpieceStatus status = WorkpieceStatus::OnTable;
    std::optional<int> placed_slot;
    double last_seen = 0.0;

    friend bool operator==(const EstimatedWorkpiece&, const EstimatedWorkpiece&) = default;
};

/// The robot's belief. Poses come from sensing; manipulation status, its own effector and the
/// virtual slots are twin knowledge and exact.
struct EstimatedWorld {
    double time = 0.0;
    Point3 hand_pos;
    double hand_last_seen = 0.0;
    Point3 robot_effector;
    std::optional<int> robot_held;
    std::optional<int> human_held;
    std::vector<EstimatedWorkpiece> workpieces;
    std::vector<TargetSlot> slots;
    Box bounds;

    friend bool operator==(const EstimatedWorld&, const EstimatedWorld&) = default;

    const EstimatedWorkpiece* find_workpiece(int id) const {
        for (const auto& w : workpieces) {
            if (w.id == id) return &w;
        }
        return nullptr;
    }
    const TargetSlot* slot_for(int workpiece_id) const {
        for (const auto& s : slots) {
            if (s.assigned_workpiece == workpiece_id) return &s;
        }
        return nullptr;
    }
    bool slot_occupied(int slot_id) const {
        for (const auto& w : workpieces) {
            if (w.placed_slot == slot_id) return true;
        }
        return false;
    }
};

/// Belief seeded from the initial world (a calibrated start).
inline EstimatedWorld initial_estimate(const WorldState& world) {
    EstimatedWorld est;
    est.time = world.time;
    est.hand_pos = world.human.effector;
    est.hand_last_seen = world.time;
    est.robot_effector = world.robot.effector;
    est.robot_held = world.robot.held;
    est.human_held = world.human.held;
    est.slots = world.slots;
    est.bounds = world.bounds;
    for (const Workpiece& w : world.workpieces) {
        est.workpieces.push_back({w.id, w.marker_id, w.pose, w.status, w.placed_slot, world.time});
    }
    return est;
}

/// Copies the exact twin knowledge (statuses, holders, robot effector) into the belief.
inline EstimatedWorld sync_twin_state(EstimatedWorld est, const WorldState& world) {
    est.robot_effector = world.robot.effector;
    est.robot_held = world.robot.held;
    est.human_held = world.human.held;
    for (EstimatedWorkpiece& e : est.workpieces) {
        if (const Workpiece* w = world.find_workpiece(e.id)) {
            e.status = w->status;
            e.placed_slot = w->placed_slot;
        }
    }
    return est;
}

inline EstimatedWorld fuse(EstimatedWorld prev, const ObservationFrame& frame) {
    prev.time = frame.time;
    for (const MarkerObservation& m : frame.markers) {
        if (!m.detected) {
            continue;
        }
        for (EstimatedWorkpiece& e : prev.workpieces) {
            if (e.marker_id == m.marker_id) {
                e.pose = m.pose;
                e.last_seen = frame.time;
            }
        }
    }
    if (frame.hand.valid) {
        prev.hand_pos = frame.hand.pos;
        prev.hand_last_seen = frame.time;
    }
    for (EstimatedWorkpiece& e : prev.workpieces) {
        if (prev.human_held == e.id) {
            e.pose = prev.hand_pos;
        } else if (prev.robot_held == e.id) {
            e.pose = prev.robot_effector;
        }
    }
    return prev;
}

} // namespace hrcsim
