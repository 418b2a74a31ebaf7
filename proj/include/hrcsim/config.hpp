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

#include "hrcsim/intent.hpp"
#include "hrcsim/metrics.hpp"
#include "hrcsim/perception.hpp"
#include "hrcsim/planner.hpp"

#include <cstdint>
#include <deque>
#include <mutex>
#include <optional>
#include <variant>
#include <vector>

namespace hrcsim {

struct SimConfig {
    double dt = 0.05;
    double robot_speed = 0.25;
    double human_speed = 0.6;
    int grasp_ticks = 10;
    int release_ticks = 10;
    SensorConfig sensor;
    IntentParams intent;
    SafetyGate gate;
    bool gate_enabled = true;
    double collision_threshold = 0.10;
    std::uint64_t seed = 0;
    double max_sim_time = 300.0;

    /// Only workpieces within this radius of the sensed hand count as possible human goals.
    double intent_radius = 0.35;
    /// Measure hand-to-workpiece distance in the table plane instead of 3D.
    bool planar_intent = false;
    /// Scripted hands travel between workpieces at this height.
    double human_carry_height = 0.12;
    /// Height at which a hovering scripted hand parks above its workpiece.
    double human_hover_height = 0.08;
    /// Scripted hands steer around the robot effector at this distance (0 disables).
    double human_clearance = 0.12;
    /// Playback hands count as active above this speed (m/s) or while holding.
    double playback_active_speed = 0.02;
    /// Fault injection: the gate is forced to Hold inside these windows.
    std::vector<Interval> forced_holds;

    friend bool operator==(const SimConfig&, const SimConfig&) = default;

    void validate() const {
        if (!(dt > 0.0)) throw ValidationError("dt", "must be > 0");
        if (!(robot_speed > 0.0)) throw ValidationError("robot_speed", "must be > 0");
        if (!(human_speed > 0.0)) throw ValidationError("human_speed", "must be > 0");
        if (grasp_ticks < 1) throw ValidationError("grasp_ticks", "must be >= 1");
        if (release_ticks < 1) throw ValidationError("release_ticks", "must be >= 1");
        if (!(max_sim_time > 0.0)) throw ValidationError("max_sim_time", "must be > 0");
        if (!(intent_radius > 0.0)) throw ValidationError("intent_radius", "must be > 0");
        if (!(human_clearance >= 0.0)) throw ValidationError("human_clearance", "must be >= 0");
        sensor.validate();
        intent.validate();
        gate.validate();
        if (!(collision_threshold > 0.0 && collision_threshold < gate.d_pause)) {
            throw ValidationError("collision_threshold", "must satisfy 0 < d_c < gate.d_pause");
        }
        for (std::size_t i = 0; i < forced_holds.size(); ++i) {
            if (!(forced_holds[i].begin <= forced_holds[i].end)) {
                throw ValidationError("forced_holds[" + std::to_string(i) + "]", "begin after end");
            }
        }
    }
};

// ---------------------------------------------------------------------------
// Human models
// ---------------------------------------------------------------------------

enum class ScriptAction { PickPlace, Hover };

struct ScriptStep {
    int workpiece = 0;
    /// Seconds to wait after the previous step finished.
    double start_delay = 0.0;
    ScriptAction action = ScriptAction::PickPlace;
    friend bool operator==(const ScriptStep&, const ScriptStep&) = default;
};

/// Pick-and-place cycles in a fixed order, with straight-line constant-speed hand motion.
struct ScriptedHuman {
    std::vector<ScriptStep> steps;
    friend bool operator==(const ScriptedHuman&, const ScriptedHuman&) = default;
};

enum class PlaybackKind { Hand, Grasp, Release };

struct PlaybackRecord {
    double t = 0.0;
    PlaybackKind kind = PlaybackKind::Hand;
    Point3 position;            // Hand
    int workpiece = 0;          // Grasp
    std::optional<int> slot;    // Release
    friend bool operator==(const PlaybackRecord&, const PlaybackRecord&) = default;
};

/// Recorded hand trajectory with manipulation events, replayed against a new robot.
struct PlaybackHuman {
    std::vector<PlaybackRecord> records;
    friend bool operator==(const PlaybackHuman&, const PlaybackHuman&) = default;
};

/// Driven by commands pushed into the simulation's command queue.
struct InteractiveHuman {
    friend bool operator==(const InteractiveHuman&, const InteractiveHuman&) = default;
};

using HumanModel = std::variant<ScriptedHuman, PlaybackHuman, InteractiveHuman>;

// ---------------------------------------------------------------------------
// Interactive commands
// ---------------------------------------------------------------------------

namespace cmd {
struct HandMove {
    Point3 target;
    friend bool operator==(const HandMove&, const HandMove&) = default;
};
struct Grasp {
    int workpiece = 0;
    friend bool operator==(const Grasp&, const Grasp&) = default;
};
/// Place into a slot, or set down at a pose.
struct Release {
    std::optional<int> slot;
    std::optional<Point3> pose;
    friend bool operator==(const Release&, const Release&) = default;
};
} // namespace cmd

using HumanCommand = std::variant<cmd::HandMove, cmd::Grasp, cmd::Release>;

/// Multi-producer queue drained by the kernel at tick start.
template <class T>
class CommandQueue {
  public:
    void push(T item) {
        std::lock_guard lock(mutex_);
        items_.push_back(std::move(item));
    }

    std::deque<T> drain() {
        std::lock_guard lock(mutex_);
        return std::exchange(items_, {});
    }

    /// Puts items back at the front, keeping their order.
    void requeue_front(std::deque<T> items) {
        if (items.empty()) return;
        std::lock_guard lock(mutex_);
        items.insert(items.end(), std::make_move_iterator(items_.begin()), std::make_move_iterator(items_.end()));
        items_ = std::move(items);
    }

    std::size_t size() const {
        std::lock_guard lock(mutex_);
        return items_.size();
    }

  private:
    mutable std::mutex mutex_;
    std::deque<T> items_;
};

} // namespace hrcsim
