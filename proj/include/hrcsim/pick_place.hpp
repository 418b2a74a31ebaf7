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

#include "hrcsim/hsm.hpp"
#include "hrcsim/perception.hpp"
#include "hrcsim/planner.hpp"

#include <functional>
#include <memory>
#include <optional>
#include <string>

namespace hrcsim {

/// What the robot's state machine sees and may do during one tick.
struct RobotContext {
    const EstimatedWorld* est = nullptr;
    GateState gate = GateState::Clear;
    double time = 0.0;
    double dt = 0.0;

    /// Written by motion leaves; the kernel moves the effector toward it after the executor step.
    std::optional<Point3> motion_target;

    /// Attempt a manipulation in the ground-truth world. Return false when it was refused.
    std::function<bool(int workpiece)> try_grasp;
    /// Return true only if the workpiece ended up placed in `slot`.
    std::function<bool(int slot)> try_release;

    bool hold() const { return gate == GateState::Hold; }
};

struct PlanParams {
    /// Pre-grasp staging waypoint.
    Point3 reserve_pose{0.0, 0.25, 0.30};
    /// Height of the waypoint above the target slot.
    double transit_height = 0.30;
    int grasp_ticks = 10;
    int release_ticks = 10;

    friend bool operator==(const PlanParams&, const PlanParams&) = default;
};

inline const std::string kHumanNear = "human_near";

namespace plan {

using RobotNode = hsm::NodePtr<RobotContext>;

/// Confirms the selected goal is still available.
class BlockChoice : public hsm::Leaf<RobotContext> {
  public:
    explicit BlockChoice(GoalSelection goal)
        : Leaf("BLOCK-CHOICE", {hsm::kSucceeded, hsm::kAborted}), goal_(goal) {}

  protected:
    std::optional<std::string> on_tick(RobotContext& ctx) override {
        const EstimatedWorkpiece* w = ctx.est->find_workpiece(goal_.workpiece_id);
        const bool available = w != nullptr && w->status == WorkpieceStatus::OnTable &&
                               !ctx.est->slot_occupied(goal_.target_slot_id);
        return available ? hsm::kSucceeded : hsm::kAborted;
    }

  private:
    GoalSelection goal_;
};

/// Straight-line motion to a target fixed on first entry. Re-entry continues toward the same
/// target from wherever the effector stopped.
class MoveTo : public hsm::Leaf<RobotContext> {
  public:
    using TargetFn = std::function<std::optional<Point3>(const RobotContext&)>;

    MoveTo(std::string name, TargetFn target)
        : Leaf(std::move(name), {hsm::kSucceeded, hsm::kAborted}), target_fn_(std::move(target)) {}

    const std::optional<Point3>& target() const { return target_; }

  protected:
    void on_enter(RobotContext& ctx) override {
        if (!target_) {
            target_ = target_fn_(ctx);
        }
    }

    std::optional<std::string> on_tick(RobotContext& ctx) override {
        if (!target_) {
            return hsm::kAborted;
        }
        if (ctx.est->robot_effector == *target_) {
            return hsm::kSucceeded;
        }
        ctx.motion_target = *target_;
        return std::nullopt;
    }

  private:
    TargetFn target_fn_;
    std::optional<Point3> target_;
};

/// Fires when the safety gate holds.
class DistanceMonitor : public hsm::Leaf<RobotContext> {
  public:
    DistanceMonitor() : Leaf("MONITOR", {kHumanNear}) {}

  protected:
    std::optional<std::string> on_tick(RobotContext& ctx) override {
        return ctx.hold() ? std::optional<std::string>(kHumanNear) : std::nullopt;
    }
};

/// Stationary dwell that commits a manipulation at its end. Dwell time only accrues while the
/// gate is clear.
class Manipulate : public hsm::Leaf<RobotContext> {
  public:
    using Action = std::function<bool(RobotContext&)>;
    using Precondition = std::function<bool(const RobotContext&)>;

    Manipulate(std::string name, int ticks, Precondition pre, Action action)
        : Leaf(std::move(name), {hsm::kSucceeded, hsm::kAborted}), ticks_(ticks),
          pre_(std::move(pre)), action_(std::move(action)) {}

  protected:
    std::optional<std::string> on_tick(RobotContext& ctx) override {
        if (pre_ && !pre_(ctx)) {
            return hsm::kAborted;
        }
        if (ctx.hold()) {
            return std::nullopt;
        }
        if (++elapsed_ < ticks_) {
            return std::nullopt;
        }
        return action_(ctx) ? hsm::kSucceeded : hsm::kAborted;
    }

  private:
    int ticks_;
    int elapsed_ = 0;
    Precondition pre_;
    Action action_;
};

/// Robot holds its pose until the gate clears.
class WaitForClear : public hsm::Leaf<RobotContext> {
  public:
    explicit WaitForClear(std::string name) : Leaf(std::move(name), {"clear"}) {}

    bool pausing() const override { return true; }

  protected:
    std::optional<std::string> on_tick(RobotContext& ctx) override {
        return ctx.hold() ? std::nullopt : std::optional<std::string>("clear");
    }
};

/// Motion paired with a distance monitor; the monitor is stepped first.
inline RobotNode monitored(std::string container, RobotNode action) {
    const std::string action_name = action->name();
    auto c = std::make_unique<hsm::Concurrence<RobotContext>>(
        std::move(container),
        std::vector<std::string>{hsm::kSucceeded, hsm::kAborted, kHumanNear, hsm::kPreempted},
        hsm::kPreempted, true);
    c->add(std::make_unique<DistanceMonitor>());
    c->add(std::move(action));
    c->when(kHumanNear, {{"MONITOR", kHumanNear}});
    c->when(hsm::kSucceeded, {{action_name, hsm::kSucceeded}});
    c->when(hsm::kAborted, {{action_name, hsm::kAborted}});
    return c;
}

} // namespace plan

/// Pick-and-place hierarchy:
///   BLOCK-CHOICE -> C1{MOVE-TO-RESERVE-AREA | MONITOR} -> C2{APPROACH | MONITOR} -> GRASP
///   -> C3{MOVE-TO-TARGET-AREA | MONITOR} -> C4{APPROACH | MONITOR} -> RELEASE
/// A container ending in "human_near" goes to its PAUSE state, which re-enters the same
/// container once the gate clears.
inline plan::RobotNode build_pick_place_plan(const GoalSelection& goal, const PlanParams& params) {
    using namespace plan;
    const int wp = goal.workpiece_id;
    const int slot = goal.target_slot_id;

    auto goal_pose = [wp](const RobotContext& ctx) -> std::optional<Point3> {
        const EstimatedWorkpiece* w = ctx.est->find_workpiece(wp);
        return w ? std::optional<Point3>(w->pose) : std::nullopt;
    };
    auto slot_center = [slot](const RobotContext& ctx) -> std::optional<Point3> {
        for (const TargetSlot& s : ctx.est->slots) {
            if (s.slot_id == slot) return s.center;
        }
        return std::nullopt;
    };
    auto above_slot = [slot_center, h = params.transit_height](const RobotContext& ctx) {
        std::optional<Point3> c = slot_center(ctx);
        if (c) c->z = h;
        return c;
    };
    auto reserve = [p = params.reserve_pose](const RobotContext&) { return std::optional<Point3>(p); };

    auto grasp = std::make_unique<Manipulate>(
        "GRASP", params.grasp_ticks,
        [wp](const RobotContext& ctx) {
            const EstimatedWorkpiece* w = ctx.est->find_workpiece(wp);
            return (w != nullptr && w->status == WorkpieceStatus::OnTable) || ctx.est->robot_held == wp;
        },
        [wp](RobotContext& ctx) { return ctx.try_grasp && ctx.try_grasp(wp); });
    auto release = std::make_unique<Manipulate>(
        "RELEASE", params.release_ticks, Manipulate::Precondition{},
        [slot](RobotContext& ctx) { return ctx.try_release && ctx.try_release(slot); });

    auto seq = std::make_unique<hsm::Sequence<RobotContext>>(
        "PICK-PLACE", std::vector<std::string>{hsm::kSucceeded, hsm::kAborted, hsm::kPreempted});

    auto monitored_step = [&seq](const std::string& name, RobotNode action, const std::string& next) {
        seq->add(monitored(name, std::move(action)),
                 {{hsm::kSucceeded, next}, {hsm::kAborted, hsm::kAborted}, {kHumanNear, "PAUSE-" + name}});
        seq->add(std::make_unique<WaitForClear>("PAUSE-" + name), {{"clear", name}});
    };

    seq->add(std::make_unique<BlockChoice>(goal), {{hsm::kSucceeded, "C1"}, {hsm::kAborted, hsm::kAborted}});
    monitored_step("C1", std::make_unique<MoveTo>("MOVE-TO-RESERVE-AREA", reserve), "C2");
    monitored_step("C2", std::make_unique<MoveTo>("APPROACH", goal_pose), "GRASP");
    seq->add(std::move(grasp), {{hsm::kSucceeded, "C3"}, {hsm::kAborted, hsm::kAborted}});
    monitored_step("C3", std::make_unique<MoveTo>("MOVE-TO-TARGET-AREA", above_slot), "C4");
    monitored_step("C4", std::make_unique<MoveTo>("APPROACH", slot_center), "RELEASE");
    seq->add(std::move(release), {{hsm::kSucceeded, hsm::kSucceeded}, {hsm::kAborted, hsm::kAborted}});
    return seq;
}

} // namespace hrcsim
