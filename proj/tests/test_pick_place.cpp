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
#include "hrcsim/hrcsim.hpp"

#include <gtest/gtest.h>

#include <functional>
#include <set>

using namespace hrcsim;

namespace {

/// Drives a pick-place plan against a belief without the full kernel: the effector moves
/// straight to the requested target at `step` per tick and manipulations always succeed.
struct Bench {
    EstimatedWorld est = initial_estimate(initial_world(nine_block_mirror()));
    std::vector<std::string> entered;
    std::vector<int> grasps;
    std::vector<int> releases;
    double step = 0.0125;
    bool grasp_ok = true;

    std::optional<hsm::Machine<RobotContext>> machine;

    void start(int wp) {
        GoalSelection g{wp, est.slot_for(wp)->slot_id, 0.0, 0.0};
        machine.emplace(build_pick_place_plan(g, PlanParams{}), [this](const hsm::TraceEvent& e) {
            if (e.kind == hsm::TraceKind::Entered || e.kind == hsm::TraceKind::Resumed) entered.push_back(e.path);
        });
    }

    hsm::MachineStatus tick(GateState gate) {
        RobotContext ctx;
        ctx.est = &est;
        ctx.gate = gate;
        ctx.try_grasp = [this](int wp) {
            if (!grasp_ok) return false;
            grasps.push_back(wp);
            est.robot_held = wp;
            for (auto& w : est.workpieces) {
                if (w.id == wp) w.status = WorkpieceStatus::HeldByRobot;
            }
            return true;
        };
        ctx.try_release = [this](int slot) {
            releases.push_back(slot);
            for (auto& w : est.workpieces) {
                if (w.id == est.robot_held) {
                    w.status = WorkpieceStatus::Placed;
                    w.placed_slot = slot;
                }
            }
            est.robot_held.reset();
            return true;
        };
        const hsm::MachineStatus s = machine->tick(ctx);
        last_motion = ctx.motion_target;
        if (ctx.motion_target && gate == GateState::Clear) {
            est.robot_effector = step_toward(est.robot_effector, *ctx.motion_target, step);
        }
        return s;
    }

    std::optional<Point3> last_motion;
};

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

} // namespace

TEST(PickPlace, UnobstructedPlanVisitsEveryStageInOrder) {
    Bench b;
    b.start(5);
    hsm::MachineStatus s;
    int ticks = 0;
    do {
        s = b.tick(GateState::Clear);
        ASSERT_LT(++ticks, 2000);
    } while (!s.finished());
    EXPECT_EQ(s.outcome, hsm::kSucceeded);
    EXPECT_EQ(b.grasps, std::vector<int>{5});
    EXPECT_EQ(b.releases, std::vector<int>{5});

    std::vector<std::string> leaves;
    for (const std::string& p : b.entered) {
        if (p.find("MONITOR") == std::string::npos && std::count(p.begin(), p.end(), '/') >= 1) leaves.push_back(p);
    }
    const std::vector<std::string> expected{
        "PICK-PLACE/BLOCK-CHOICE", "PICK-PLACE/C1", "PICK-PLACE/C1/MOVE-TO-RESERVE-AREA",
        "PICK-PLACE/C2",           "PICK-PLACE/C2/APPROACH", "PICK-PLACE/GRASP",
        "PICK-PLACE/C3",           "PICK-PLACE/C3/MOVE-TO-TARGET-AREA", "PICK-PLACE/C4",
        "PICK-PLACE/C4/APPROACH",  "PICK-PLACE/RELEASE"};
    EXPECT_EQ(leaves, expected);
    EXPECT_EQ(b.est.robot_effector, b.est.slot_for(5)->center);
}

TEST(PickPlace, HoldPausesMotionAndResumesTowardTheSameTarget) {
    Bench b;
    b.start(1);
    for (int i = 0; i < 30; ++i) b.tick(GateState::Clear); // into C2
    ASSERT_TRUE(contains(b.machine->status().active_path, "PICK-PLACE/C2/APPROACH"));
    const Point3 before = b.est.robot_effector;

    EXPECT_EQ(b.tick(GateState::Hold).active_path, std::vector<std::string>{});
    hsm::MachineStatus s = b.tick(GateState::Hold);
    EXPECT_EQ(s.phase, hsm::Phase::Paused);
    EXPECT_EQ(s.active_path, std::vector<std::string>{"PICK-PLACE/PAUSE-C2"});
    for (int i = 0; i < 20; ++i) {
        b.tick(GateState::Hold);
        EXPECT_FALSE(b.last_motion);
    }
    EXPECT_EQ(b.est.robot_effector, before);

    b.tick(GateState::Clear);
    s = b.tick(GateState::Clear);
    EXPECT_EQ(s.phase, hsm::Phase::Running);
    ASSERT_TRUE(b.last_motion);
    EXPECT_EQ(*b.last_motion, b.est.find_workpiece(1)->pose);
    EXPECT_EQ(std::count(b.entered.begin(), b.entered.end(), "PICK-PLACE/C2"), 2);
}

TEST(PickPlace, GraspDwellDoesNotAccrueUnderHold) {
    Bench b;
    b.start(3);
    // The tick that enters GRASP is its first dwell tick.
    while (!contains(b.machine->status().active_path, "PICK-PLACE/GRASP")) b.tick(GateState::Clear);
    for (int i = 0; i < 50; ++i) b.tick(GateState::Hold);
    EXPECT_TRUE(b.grasps.empty());
    for (int i = 0; i < 8; ++i) b.tick(GateState::Clear);
    EXPECT_TRUE(b.grasps.empty());
    b.tick(GateState::Clear);
    EXPECT_EQ(b.grasps, std::vector<int>{3});
}

TEST(PickPlace, UnavailableGoalOrFailedGraspAborts) {
    Bench taken;
    for (auto& w : taken.est.workpieces) {
        if (w.id == 2) w.status = WorkpieceStatus::HeldByHuman;
    }
    taken.start(2);
    const hsm::MachineStatus s = taken.tick(GateState::Clear);
    ASSERT_TRUE(s.finished());
    EXPECT_EQ(s.outcome, hsm::kAborted);

    Bench slippery;
    slippery.grasp_ok = false;
    slippery.start(2);
    hsm::MachineStatus t;
    do {
        t = slippery.tick(GateState::Clear);
    } while (!t.finished());
    EXPECT_EQ(t.outcome, hsm::kAborted);
    EXPECT_TRUE(slippery.releases.empty());
}
