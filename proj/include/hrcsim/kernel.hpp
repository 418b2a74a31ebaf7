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

/**
 * Fixed-timestep simulation kernel.
 *
 * Each tick runs, in order: human model, perception, intent inference, goal selection and
 * safety gate, plan execution, robot motion, logging. Every change to the ground-truth world
 * goes through apply_event and is mirrored by exactly one log record, which is what makes a log
 * replayable into the identical world.
 */

#include "hrcsim/config.hpp"
#include "hrcsim/events.hpp"
#include "hrcsim/hsm.hpp"
#include "hrcsim/intent.hpp"
#include "hrcsim/metrics.hpp"
#include "hrcsim/perception.hpp"
#include "hrcsim/pick_place.hpp"
#include "hrcsim/planner.hpp"
#include "hrcsim/scenario.hpp"
#include "hrcsim/serialization.hpp"
#include "hrcsim/world.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <memory>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace hrcsim {

inline const std::string kLogFormat = "hrcsim-log";

struct LogHeader {
    std::string format = kLogFormat;
    int version = kFormatVersion;
    std::uint64_t seed = 0;
    std::string config_hash;
    Scenario scenario;
    SimConfig config;
    HumanModel human;
};

struct RunSummary {
    bool complete = false;
    bool timed_out = false;
    std::uint64_t ticks = 0;
    MetricsReport metrics;
};

struct EventLog {
    LogHeader header;
    std::vector<SimEvent> events;
    std::optional<RunSummary> summary; // absent for a truncated log
};

class Simulation {
  public:
    Simulation(Scenario scenario, SimConfig config, HumanModel human)
        : scenario_(std::move(scenario)), config_(std::move(config)), human_model_(std::move(human)),
          sensors_(mix_seed(config_.seed, config_.sensor.seed)) {
        scenario_.validate();
        config_.validate();
        world_ = initial_world(scenario_);
        est_ = initial_estimate(world_);
        intent_.params = config_.intent;
        gate_ = config_.gate;
        gate_.state = GateState::Clear;
        plan_params_.reserve_pose = scenario_.reserve_pose;
        plan_params_.transit_height = scenario_.reserve_pose.z;
        plan_params_.grasp_ticks = config_.grasp_ticks;
        plan_params_.release_ticks = config_.release_ticks;
        if (auto* pb = std::get_if<PlaybackHuman>(&human_model_)) {
            prepare_playback(*pb);
        }
    }

    Simulation(const Simulation&) = delete;
    Simulation& operator=(const Simulation&) = delete;

    /// Advances one tick and returns the records it produced (also appended to the log).
    std::vector<SimEvent> step() {
        const std::size_t first = log_.size();
        if (finished_) {
            return {};
        }
        if (tick_ == 0 && task_progress(world_).complete) {
            emit(ev::TaskComplete{});
            finished_ = complete_ = true;
            return {log_.begin() + first, log_.end()};
        }
        ++tick_;
        time_ = static_cast<double>(tick_) * config_.dt;
        world_ = apply_event(std::move(world_), {time_, AdvanceTime{}});

        step_human();
        step_perception();
        step_intent();
        const GateState gate = step_gate_and_select();
        const std::optional<Point3> motion = step_executor(gate);
        step_robot_motion(gate, motion);
        step_log(gate);

        return {log_.begin() + first, log_.end()};
    }

    bool finished() const { return finished_; }
    bool complete() const { return complete_; }
    bool timed_out() const { return timed_out_; }
    std::uint64_t tick() const { return tick_; }
    double time() const { return time_; }

    const Scenario& scenario() const { return scenario_; }
    const SimConfig& config() const { return config_; }
    const WorldState& world() const { return world_; }
    const EstimatedWorld& estimate() const { return est_; }
    const IntentState& intent() const { return intent_; }
    GateState gate_state() const { return effective_gate_; }
    const std::optional<GoalSelection>& robot_goal() const { return goal_; }
    const std::vector<SimEvent>& log() const { return log_; }

    hsm::MachineStatus plan_status() const {
        if (!plan_) {
            hsm::MachineStatus s;
            s.phase = hsm::Phase::Finished;
            return s;
        }
        return plan_->status();
    }

    /// Thread-safe entry point for interactive human commands.
    CommandQueue<HumanCommand>& commands() { return commands_; }

    EventLog make_log() const {
        EventLog out;
        out.header.seed = config_.seed;
        out.header.config_hash = content_hash(json(config_));
        out.header.scenario = scenario_;
        out.header.config = config_;
        out.header.human = human_model_;
        out.events = log_;
        if (finished_) {
            out.summary = RunSummary{complete_, timed_out_, tick_, compute_metrics(log_, config_.collision_threshold)};
        }
        return out;
    }

  private:
    static std::uint64_t mix_seed(std::uint64_t a, std::uint64_t b) {
        return a * 0x9E3779B97F4A7C15ull ^ b;
    }

    // --- logging / world mutation ------------------------------------------------

    void emit(EventData data) { log_.push_back({time_, std::move(data)}); }

    void move_effector(Agent a, const Point3& p) {
        if (world_.agent(a).effector == p) return;
        world_ = apply_event(std::move(world_), {time_, MoveEffector{a, p}});
        emit(ev::Move{a, p});
    }

    /// Returns an error message instead of throwing when the grasp is illegal.
    std::optional<std::string> grasp(Agent a, int workpiece) {
        try {
            apply_event_inplace(world_, {time_, Grasp{a, workpiece}});
        } catch (const IllegalEvent& e) {
            return std::string(e.what());
        }
        emit(ev::Grasp{a, workpiece});
        return std::nullopt;
    }

    /// Returns whether the workpiece ended up placed; nullopt when the release was illegal.
    std::optional<bool> release(Agent a, std::optional<int> slot, std::string* error = nullptr) {
        const std::optional<int> held = world_.agent(a).held;
        try {
            apply_event_inplace(world_, {time_, Release{a, slot}});
        } catch (const IllegalEvent& e) {
            if (error) *error = e.what();
            return std::nullopt;
        }
        const Workpiece& w = *world_.find_workpiece(*held);
        if (w.status == WorkpieceStatus::Placed) {
            emit(ev::Place{a, w.id, *w.placed_slot});
            return true;
        }
        emit(ev::Drop{a, w.id, slot, w.pose});
        return false;
    }

    void set_active(Agent a, bool active, const std::string& label) {
        if (world_.agent(a).idle() != active) return;
        std::optional<std::string> activity = active ? std::optional<std::string>(label) : std::nullopt;
        world_ = apply_event(std::move(world_), {time_, SetActivity{a, activity}});
        emit(ev::AgentActive{a, active, active ? label : std::string{}});
    }

    // --- human ---------------------------------------------------------------------

    Point3 above(const Point3& p) const { return {p.x, p.y, config_.human_carry_height}; }

    /// Where the hand ends up when it tries to go from `pos` to `next` without entering the
    /// clearance sphere around the robot effector: the inward part of the motion is dropped and
    /// the hand slides along the sphere instead.
    Point3 steer_clear(const Point3& pos, const Point3& next, double budget) const {
        const double r = config_.human_clearance;
        const Point3 robot = world_.robot.effector;
        if (r <= 0.0 || distance(next, robot) >= r || distance(next, robot) >= distance(pos, robot)) {
            return next;
        }
        const double d = distance(pos, robot);
        if (d < 1e-9) return pos;
        const Point3 n = (pos - robot) * (1.0 / d);
        Point3 motion = next - pos;
        const double inward = motion.x * n.x + motion.y * n.y + motion.z * n.z;
        if (inward < 0.0) motion = motion - n * inward;
        if (motion.norm() < 1e-6 * budget) {
            // Head-on: sidestep in the table plane.
            motion = Point3{-n.y, n.x, 0.0} * budget;
        }
        Point3 out = pos + motion;
        const double dout = distance(out, robot);
        if (dout < r && dout > 1e-9) out = robot + (out - robot) * (r / dout);
        if (distance(pos, out) > budget) out = step_toward(pos, out, budget);
        out.z = std::max(out.z, world_.bounds.min.z);
        return distance(out, robot) < std::min(d, r) ? pos : out;
    }

    /// Moves the hand along `path` by at most human_speed * dt. Returns true once the path is empty.
    /// With `avoid_robot`, waypoints other than the last are skipped when the robot sits on them.
    bool follow(std::deque<Point3>& path, bool avoid_robot = false) {
        double budget = config_.human_speed * config_.dt;
        Point3 pos = world_.human.effector;
        blocked_ = false;
        while (!path.empty() && budget > 0.0) {
            if (avoid_robot && path.size() > 1 &&
                distance(path.front(), world_.robot.effector) < config_.human_clearance) {
                path.pop_front();
                continue;
            }
            Point3 next = step_toward(pos, path.front(), budget);
            if (avoid_robot) {
                const Point3 steered = steer_clear(pos, next, budget);
                if (!(steered == next)) {
                    blocked_ = distance(steered, path.front()) >= distance(pos, path.front()) - 1e-9;
                    pos = steered;
                    break;
                }
            }
            budget -= distance(pos, next);
            pos = next;
            if (pos == path.front()) path.pop_front();
            else break;
        }
        move_effector(Agent::Human, pos);
        return path.empty();
    }

    void step_human() {
        std::visit(
            [this](auto& model) {
                using T = std::decay_t<decltype(model)>;
                if constexpr (std::is_same_v<T, ScriptedHuman>) {
                    step_scripted(model);
                } else if constexpr (std::is_same_v<T, PlaybackHuman>) {
                    step_playback();
                } else {
                    step_interactive();
                }
            },
            human_model_);
    }

    enum class ScriptPhase { Delay, Reach, GraspDwell, Transport, ReleaseDwell, Hover, Done };

    struct ScriptCursor {
        std::size_t index = 0;
        ScriptPhase phase = ScriptPhase::Delay;
        double delay_start = 0.0;
        std::deque<Point3> path;
        int dwell = 0;
        int blocked_ticks = 0;
        // Backing off from a robot that sits on the path; the interrupted path resumes afterwards.
        std::optional<std::deque<Point3>> yielding;
        int yield_ticks = 0;
    };

    static constexpr int kBlockedTicksBeforeYield = 10;
    static constexpr int kMaxYieldTicks = 200;

    /// Backs the hand away from the robot, in the table plane, while the robot blocks the next waypoint. Returns true while
    /// still yielding.
    bool step_yield(ScriptCursor& s) {
        const std::deque<Point3>& resume = *s.yielding;
        const double margin = config_.human_clearance + 0.05;
        const bool clear = std::all_of(resume.begin(), resume.end(), [&](const Point3& p) {
            return distance(p, world_.robot.effector) >= margin;
        });
        if ((clear && distance(world_.human.effector, world_.robot.effector) >= margin) ||
            ++s.yield_ticks > kMaxYieldTicks) {
            s.path = std::move(*s.yielding);
            s.yielding.reset();
            s.blocked_ticks = 0;
            return false;
        }
        Point3 away = world_.human.effector - world_.robot.effector;
        away.z = 0.0;
        const double len = away.norm();
        away = len > 1e-9 ? away * (1.0 / len) : Point3{0.0, -1.0, 0.0};
        move_effector(Agent::Human, world_.human.effector + away * (config_.human_speed * config_.dt));
        return true;
    }

    void finish_script_step() {
        set_active(Agent::Human, false, {});
        ++script_.index;
        script_.delay_start = time_;
        script_.phase = ScriptPhase::Delay;
        script_.path = {above(world_.human.effector), scenario_.human_rest};
    }

    void step_scripted(const ScriptedHuman& model) {
        ScriptCursor& s = script_;
        blocked_ = false;
        const ScriptStep* step = s.index < model.steps.size() ? &model.steps[s.index] : nullptr;
        if (s.yielding && step_yield(s)) {
            return;
        }
        const bool moving = s.phase == ScriptPhase::Reach || s.phase == ScriptPhase::Transport;
        if (moving && s.blocked_ticks >= kBlockedTicksBeforeYield) {
            s.yielding = s.path;
            s.yield_ticks = 0;
            step_yield(s);
            return;
        }
        switch (s.phase) {
        case ScriptPhase::Delay: {
            if (step == nullptr) {
                s.phase = ScriptPhase::Done;
                follow(s.path, true);
                break;
            }
            if (time_ - s.delay_start + 1e-9 < step->start_delay) {
                follow(s.path, true); // drift back toward rest while waiting
                break;
            }
            const Workpiece* w = world_.find_workpiece(step->workpiece);
            if (w == nullptr || w->status != WorkpieceStatus::OnTable) {
                emit(ev::Warning{"scripted human skips workpiece " + std::to_string(step->workpiece) +
                                 " (not on the table)"});
                finish_script_step();
                break;
            }
            if (step->action == ScriptAction::Hover) {
                s.path = {above(w->pose), w->pose + Point3{0.0, 0.0, config_.human_hover_height}};
                s.phase = ScriptPhase::Hover;
            } else {
                s.path = {above(w->pose), w->pose};
                s.phase = ScriptPhase::Reach;
                set_active(Agent::Human, true, "pick_place");
            }
            follow(s.path, true);
            break;
        }
        case ScriptPhase::Reach: {
            const Workpiece* w = world_.find_workpiece(step->workpiece);
            const bool claimed = config_.human_clearance > 0.0 &&
                                 distance(world_.robot.effector, w->pose) < config_.human_clearance;
            if (w->status != WorkpieceStatus::OnTable || claimed) {
                emit(ev::Warning{"scripted human gives up on workpiece " + std::to_string(step->workpiece)});
                finish_script_step();
                follow(s.path, true);
                break;
            }
            if (follow(s.path, true)) {
                s.phase = ScriptPhase::GraspDwell;
                s.dwell = 0;
            }
            break;
        }
        case ScriptPhase::GraspDwell:
            if (++s.dwell < config_.grasp_ticks) break;
            if (auto err = grasp(Agent::Human, step->workpiece)) {
                emit(ev::Warning{"scripted human: " + *err});
                finish_script_step();
                break;
            }
            {
                const TargetSlot* slot = world_.slot_for(step->workpiece);
                s.path = {above(world_.human.effector), above(slot->center), slot->center};
                s.phase = ScriptPhase::Transport;
            }
            break;
        case ScriptPhase::Transport:
            if (follow(s.path, true)) {
                s.phase = ScriptPhase::ReleaseDwell;
                s.dwell = 0;
            }
            break;
        case ScriptPhase::ReleaseDwell:
            if (++s.dwell < config_.release_ticks) break;
            {
                std::string err;
                if (!release(Agent::Human, world_.slot_for(step->workpiece)->slot_id, &err)) {
                    if (!err.empty()) emit(ev::Warning{"scripted human: " + err});
                }
            }
            finish_script_step();
            break;
        case ScriptPhase::Hover:
            follow(s.path, true);
            break;
        case ScriptPhase::Done:
            follow(s.path, true);
            break;
        }
        s.blocked_ticks = blocked_ ? s.blocked_ticks + 1 : 0;
    }

    // Playback ------------------------------------------------------------------------

    void prepare_playback(const PlaybackHuman& pb) {
        std::vector<PlaybackRecord> recs = pb.records;
        std::stable_sort(recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.t < b.t; });
        for (const PlaybackRecord& r : recs) {
            (r.kind == PlaybackKind::Hand ? playback_.samples : playback_.actions).push_back(r);
        }
    }

    Point3 playback_hand(double t) const {
        const auto& s = playback_.samples;
        if (s.empty()) return world_.human.effector;
        if (t <= s.front().t) return s.front().position;
        if (t >= s.back().t) return s.back().position;
        auto hi = std::upper_bound(s.begin(), s.end(), t, [](double v, const PlaybackRecord& r) { return v < r.t; });
        auto lo = std::prev(hi);
        if (lo->t == t || hi->t == lo->t) return lo->position;
        const double u = (t - lo->t) / (hi->t - lo->t);
        return lo->position + (hi->position - lo->position) * u;
    }

    void step_playback() {
        const Point3 before = world_.human.effector;
        move_effector(Agent::Human, playback_hand(time_));
        auto& actions = playback_.actions;
        while (playback_.next_action < actions.size() && actions[playback_.next_action].t <= time_ + 1e-12) {
            const PlaybackRecord& r = actions[playback_.next_action++];
            if (r.kind == PlaybackKind::Grasp) {
                if (auto err = grasp(Agent::Human, r.workpiece)) {
                    emit(ev::Warning{"playback: " + *err});
                }
            } else {
                std::string err;
                if (!release(Agent::Human, r.slot, &err) && !err.empty()) {
                    emit(ev::Warning{"playback: " + err});
                }
            }
        }
        const double speed = distance(before, world_.human.effector) / config_.dt;
        const bool active = world_.human.held.has_value() || speed > config_.playback_active_speed;
        set_active(Agent::Human, active, "active");
    }

    // Interactive ------------------------------------------------------------------------

    struct PendingManipulation {
        HumanCommand command;
        std::deque<Point3> path;
        bool dwelling = false;
        int dwell = 0;
    };

    static std::string describe(const HumanCommand& c) {
        std::ostringstream os;
        std::visit(
            [&os](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, cmd::HandMove>) {
                    os << "hand_move " << x.target.x << ' ' << x.target.y << ' ' << x.target.z;
                } else if constexpr (std::is_same_v<T, cmd::Grasp>) {
                    os << "grasp " << x.workpiece;
                } else {
                    if (x.slot) os << "release slot " << *x.slot;
                    else if (x.pose) os << "release at " << x.pose->x << ' ' << x.pose->y;
                    else os << "release";
                }
            },
            c);
        return os.str();
    }

    void reject(const HumanCommand& c, const std::string& reason) {
        emit(ev::CommandRejected{describe(c), reason});
    }

    /// Applies queued commands; at most one grasp/release per tick, the rest wait.
    void drain_commands() {
        std::deque<HumanCommand> items = commands_.drain();
        std::deque<HumanCommand> deferred;
        bool manipulated = false;
        for (HumanCommand& c : items) {
            if (auto* mv = std::get_if<cmd::HandMove>(&c)) {
                if (!mv->target.finite()) {
                    reject(c, "non-finite target");
                    continue;
                }
                emit(ev::HumanCommand{describe(c)});
                pending_.reset();
                free_target_ = mv->target;
                continue;
            }
            if (manipulated) {
                deferred.push_back(std::move(c));
                continue;
            }
            manipulated = true;
            if (auto* g = std::get_if<cmd::Grasp>(&c)) {
                const Workpiece* w = world_.find_workpiece(g->workpiece);
                if (w == nullptr) {
                    reject(c, "no workpiece " + std::to_string(g->workpiece));
                } else if (world_.human.held) {
                    reject(c, "hand already holds workpiece " + std::to_string(*world_.human.held));
                } else if (w->status != WorkpieceStatus::OnTable) {
                    reject(c, "workpiece " + std::to_string(w->id) + " is " + std::string(to_string(w->status)));
                } else {
                    emit(ev::HumanCommand{describe(c)});
                    pending_ = PendingManipulation{c, {above(world_.human.effector), above(w->pose), w->pose}};
                    free_target_.reset();
                }
            } else {
                const auto& r = std::get<cmd::Release>(c);
                const TargetSlot* slot = r.slot ? world_.find_slot(*r.slot) : nullptr;
                if (!world_.human.held) {
                    reject(c, "hand holds nothing");
                } else if (r.slot && slot == nullptr) {
                    reject(c, "no slot " + std::to_string(*r.slot));
                } else if (!r.slot && !r.pose) {
                    reject(c, "release needs a slot or a pose");
                } else if (r.pose && !world_.bounds.contains({r.pose->x, r.pose->y, world_.bounds.min.z})) {
                    reject(c, "release pose outside the workspace");
                } else {
                    emit(ev::HumanCommand{describe(c)});
                    const Point3 target = slot ? slot->center : Point3{r.pose->x, r.pose->y, world_.bounds.min.z};
                    pending_ = PendingManipulation{c, {above(world_.human.effector), above(target), target}};
                    free_target_.reset();
                }
            }
        }
        commands_.requeue_front(std::move(deferred));
    }

    void step_interactive() {
        drain_commands();
        if (pending_) {
            PendingManipulation& p = *pending_;
            if (!p.dwelling) {
                if (follow(p.path)) {
                    p.dwelling = true;
                    p.dwell = 0;
                }
            } else if (const auto* g = std::get_if<cmd::Grasp>(&p.command)) {
                if (++p.dwell >= config_.grasp_ticks) {
                    if (auto err = grasp(Agent::Human, g->workpiece)) reject(p.command, *err);
                    pending_.reset();
                }
            } else if (++p.dwell >= config_.release_ticks) {
                const auto& r = std::get<cmd::Release>(p.command);
                std::string err;
                if (!release(Agent::Human, r.slot, &err) && !err.empty()) reject(p.command, err);
                pending_.reset();
            }
        } else if (free_target_) {
            std::deque<Point3> path{*free_target_};
            if (follow(path)) free_target_.reset();
        }
        set_active(Agent::Human, pending_.has_value() || world_.human.held.has_value(), "pick_place");
    }

    // --- perception / intent ---------------------------------------------------------------

    void step_perception() {
        const ObservationFrame frame = observe(world_, config_.sensor, sensors_);
        est_ = fuse(sync_twin_state(std::move(est_), world_), frame);
    }

    void step_intent() {
        std::vector<GoalCandidate> near;
        for (const GoalCandidate& c : manipulable_workpieces(est_)) {
            const double d = config_.planar_intent ? planar_distance(est_.hand_pos, c.pose)
                                                   : distance(est_.hand_pos, c.pose);
            if (d <= config_.intent_radius) near.push_back(c);
        }
        Point3 hand = est_.hand_pos;
        if (config_.planar_intent) {
            hand.z = 0.0;
            for (GoalCandidate& c : near) c.pose.z = 0.0;
        }
        last_distribution_ = goal_distribution(hand, near, intent_.params.beta);
        const std::optional<int> before = intent_.current_goal;
        intent_ = update_intent(intent_, last_distribution_);
        if (intent_.current_goal != before) {
            emit(ev::GoalInferred{intent_.current_goal});
        }
    }

    // --- planner / executor / motion ---------------------------------------------------------

    bool forced_hold() const {
        return std::any_of(config_.forced_holds.begin(), config_.forced_holds.end(),
                           [t = time_](const Interval& w) { return t >= w.begin && t <= w.end; });
    }

    GateState step_gate_and_select() {
        gate_ = update_safety(gate_, distance(est_.hand_pos, est_.robot_effector));
        GateState effective = config_.gate_enabled ? gate_.state : GateState::Clear;
        if (forced_hold()) effective = GateState::Hold;
        if (effective != effective_gate_) {
            emit(ev::SafetyHold{effective == GateState::Hold});
            effective_gate_ = effective;
        }

        if (!plan_ && effective == GateState::Clear && !world_.robot.held) {
            if (std::optional<GoalSelection> sel = select_robot_goal(est_, intent_.current_goal)) {
                sel->selected_at = time_;
                goal_ = sel;
                emit(ev::GoalSelected{sel->workpiece_id, sel->target_slot_id, intent_.current_goal,
                                      sel->distance_to_ee});
                plan_.emplace(build_pick_place_plan(*sel, plan_params_), [this](const hsm::TraceEvent& t) {
                    emit(ev::StateTrace{std::string(hsm::to_string(t.kind)), t.path, t.outcome});
                });
            }
        }
        return effective;
    }

    std::optional<Point3> step_executor(GateState gate) {
        if (!plan_) return std::nullopt;
        RobotContext ctx;
        ctx.est = &est_;
        ctx.gate = gate;
        ctx.time = time_;
        ctx.dt = config_.dt;
        ctx.try_grasp = [this](int wp) {
            if (auto err = grasp(Agent::Robot, wp)) {
                emit(ev::Warning{"robot: " + *err});
                return false;
            }
            // The executor's view must follow immediately, not on the next perception pass.
            est_ = sync_twin_state(std::move(est_), world_);
            return true;
        };
        ctx.try_release = [this](int slot) {
            std::string err;
            const std::optional<bool> placed = release(Agent::Robot, slot, &err);
            if (!placed) emit(ev::Warning{"robot: " + err});
            est_ = sync_twin_state(std::move(est_), world_);
            return placed.value_or(false);
        };
        const hsm::MachineStatus status = plan_->tick(ctx);
        plan_phase_ = status.phase;
        if (status.finished()) {
            emit(ev::PlanOutcome{goal_->workpiece_id, *status.outcome});
            plan_.reset();
            goal_.reset();
            return std::nullopt;
        }
        return ctx.motion_target;
    }

    void step_robot_motion(GateState gate, const std::optional<Point3>& target) {
        if (!target || gate == GateState::Hold) return;
        move_effector(Agent::Robot, step_toward(world_.robot.effector, *target, config_.robot_speed * config_.dt));
    }

    void step_log(GateState gate) {
        const bool robot_active = plan_.has_value() && gate == GateState::Clear && plan_phase_ != hsm::Phase::Paused;
        set_active(Agent::Robot, robot_active, "pick_place");
        emit(ev::DistanceSample{min_human_robot_distance(world_)});
        if (task_progress(world_).complete) {
            emit(ev::TaskComplete{});
            finished_ = complete_ = true;
        } else if (time_ >= config_.max_sim_time - 1e-9) {
            emit(ev::Warning{"timeout at t=" + std::to_string(time_)});
            finished_ = timed_out_ = true;
        }
    }

    Scenario scenario_;
    SimConfig config_;
    HumanModel human_model_;
    PlanParams plan_params_;

    WorldState world_;
    EstimatedWorld est_;
    SensorState sensors_;
    IntentState intent_;
    GoalDistribution last_distribution_;
    SafetyGate gate_;
    GateState effective_gate_ = GateState::Clear;
    std::optional<hsm::Machine<RobotContext>> plan_;
    hsm::Phase plan_phase_ = hsm::Phase::Finished;
    std::optional<GoalSelection> goal_;

    ScriptCursor script_;
    bool blocked_ = false;
    struct {
        std::vector<PlaybackRecord> samples;
        std::vector<PlaybackRecord> actions;
        std::size_t next_action = 0;
    } playback_;
    CommandQueue<HumanCommand> commands_;
    std::optional<PendingManipulation> pending_;
    std::optional<Point3> free_target_;

    std::uint64_t tick_ = 0;
    double time_ = 0.0;
    bool finished_ = false;
    bool complete_ = false;
    bool timed_out_ = false;
    std::vector<SimEvent> log_;
};

/// Steps until the task completes or max_sim_time is reached. A timed-out log is still
/// returned, with summary.complete == false.
inline EventLog run(const Scenario& scenario, const SimConfig& config, const HumanModel& human) {
    Simulation sim(scenario, config, human);
    while (!sim.finished()) {
        sim.step();
    }
    return sim.make_log();
}

/// Extracts the human's hand trajectory and manipulations from a log as a playback model.
inline PlaybackHuman playback_from_log(const EventLog& log, double dt) {
    PlaybackHuman pb;
    Point3 last = log.header.scenario.human_rest;
    double last_t = 0.0;
    pb.records.push_back({0.0, PlaybackKind::Hand, last, 0, std::nullopt});
    for (const SimEvent& e : log.events) {
        if (const auto* m = e.as<ev::Move>(); m && m->agent == Agent::Human) {
            if (e.time - last_t > dt * 1.5) {
                // Hand was still until the tick before this move.
                pb.records.push_back({e.time - dt, PlaybackKind::Hand, last, 0, std::nullopt});
            }
            pb.records.push_back({e.time, PlaybackKind::Hand, m->position, 0, std::nullopt});
            last = m->position;
            last_t = e.time;
        } else if (const auto* g = e.as<ev::Grasp>(); g && g->agent == Agent::Human) {
            pb.records.push_back({e.time, PlaybackKind::Grasp, {}, g->workpiece, std::nullopt});
        } else if (const auto* p = e.as<ev::Place>(); p && p->agent == Agent::Human) {
            pb.records.push_back({e.time, PlaybackKind::Release, {}, 0, p->slot});
        } else if (const auto* d = e.as<ev::Drop>(); d && d->agent == Agent::Human) {
            pb.records.push_back({e.time, PlaybackKind::Release, {}, 0, d->requested_slot});
        }
    }
    return pb;
}

} // namespace hrcsim
