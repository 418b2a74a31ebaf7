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
 * Tick-driven hierarchical state machines with concurrence containers and preemption.
 *
 * A machine is a finite tree of nodes. Leaves do work one tick at a time; a Sequence runs one
 * child at a time and follows an outcome -> next-child map (loops are transitions back to an
 * earlier child); a Concurrence steps all of its children within the same tick, in declaration
 * order, and maps the combination of child outcomes onto its own outcome.
 *
 * Every node declares its outcome labels up front and "preempted" is always among them. The
 * transition maps are checked for totality when the Machine is constructed. A preempt request
 * reaches every active leaf immediately; each leaf then finishes with "preempted" on its next
 * step, so the whole machine is finished one tick after the request.
 *
 * Nothing here knows about robots. The context type `Ctx` is whatever the driver passes to
 * Machine::tick.
 */

#include "hrcsim/errors.hpp"

#include <algorithm>
#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace hrcsim::hsm {

inline const std::string kSucceeded = "succeeded";
inline const std::string kAborted = "aborted";
inline const std::string kPreempted = "preempted";

/// Raised at construction when the tree is not well formed.
class InvalidMachine : public Error {
  public:
    using Error::Error;
};

enum class TraceKind { Entered, Resumed, Exited, Preempted };

inline std::string_view to_string(TraceKind k) {
    switch (k) {
    case TraceKind::Entered: return "entered";
    case TraceKind::Resumed: return "resumed";
    case TraceKind::Exited: return "exited";
    case TraceKind::Preempted: return "preempted";
    }
    return "?";
}

struct TraceEvent {
    std::uint64_t tick = 0;
    TraceKind kind = TraceKind::Entered;
    std::string path;
    std::string outcome; // set for Exited / Preempted
};

using TraceSink = std::function<void(const TraceEvent&)>;

enum class Phase { Running, Paused, Finished };

struct MachineStatus {
    Phase phase = Phase::Running;
    std::optional<std::string> outcome; // set when Finished
    std::vector<std::string> active_path; // one slash-joined path per active leaf

    bool finished() const { return phase == Phase::Finished; }
};

namespace detail {
struct Runtime {
    std::uint64_t tick = 0;
    TraceSink sink;
};
} // namespace detail

template <class Ctx>
class Node {
  public:
    Node(std::string name, std::vector<std::string> outcomes)
        : name_(std::move(name)), outcomes_(std::move(outcomes)) {
        if (name_.empty()) {
            throw InvalidMachine("node name must be nonempty");
        }
        if (std::find(outcomes_.begin(), outcomes_.end(), kPreempted) == outcomes_.end()) {
            outcomes_.push_back(kPreempted);
        }
        for (const auto& o : outcomes_) {
            if (o.empty()) throw InvalidMachine(name_ + ": empty outcome label");
        }
    }
    virtual ~Node() = default;
    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    const std::string& name() const { return name_; }
    const std::vector<std::string>& outcomes() const { return outcomes_; }
    bool declares(std::string_view label) const {
        return std::find(outcomes_.begin(), outcomes_.end(), label) != outcomes_.end();
    }
    bool active() const { return active_; }
    bool preempt_requested() const { return preempt_; }

    std::string path() const { return parent_ ? parent_->path() + "/" + name_ : name_; }

    /// Enters on first call, then advances one step. Returns the outcome once finished.
    std::optional<std::string> step(Ctx& ctx) {
        if (!active_) {
            enter(ctx);
        }
        std::optional<std::string> out = do_step(ctx);
        if (out) {
            if (!declares(*out)) {
                throw ContractViolation(path() + " returned undeclared outcome '" + *out + "'");
            }
            finish(ctx, *out);
        }
        return out;
    }

    /// Marks this node and every active descendant for preemption. Also valid on a node that
    /// is about to be entered in the current tick.
    void request_preempt() {
        preempt_ = true;
        if (active_) {
            on_preempt_request();
        }
    }

    virtual void collect_active(std::vector<std::string>& out) const = 0;
    virtual bool any_paused() const = 0;

    /// Structural checks, recursive. Throws InvalidMachine.
    virtual void validate() const {}

    /// Wires parent pointers and the shared runtime through the tree.
    virtual void attach(Node* parent, detail::Runtime* rt) {
        parent_ = parent;
        rt_ = rt;
    }

  protected:
    virtual void on_enter(Ctx&) {}
    virtual std::optional<std::string> do_step(Ctx& ctx) = 0;
    virtual void on_preempt_request() {}
    virtual void on_exit(Ctx&, const std::string&) {}

    std::uint64_t current_tick() const { return rt_ ? rt_->tick : 0; }

  private:
    void enter(Ctx& ctx) {
        active_ = true;
        trace(entries_ > 0 ? TraceKind::Resumed : TraceKind::Entered, {});
        ++entries_;
        on_enter(ctx);
        if (preempt_) {
            on_preempt_request();
        }
    }

    void finish(Ctx& ctx, const std::string& outcome) {
        on_exit(ctx, outcome);
        active_ = false;
        preempt_ = false;
        trace(outcome == kPreempted ? TraceKind::Preempted : TraceKind::Exited, outcome);
    }

    void trace(TraceKind kind, const std::string& outcome) const {
        if (rt_ && rt_->sink) {
            rt_->sink(TraceEvent{rt_->tick, kind, path(), outcome});
        }
    }

    std::string name_;
    std::vector<std::string> outcomes_;
    Node* parent_ = nullptr;
    detail::Runtime* rt_ = nullptr;
    bool active_ = false;
    bool preempt_ = false;
    std::uint64_t entries_ = 0;
};

template <class Ctx>
using NodePtr = std::unique_ptr<Node<Ctx>>;

/// Unit of work. Subclasses implement on_tick; preemption is handled here so a preempted leaf
/// always answers "preempted" on its next step without running its action.
template <class Ctx>
class Leaf : public Node<Ctx> {
  public:
    using Node<Ctx>::Node;

    void collect_active(std::vector<std::string>& out) const override {
        if (this->active()) out.push_back(this->path());
    }
    bool any_paused() const override { return this->active() && pausing(); }

    /// A pausing leaf is a registered resume condition: while it is active the machine reports
    /// Paused.
    virtual bool pausing() const { return false; }

  protected:
    virtual std::optional<std::string> on_tick(Ctx& ctx) = 0;
    /// Called on the step that acknowledges a preempt request.
    virtual void on_preempted(Ctx&) {}

    std::optional<std::string> do_step(Ctx& ctx) final {
        if (this->preempt_requested()) {
            on_preempted(ctx);
            return kPreempted;
        }
        return on_tick(ctx);
    }
};

/// Leaf built from callables, for small states and tests.
template <class Ctx>
class FunctionLeaf : public Leaf<Ctx> {
  public:
    using TickFn = std::function<std::optional<std::string>(Ctx&)>;
    using HookFn = std::function<void(Ctx&)>;

    FunctionLeaf(std::string name, std::vector<std::string> outcomes, TickFn tick,
                 HookFn enter = {}, HookFn preempted = {}, bool pausing = false)
        : Leaf<Ctx>(std::move(name), std::move(outcomes)), tick_(std::move(tick)),
          enter_(std::move(enter)), preempted_(std::move(preempted)), pausing_(pausing) {}

    bool pausing() const override { return pausing_; }

  protected:
    void on_enter(Ctx& ctx) override {
        if (enter_) enter_(ctx);
    }
    std::optional<std::string> on_tick(Ctx& ctx) override { return tick_(ctx); }
    void on_preempted(Ctx& ctx) override {
        if (preempted_) preempted_(ctx);
    }

  private:
    TickFn tick_;
    HookFn enter_;
    HookFn preempted_;
    bool pausing_;
};

/// Runs one child at a time. The first child added is the initial state. Each child's outcome
/// maps either to the name of a sibling (entered on the next tick) or to an outcome of the
/// sequence itself. An unmapped "preempted" maps to "preempted".
template <class Ctx>
class Sequence : public Node<Ctx> {
  public:
    using Transitions = std::map<std::string, std::string>;

    using Node<Ctx>::Node;

    Sequence& add(NodePtr<Ctx> child, Transitions transitions) {
        if (!transitions.count(kPreempted)) {
            transitions.emplace(kPreempted, kPreempted);
        }
        children_.push_back({std::move(child), std::move(transitions)});
        return *this;
    }

    void collect_active(std::vector<std::string>& out) const override {
        if (this->active() && current_ < children_.size()) {
            children_[current_].node->collect_active(out);
        }
    }
    bool any_paused() const override {
        return this->active() && current_ < children_.size() && children_[current_].node->any_paused();
    }

    void validate() const override {
        if (children_.empty()) {
            throw InvalidMachine(this->name() + ": sequence has no children");
        }
        for (std::size_t i = 0; i < children_.size(); ++i) {
            const auto& [node, transitions] = children_[i];
            for (std::size_t j = i + 1; j < children_.size(); ++j) {
                if (children_[j].node->name() == node->name()) {
                    throw InvalidMachine(this->name() + ": duplicate child '" + node->name() + "'");
                }
            }
            for (const auto& o : node->outcomes()) {
                auto it = transitions.find(o);
                if (it == transitions.end()) {
                    throw InvalidMachine(this->name() + ": no transition for outcome '" + o +
                                         "' of '" + node->name() + "'");
                }
                if (index_of(it->second) == children_.size() && !this->declares(it->second)) {
                    throw InvalidMachine(this->name() + ": transition target '" + it->second +
                                         "' is neither a child nor a declared outcome");
                }
            }
            for (const auto& [o, target] : transitions) {
                if (!node->declares(o)) {
                    throw InvalidMachine(this->name() + ": '" + node->name() +
                                         "' does not declare outcome '" + o + "'");
                }
            }
            node->validate();
        }
    }

    void attach(Node<Ctx>* parent, detail::Runtime* rt) override {
        Node<Ctx>::attach(parent, rt);
        for (auto& c : children_) c.node->attach(this, rt);
    }

  protected:
    void on_enter(Ctx&) override { current_ = 0; }

    void on_preempt_request() override {
        if (current_ < children_.size() && children_[current_].node->active()) {
            children_[current_].node->request_preempt();
        }
    }

    std::optional<std::string> do_step(Ctx& ctx) override {
        Child& child = children_[current_];
        if (this->preempt_requested() && !child.node->active()) {
            return kPreempted;
        }
        std::optional<std::string> out = child.node->step(ctx);
        if (!out) {
            return std::nullopt;
        }
        if (this->preempt_requested()) {
            return kPreempted;
        }
        const std::string& target = child.transitions.at(*out);
        const std::size_t next = index_of(target);
        if (next < children_.size()) {
            current_ = next;
            return std::nullopt;
        }
        return target;
    }

  private:
    struct Child {
        NodePtr<Ctx> node;
        Transitions transitions;
    };

    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (children_[i].node->name() == name) return i;
        }
        return children_.size();
    }

    std::vector<Child> children_;
    std::size_t current_ = 0;
};

/// Steps every child within one tick, in declaration order. When all children have finished,
/// the first outcome rule whose child outcomes all match decides the container outcome; the
/// default outcome applies otherwise. With preempt_on_first set, the first child to finish
/// preempts the remaining ones in the same tick.
template <class Ctx>
class Concurrence : public Node<Ctx> {
  public:
    Concurrence(std::string name, std::vector<std::string> outcomes, std::string default_outcome,
                bool preempt_on_first = true)
        : Node<Ctx>(std::move(name), std::move(outcomes)),
          default_outcome_(std::move(default_outcome)), preempt_on_first_(preempt_on_first) {}

    Concurrence& add(NodePtr<Ctx> child) {
        children_.push_back(std::move(child));
        return *this;
    }

    /// Container yields `outcome` when every listed child finished with the listed outcome.
    Concurrence& when(std::string outcome, std::map<std::string, std::string> child_outcomes) {
        rules_.push_back({std::move(outcome), std::move(child_outcomes)});
        return *this;
    }

    void collect_active(std::vector<std::string>& out) const override {
        if (!this->active()) return;
        for (const auto& c : children_) c->collect_active(out);
    }
    bool any_paused() const override {
        return this->active() &&
               std::any_of(children_.begin(), children_.end(), [](const auto& c) { return c->any_paused(); });
    }

    void validate() const override {
        if (children_.empty()) {
            throw InvalidMachine(this->name() + ": concurrence has no children");
        }
        if (!this->declares(default_outcome_)) {
            throw InvalidMachine(this->name() + ": default outcome '" + default_outcome_ + "' not declared");
        }
        for (const auto& [outcome, conds] : rules_) {
            if (!this->declares(outcome)) {
                throw InvalidMachine(this->name() + ": rule outcome '" + outcome + "' not declared");
            }
            for (const auto& [child, child_outcome] : conds) {
                const Node<Ctx>* c = find(child);
                if (c == nullptr) {
                    throw InvalidMachine(this->name() + ": rule names unknown child '" + child + "'");
                }
                if (!c->declares(child_outcome)) {
                    throw InvalidMachine(this->name() + ": '" + child + "' does not declare '" +
                                         child_outcome + "'");
                }
            }
        }
        for (const auto& c : children_) c->validate();
    }

    void attach(Node<Ctx>* parent, detail::Runtime* rt) override {
        Node<Ctx>::attach(parent, rt);
        for (auto& c : children_) c->attach(this, rt);
    }

  protected:
    void on_enter(Ctx&) override { results_.assign(children_.size(), std::nullopt); }

    void on_preempt_request() override {
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (!results_[i]) children_[i]->request_preempt();
        }
    }

    std::optional<std::string> do_step(Ctx& ctx) override {
        bool any_finished = std::any_of(results_.begin(), results_.end(),
                                        [](const auto& r) { return r.has_value(); });
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (results_[i]) continue;
            if (any_finished && preempt_on_first_) {
                children_[i]->request_preempt();
            }
            results_[i] = children_[i]->step(ctx);
            any_finished = any_finished || results_[i].has_value();
        }
        if (any_finished && preempt_on_first_) {
            // Children stepped before the first finisher still need to acknowledge.
            for (std::size_t i = 0; i < children_.size(); ++i) {
                if (results_[i]) continue;
                children_[i]->request_preempt();
                results_[i] = children_[i]->step(ctx);
            }
        }
        const bool all_done = std::all_of(results_.begin(), results_.end(),
                                          [](const auto& r) { return r.has_value(); });
        if (!all_done) {
            return std::nullopt;
        }
        if (this->preempt_requested()) {
            return kPreempted;
        }
        for (const auto& [outcome, conds] : rules_) {
            const bool match = std::all_of(conds.begin(), conds.end(), [&](const auto& kv) {
                return results_[index_of(kv.first)] == kv.second;
            });
            if (match) return outcome;
        }
        return default_outcome_;
    }

  private:
    const Node<Ctx>* find(const std::string& name) const {
        const std::size_t i = index_of(name);
        return i < children_.size() ? children_[i].get() : nullptr;
    }
    std::size_t index_of(const std::string& name) const {
        for (std::size_t i = 0; i < children_.size(); ++i) {
            if (children_[i]->name() == name) return i;
        }
        return children_.size();
    }

    std::vector<NodePtr<Ctx>> children_;
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> rules_;
    std::vector<std::optional<std::string>> results_;
    std::string default_outcome_;
    bool preempt_on_first_;
};

/// Owns a validated tree and drives it tick by tick.
template <class Ctx>
class Machine {
  public:
    explicit Machine(NodePtr<Ctx> root, TraceSink sink = {})
        : root_(std::move(root)), rt_(std::make_unique<detail::Runtime>()) {
        if (!root_) {
            throw InvalidMachine("machine has no root");
        }
        root_->validate();
        rt_->sink = std::move(sink);
        root_->attach(nullptr, rt_.get());
    }

    void set_trace_sink(TraceSink sink) { rt_->sink = std::move(sink); }

    /// Advances every active leaf by one step. A finished machine is left as is.
    MachineStatus tick(Ctx& ctx) {
        if (outcome_) {
            return status();
        }
        ++rt_->tick;
        if (std::optional<std::string> out = root_->step(ctx)) {
            outcome_ = *out;
        }
        return status();
    }

    void request_preempt() {
        if (!outcome_) {
            root_->request_preempt();
        }
    }

    MachineStatus status() const {
        MachineStatus s;
        if (outcome_) {
            s.phase = Phase::Finished;
            s.outcome = outcome_;
            return s;
        }
        root_->collect_active(s.active_path);
        s.phase = root_->any_paused() ? Phase::Paused : Phase::Running;
        return s;
    }

    bool finished() const { return outcome_.has_value(); }
    std::uint64_t ticks() const { return rt_->tick; }
    const Node<Ctx>& root() const { return *root_; }

  private:
    NodePtr<Ctx> root_;
    std::unique_ptr<detail::Runtime> rt_;
    std::optional<std::string> outcome_;
};

} // namespace hrcsim::hsm
