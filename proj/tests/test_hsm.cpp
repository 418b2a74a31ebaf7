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
#include "hrcsim/hsm.hpp"

#include <gtest/gtest.h>

#include <memory>
#include <string>
#include <vector>

using namespace hrcsim;
using namespace hrcsim::hsm;

namespace {

struct Ctx {
    std::vector<std::string> log;
    int counter = 0;
};

using Fn = FunctionLeaf<Ctx>;

/// Succeeds after `ticks` steps.
NodePtr<Ctx> countdown(std::string name, int ticks) {
    auto left = std::make_shared<int>(0);
    return std::make_unique<Fn>(
        name, std::vector<std::string>{kSucceeded},
        [left, ticks, name](Ctx& c) -> std::optional<std::string> {
            c.log.push_back(name);
            if (++*left >= ticks) return kSucceeded;
            return std::nullopt;
        },
        [left](Ctx&) { *left = 0; });
}

NodePtr<Ctx> forever(std::string name, std::shared_ptr<int> preempts = nullptr) {
    return std::make_unique<Fn>(
        name, std::vector<std::string>{kSucceeded},
        [name](Ctx& c) -> std::optional<std::string> {
            c.log.push_back(name);
            return std::nullopt;
        },
        Fn::HookFn{},
        [preempts](Ctx&) {
            if (preempts) ++*preempts;
        });
}

} // namespace

TEST(Hsm, SequenceRunsOneChildPerTickAndFollowsTransitions) {
    auto seq = std::make_unique<Sequence<Ctx>>("S", std::vector<std::string>{kSucceeded});
    seq->add(countdown("A", 1), {{kSucceeded, "B"}});
    seq->add(countdown("B", 2), {{kSucceeded, kSucceeded}});
    Machine<Ctx> m(std::move(seq));
    Ctx c;
    EXPECT_TRUE(m.tick(c).active_path.empty()) << "B is entered on the next tick";
    EXPECT_EQ(m.tick(c).active_path, std::vector<std::string>{"S/B"});
    const MachineStatus s = m.tick(c);
    EXPECT_TRUE(s.finished());
    EXPECT_EQ(s.outcome, kSucceeded);
    EXPECT_EQ(c.log, (std::vector<std::string>{"A", "B", "B"}));
    EXPECT_EQ(m.ticks(), 3u);
    // Finished machines ignore further ticks.
    m.tick(c);
    EXPECT_EQ(m.ticks(), 3u);
}

TEST(Hsm, SequenceLoopsBackToAnEarlierChild) {
    auto seq = std::make_unique<Sequence<Ctx>>("S", std::vector<std::string>{kSucceeded});
    seq->add(countdown("A", 1), {{kSucceeded, "CHECK"}});
    seq->add(std::make_unique<Fn>("CHECK", std::vector<std::string>{"again", "done"},
                                  [](Ctx& c) -> std::optional<std::string> {
                                      return ++c.counter < 3 ? "again" : "done";
                                  }),
             {{"again", "A"}, {"done", kSucceeded}});
    Machine<Ctx> m(std::move(seq));
    Ctx c;
    while (!m.tick(c).finished()) {
    }
    EXPECT_EQ(c.log, (std::vector<std::string>{"A", "A", "A"}));
    EXPECT_EQ(c.counter, 3);
}

TEST(Hsm, ConcurrenceFirstFinisherPreemptsSiblingsInTheSameTick) {
    auto preempts = std::make_shared<int>(0);
    auto con = std::make_unique<Concurrence<Ctx>>("C", std::vector<std::string>{"early", kSucceeded}, kSucceeded);
    con->add(forever("WATCH", preempts));
    con->add(countdown("WORK", 2));
    con->add(forever("LATE", preempts));
    con->when("early", {{"WORK", kSucceeded}, {"WATCH", kPreempted}});
    Machine<Ctx> m(std::move(con));
    Ctx c;
    EXPECT_EQ(m.tick(c).active_path.size(), 3u);
    const MachineStatus s = m.tick(c);
    ASSERT_TRUE(s.finished());
    EXPECT_EQ(s.outcome, "early");
    EXPECT_EQ(*preempts, 2);
    // WATCH steps before WORK finishes; LATE is preempted before it runs in tick 2.
    EXPECT_EQ(c.log, (std::vector<std::string>{"WATCH", "WORK", "LATE", "WATCH", "WORK"}));
}

TEST(Hsm, PreemptReachesEveryActiveLeafAndFinishesNextTick) {
    auto preempts = std::make_shared<int>(0);
    auto inner = std::make_unique<Concurrence<Ctx>>("INNER", std::vector<std::string>{kSucceeded}, kSucceeded, false);
    inner->add(forever("L1", preempts));
    inner->add(forever("L2", preempts));
    auto mid = std::make_unique<Sequence<Ctx>>("MID", std::vector<std::string>{kSucceeded});
    mid->add(std::move(inner), {{kSucceeded, kSucceeded}});
    auto root = std::make_unique<Concurrence<Ctx>>("ROOT", std::vector<std::string>{kSucceeded}, kSucceeded, false);
    root->add(std::move(mid));
    root->add(forever("L3", preempts));

    std::vector<TraceEvent> trace;
    Machine<Ctx> m(std::move(root), [&](const TraceEvent& e) { trace.push_back(e); });
    Ctx c;
    m.tick(c);
    m.tick(c);
    m.request_preempt();
    const MachineStatus s = m.tick(c);
    ASSERT_TRUE(s.finished());
    EXPECT_EQ(s.outcome, kPreempted);
    EXPECT_EQ(*preempts, 3);
    int leaf_preempt_traces = 0;
    for (const TraceEvent& e : trace) {
        if (e.kind == TraceKind::Preempted) {
            EXPECT_EQ(e.tick, 3u);
            leaf_preempt_traces += e.path.find("/L") != std::string::npos;
        }
    }
    EXPECT_EQ(leaf_preempt_traces, 3);
}

TEST(Hsm, UndeclaredOutcomeIsAContractViolation) {
    auto leaf = std::make_unique<Fn>("BAD", std::vector<std::string>{kSucceeded},
                                     [](Ctx&) -> std::optional<std::string> { return "nonsense"; });
    Machine<Ctx> m(std::move(leaf));
    Ctx c;
    EXPECT_THROW(m.tick(c), ContractViolation);
}

TEST(Hsm, MalformedTreesAreRejectedAtConstruction) {
    {
        auto seq = std::make_unique<Sequence<Ctx>>("S", std::vector<std::string>{kSucceeded});
        seq->add(std::make_unique<Fn>("A", std::vector<std::string>{kSucceeded, kAborted},
                                      [](Ctx&) { return std::optional<std::string>{}; }),
                 {{kSucceeded, kSucceeded}}); // aborted unmapped
        EXPECT_THROW(Machine<Ctx>(std::move(seq)), InvalidMachine);
    }
    {
        auto seq = std::make_unique<Sequence<Ctx>>("S", std::vector<std::string>{kSucceeded});
        seq->add(countdown("A", 1), {{kSucceeded, "NOWHERE"}});
        EXPECT_THROW(Machine<Ctx>(std::move(seq)), InvalidMachine);
    }
    {
        auto seq = std::make_unique<Sequence<Ctx>>("S", std::vector<std::string>{kSucceeded});
        seq->add(countdown("A", 1), {{kSucceeded, "A"}});
        seq->add(countdown("A", 1), {{kSucceeded, kSucceeded}});
        EXPECT_THROW(Machine<Ctx>(std::move(seq)), InvalidMachine);
    }
    {
        auto con = std::make_unique<Concurrence<Ctx>>("C", std::vector<std::string>{kSucceeded}, kSucceeded);
        con->add(countdown("A", 1));
        con->when(kSucceeded, {{"B", kSucceeded}});
        EXPECT_THROW(Machine<Ctx>(std::move(con)), InvalidMachine);
    }
    {
        auto con = std::make_unique<Concurrence<Ctx>>("C", std::vector<std::string>{kSucceeded}, "missing");
        con->add(countdown("A", 1));
        EXPECT_THROW(Machine<Ctx>(std::move(con)), InvalidMachine);
    }
    EXPECT_THROW(Machine<Ctx>(nullptr), InvalidMachine);
}

TEST(Hsm, PausingLeafReportsPausedAndReentryIsTracedAsResume) {
    bool clear = false;
    auto seq = std::make_unique<Sequence<Ctx>>("S", std::vector<std::string>{kSucceeded});
    seq->add(countdown("WORK", 1), {{kSucceeded, "WAIT"}});
    seq->add(std::make_unique<Fn>(
                 "WAIT", std::vector<std::string>{"clear"},
                 [&clear](Ctx&) -> std::optional<std::string> {
                     if (clear) return "clear";
                     return std::nullopt;
                 },
                 Fn::HookFn{}, Fn::HookFn{}, true),
             {{"clear", "AGAIN"}});
    auto again_count = std::make_shared<int>(0);
    seq->add(std::make_unique<Fn>("AGAIN", std::vector<std::string>{"loop", kSucceeded},
                                  [again_count](Ctx&) -> std::optional<std::string> {
                                      return ++*again_count < 2 ? "loop" : kSucceeded;
                                  }),
             {{"loop", "WORK"}, {kSucceeded, kSucceeded}});
    std::vector<TraceEvent> trace;
    Machine<Ctx> m(std::move(seq), [&](const TraceEvent& e) { trace.push_back(e); });
    Ctx c;
    m.tick(c);
    EXPECT_EQ(m.tick(c).phase, Phase::Paused);
    clear = true;
    EXPECT_EQ(m.tick(c).phase, Phase::Running);
    while (!m.tick(c).finished()) {
    }
    int resumed = 0;
    for (const TraceEvent& e : trace) resumed += e.kind == TraceKind::Resumed && e.path == "S/WORK";
    EXPECT_EQ(resumed, 1);
}
