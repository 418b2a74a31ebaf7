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
#include "hrcsim/ui_protocol.hpp"

#include <gtest/gtest.h>

using namespace hrcsim;
using namespace hrcsim::ui;

namespace {

template <class T>
std::vector<T> of_type(const std::vector<ServerMsg>& msgs) {
    std::vector<T> out;
    for (const ServerMsg& m : msgs) {
        if (const T* t = std::get_if<T>(&m)) out.push_back(*t);
    }
    return out;
}

} // namespace

TEST(UiCodec, ClientMessagesRoundTrip) {
    const std::vector<ClientMsg> msgs{client::HandMove{{0.1, -0.2, 0.3}},
                                      client::Grasp{4},
                                      client::Release{2, std::nullopt},
                                      client::Release{std::nullopt, Point3{0.0, 0.1, 0.02}},
                                      client::Pause{},
                                      client::Resume{},
                                      client::Reset{}};
    for (const ClientMsg& m : msgs) {
        const std::string text = encode(m);
        EXPECT_EQ(json::parse(text).at("v"), kProtocolVersion) << text;
        EXPECT_EQ(decode_client(text), m) << text;
    }
}

TEST(UiCodec, ServerMessagesRoundTrip) {
    Session session(nine_block_mirror(), SimConfig{});
    for (int i = 0; i < 60; ++i) session.tick();
    const Snapshot snap = session.snapshot();
    EXPECT_EQ(std::get<Snapshot>(decode_server(encode(snap))), snap);

    const std::vector<ServerMsg> msgs{EventMsg{SimEvent{1.25, ev::Grasp{Agent::Robot, 3}}},
                                      MetricsMsg{compute_metrics(session.simulation().log(), 0.1)},
                                      ErrorMsg{"bad_message", "no"}};
    for (const ServerMsg& m : msgs) {
        const std::string text = encode(m);
        EXPECT_EQ(json::parse(text).at("v"), kProtocolVersion);
        EXPECT_EQ(decode_server(text), m) << text;
    }
}

TEST(UiCodec, MalformedMessagesAreRejected) {
    EXPECT_THROW(decode_client("nope"), DecodeError);
    EXPECT_THROW(decode_client("[1,2]"), DecodeError);
    EXPECT_THROW(decode_client(R"({"type":"pause"})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":2,"type":"pause"})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":1})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":1,"type":"teleport"})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":1,"type":"grasp"})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":1,"type":"grasp","workpiece":"three"})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":1,"type":"release"})"), DecodeError);
    EXPECT_THROW(decode_client(R"({"v":1,"type":"hand_move","target":[1,2]})"), DecodeError);
    EXPECT_THROW(decode_server(R"({"v":1,"type":"snapshot"})"), DecodeError);
}

TEST(UiCodec, UnknownFieldsAreIgnored) {
    EXPECT_EQ(decode_client(R"({"v":1,"type":"grasp","workpiece":3,"note":"left hand"})"), ClientMsg{client::Grasp{3}});
    EXPECT_EQ(decode_client(R"({"v":1,"type":"hand_move","target":[0,0.5,0.2],"extra":{}})"),
              (ClientMsg{client::HandMove{Point3{0.0, 0.5, 0.2}}}));
}

TEST(UiSession, SnapshotsArriveAtTheConfiguredRate) {
    Session session(nine_block_mirror(), SimConfig{}, 3);
    int snapshots = 0;
    for (int i = 0; i < 30; ++i) snapshots += static_cast<int>(of_type<Snapshot>(session.tick()).size());
    EXPECT_EQ(snapshots, 10);
    EXPECT_THROW(Session(nine_block_mirror(), SimConfig{}, 0), ValidationError);
}

TEST(UiSession, DistanceSamplesAreNotStreamed) {
    Session session(nine_block_mirror(), SimConfig{});
    for (int i = 0; i < 20; ++i) {
        for (const EventMsg& e : of_type<EventMsg>(session.tick())) EXPECT_FALSE(e.event.as<ev::DistanceSample>());
    }
}

TEST(UiSession, PauseStopsTheClock) {
    Session session(nine_block_mirror(), SimConfig{});
    session.tick();
    EXPECT_TRUE(session.on_message(client::Pause{}).empty());
    EXPECT_TRUE(session.tick().empty());
    EXPECT_EQ(session.snapshot().tick, 1u);
    session.on_message(client::Resume{});
    session.tick();
    EXPECT_EQ(session.snapshot().tick, 2u);
    session.disconnect();
    EXPECT_TRUE(session.paused());
}

TEST(UiSession, UnknownTargetsGetErrors) {
    Session session(nine_block_mirror(), SimConfig{});
    auto r = of_type<ErrorMsg>(session.on_message(client::Grasp{42}));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].code, "unknown_workpiece");
    r = of_type<ErrorMsg>(session.on_message(client::Release{42, std::nullopt}));
    ASSERT_EQ(r.size(), 1u);
    EXPECT_EQ(r[0].code, "unknown_slot");
}

TEST(UiSession, RejectedCommandsAreReported) {
    Session session(nine_block_mirror(), SimConfig{});
    session.on_message(client::Release{3, std::nullopt}); // nothing held
    const auto errors = of_type<ErrorMsg>(session.tick());
    ASSERT_EQ(errors.size(), 1u);
    EXPECT_EQ(errors[0].code, "command_rejected");
}

TEST(UiSession, HandFollowsMoves) {
    Session session(nine_block_mirror(), SimConfig{});
    const Point3 target{0.1, -0.4, 0.2};
    session.on_message(client::HandMove{target});
    for (int i = 0; i < 40; ++i) session.tick();
    EXPECT_EQ(session.snapshot().human.position, target);
}

TEST(UiSession, ResetStartsOver) {
    Session session(nine_block_mirror(), SimConfig{});
    for (int i = 0; i < 10; ++i) session.tick();
    const auto msgs = session.on_message(client::Reset{});
    const auto snaps = of_type<Snapshot>(msgs);
    ASSERT_EQ(snaps.size(), 1u);
    EXPECT_EQ(snaps[0].tick, 0u);
    EXPECT_EQ(snaps[0].workpieces, initial_world(nine_block_mirror()).workpieces);
}

TEST(UiSession, FinishingSendsMetrics) {
    Scenario s = nine_block_mirror();
    s.workpieces.clear();
    s.slots.clear();
    Session session(s, SimConfig{});
    const auto msgs = session.tick();
    EXPECT_EQ(of_type<MetricsMsg>(msgs).size(), 1u);
    ASSERT_EQ(of_type<Snapshot>(msgs).size(), 1u);
    EXPECT_TRUE(of_type<Snapshot>(msgs)[0].complete);
    EXPECT_TRUE(session.tick().empty());
}
