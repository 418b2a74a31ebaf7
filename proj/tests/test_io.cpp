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
#include "generators.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <functional>
#include <fstream>

using namespace hrcsim;

namespace {

EventLog scripted_run(std::uint64_t seed = 3) {
    ScriptedHuman h;
    for (int w : {1, 4, 7, 2}) h.steps.push_back({w, 0.5, ScriptAction::PickPlace});
    SimConfig c;
    c.seed = seed;
    return run(nine_block_mirror(), c, h);
}

std::string expect_throw_message(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    ADD_FAILURE() << "nothing thrown";
    return {};
}

std::filesystem::path temp_file(const std::string& name, const std::string& content) {
    const auto p = std::filesystem::temp_directory_path() / ("hrcsim_io_" + name);
    std::ofstream(p, std::ios::binary) << content;
    return p;
}

} // namespace

TEST(Io, ScenarioRoundTrips) {
    const Scenario s = nine_block_mirror();
    const Scenario back = parse_scenario(json(s).dump());
    EXPECT_EQ(back, s);
}

TEST(Io, ShippedScenarioIsTheBuiltInOne) {
    EXPECT_EQ(load_scenario(HRCSIM_SCENARIO_DIR "/nine_block_mirror.json"), nine_block_mirror());
}

TEST(Io, ValidationErrorsNameTheField) {
    json j = nine_block_mirror();
    j["workpieces"][0]["id"] = j["workpieces"][1]["id"];
    const std::string msg = expect_throw_message([&] { parse_scenario(j.dump()); });
    EXPECT_NE(msg.find("workpieces"), std::string::npos) << msg;

    json c = SimConfig{};
    c["dt"] = -0.1;
    EXPECT_THROW(parse_config(c.dump()), ValidationError);
    EXPECT_NE(expect_throw_message([&] { parse_config(c.dump()); }).find("dt"), std::string::npos);

    c = SimConfig{};
    c["dt"] = "fast";
    EXPECT_THROW(parse_config(c.dump()), ValidationError);
    EXPECT_THROW(parse_config("{not json"), ParseError);
}

TEST(Io, FutureScenarioVersionIsRejected) {
    json j = nine_block_mirror();
    j["version"] = kFormatVersion + 1;
    EXPECT_THROW(parse_scenario(j.dump()), VersionMismatch);
}

TEST(Io, LogRoundTripsByteForByte) {
    const EventLog log = scripted_run();
    const std::string text = log_to_string(log);
    const EventLog back = parse_log(text);
    EXPECT_EQ(back.events, log.events);
    ASSERT_TRUE(back.summary);
    EXPECT_EQ(back.summary->metrics, log.summary->metrics);
    EXPECT_EQ(log_to_string(back), text);
}

TEST(Io, RepeatedRunsWriteIdenticalBytes) {
    EXPECT_EQ(log_to_string(scripted_run(9)), log_to_string(scripted_run(9)));
}

TEST(Io, ReplayReproducesTheFinalWorldExactly) {
    const std::string text = log_to_string(scripted_run());
    Simulation sim(nine_block_mirror(), [] {
        SimConfig c;
        c.seed = 3;
        return c;
    }(), scripted_run().header.human);
    while (!sim.finished()) sim.step();
    const ReplayResult r = replay(parse_log(text));
    EXPECT_EQ(r.world, sim.world());
    EXPECT_TRUE(r.matches_stored);
}

TEST(Io, PartialReplayStopsAtTheRequestedTime) {
    const EventLog log = scripted_run();
    Simulation sim(log.header.scenario, log.header.config, log.header.human);
    while (sim.time() < 10.0) sim.step();
    EXPECT_EQ(reconstruct_world(log, sim.time()), sim.world());
}

TEST(Io, TruncatedLogLosesOnlyItsSummary) {
    const EventLog log = scripted_run();
    std::string text = log_to_string(log);
    const std::size_t end_line = text.rfind('\n', text.size() - 2) + 1;
    ASSERT_NE(text.find("run_end", end_line), std::string::npos);
    text.resize(end_line + 20); // cut inside run_end
    const EventLog back = parse_log(text);
    EXPECT_FALSE(back.summary);
    EXPECT_EQ(back.events, log.events);
    EXPECT_FALSE(replay(back).matches_stored);
}

TEST(Io, CorruptLogsAreReported) {
    const std::string text = log_to_string(scripted_run());
    const std::size_t second = text.find('\n') + 1;

    std::string garbled = text;
    garbled.insert(second, "{oops\n");
    EXPECT_THROW(parse_log(garbled), CorruptLog);

    EXPECT_THROW(parse_log(""), CorruptLog);
    EXPECT_THROW(parse_log("{\"format\":\"other\"}\n"), CorruptLog);
    EXPECT_THROW(parse_log(text + "{\"t\":1}\n"), CorruptLog);

    json head = json::parse(text.substr(0, second - 1));
    head["config"]["dt"] = 0.1;
    EXPECT_THROW(parse_log(head.dump() + "\n" + text.substr(second)), CorruptLog);

    head = json::parse(text.substr(0, second - 1));
    head["version"] = kFormatVersion + 1;
    EXPECT_THROW(parse_log(head.dump() + "\n" + text.substr(second)), VersionMismatch);
}

TEST(Io, ReplayRejectsImpossibleRecords) {
    EventLog log = scripted_run();
    for (SimEvent& e : log.events) {
        if (auto* p = std::get_if<ev::Place>(&e.data)) {
            p->slot = p->slot == 1 ? 2 : 1; // wrong slot for this piece
            break;
        }
    }
    EXPECT_THROW(reconstruct_world(log), CorruptLog);
}

TEST(Io, HumanSpecs) {
    EXPECT_EQ(load_human("idle", 0.05), HumanModel{ScriptedHuman{}});
    const HumanModel scripted = load_human("scripted:" HRCSIM_SCENARIO_DIR "/human_four_left.json", 0.05);
    ASSERT_TRUE(std::holds_alternative<ScriptedHuman>(scripted));
    EXPECT_EQ(std::get<ScriptedHuman>(scripted).steps.size(), 4u);

    const auto log_path = temp_file("run.jsonl", log_to_string(scripted_run()));
    const HumanModel pb = load_human("playback:" + log_path.string(), 0.05);
    ASSERT_TRUE(std::holds_alternative<PlaybackHuman>(pb));
    EXPECT_FALSE(std::get<PlaybackHuman>(pb).records.empty());

    EXPECT_THROW(load_human("robotic:x", 0.05), ValidationError);
    EXPECT_THROW(load_human("scripted", 0.05), ValidationError);
    EXPECT_THROW(load_human("scripted:" + temp_file("bad.json", "[{\"workpiece\":\"x\"}]").string(), 0.05),
                 ValidationError);
}
