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
 * Files: scenario and config JSON, human model specs, and the JSON-lines event log.
 *
 * Log layout: one header object, one object per event, then a run_end object with the stored
 * metrics. A log without run_end (crash, kill) is readable and reported as truncated.
 */

#include "hrcsim/errors.hpp"
#include "hrcsim/kernel.hpp"
#include "hrcsim/serialization.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>

namespace hrcsim {

namespace detail {

inline std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw Error("cannot open " + path.string());
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline json parse_json(const std::string& text, const std::string& origin) {
    try {
        return json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(origin + ": " + e.what());
    }
}

/// Converts nlohmann type/key errors into a ValidationError naming the document.
template <class T>
T decode(const json& j, const std::string& origin) {
    try {
        return j.get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(origin, e.what());
    }
}

} // namespace detail

// --- scenario / config ----------------------------------------------------------

inline Scenario parse_scenario(const std::string& text, const std::string& origin = "scenario") {
    const json j = detail::parse_json(text, origin);
    if (j.contains("version") && j.at("version") != kFormatVersion) {
        throw VersionMismatch(origin + ": scenario version " + j.at("version").dump() + ", expected " +
                              std::to_string(kFormatVersion));
    }
    Scenario s = detail::decode<Scenario>(j, origin);
    s.validate();
    return s;
}

inline Scenario load_scenario(const std::filesystem::path& path) {
    return parse_scenario(detail::read_file(path), path.string());
}

inline void write_scenario(const Scenario& s, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    out << json(s).dump(2) << '\n';
}

inline SimConfig parse_config(const std::string& text, const std::string& origin = "config") {
    SimConfig c = detail::decode<SimConfig>(detail::parse_json(text, origin), origin);
    c.validate();
    return c;
}

inline SimConfig load_config(const std::filesystem::path& path) {
    return parse_config(detail::read_file(path), path.string());
}

// --- event log --------------------------------------------------------------------

inline json header_json(const LogHeader& h) {
    return {{"format", h.format}, {"version", h.version}, {"seed", h.seed},     {"config_hash", h.config_hash},
            {"scenario", h.scenario}, {"config", h.config}, {"human", h.human}};
}

inline json summary_json(const RunSummary& s) {
    return {{"kind", "run_end"},
            {"complete", s.complete},
            {"timed_out", s.timed_out},
            {"ticks", s.ticks},
            {"metrics", s.metrics}};
}

inline void write_log(const EventLog& log, std::ostream& out) {
    out << header_json(log.header).dump() << '\n';
    for (const SimEvent& e : log.events) {
        out << json(e).dump() << '\n';
    }
    if (log.summary) {
        out << summary_json(*log.summary).dump() << '\n';
    }
}

inline std::string log_to_string(const EventLog& log) {
    std::ostringstream out;
    write_log(log, out);
    return out.str();
}

inline void write_log(const EventLog& log, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw Error("cannot write " + path.string());
    }
    write_log(log, out);
}

/// Parses a log. A final line cut off mid-record is dropped; the log is then marked truncated
/// (no summary). Anything else that does not parse is corruption.
inline EventLog parse_log(const std::string& text, const std::string& origin = "log") {
    std::istringstream in(text);
    std::string line;
    std::size_t line_no = 0;
    EventLog log;

    if (!std::getline(in, line)) {
        throw CorruptLog(origin + ": empty log");
    }
    ++line_no;
    json head;
    try {
        head = json::parse(line);
    } catch (const json::parse_error&) {
        throw CorruptLog(origin + ": unreadable header");
    }
    if (head.value("format", std::string{}) != kLogFormat) {
        throw CorruptLog(origin + ": not an hrcsim log");
    }
    if (head.value("version", -1) != kFormatVersion) {
        throw VersionMismatch(origin + ": log version " + head.value("version", json()).dump() + ", expected " +
                              std::to_string(kFormatVersion));
    }
    try {
        log.header.seed = head.at("seed").get<std::uint64_t>();
        log.header.config_hash = head.at("config_hash").get<std::string>();
        log.header.scenario = head.at("scenario").get<Scenario>();
        log.header.config = head.at("config").get<SimConfig>();
        log.header.human = head.at("human").get<HumanModel>();
    } catch (const json::exception& e) {
        throw CorruptLog(origin + ": bad header: " + e.what());
    }
    if (content_hash(json(log.header.config)) != log.header.config_hash) {
        throw CorruptLog(origin + ": config hash mismatch");
    }

    bool ended = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        if (ended) {
            throw CorruptLog(origin + ":" + std::to_string(line_no) + ": record after run_end");
        }
        json j;
        try {
            j = json::parse(line);
        } catch (const json::parse_error&) {
            if (in.peek() == std::char_traits<char>::eof()) {
                break; // partially written final record
            }
            throw CorruptLog(origin + ":" + std::to_string(line_no) + ": unreadable record");
        }
        try {
            if (j.value("kind", std::string{}) == "run_end") {
                RunSummary s;
                s.complete = j.at("complete").get<bool>();
                s.timed_out = j.at("timed_out").get<bool>();
                s.ticks = j.at("ticks").get<std::uint64_t>();
                s.metrics = j.at("metrics").get<MetricsReport>();
                log.summary = s;
                ended = true;
            } else {
                log.events.push_back(j.get<SimEvent>());
            }
        } catch (const json::exception& e) {
            throw CorruptLog(origin + ":" + std::to_string(line_no) + ": " + e.what());
        }
    }
    return log;
}

inline EventLog read_log(const std::filesystem::path& path) {
    return parse_log(detail::read_file(path), path.string());
}

// --- replay -----------------------------------------------------------------------

/// The world change a log record stands for.
inline WorldEvent world_event_for(const SimEvent& e) {
    WorldEvent w{e.time, AdvanceTime{}};
    if (const auto* m = e.as<ev::Move>()) {
        w.payload = MoveEffector{m->agent, m->position};
    } else if (const auto* g = e.as<ev::Grasp>()) {
        w.payload = Grasp{g->agent, g->workpiece};
    } else if (const auto* p = e.as<ev::Place>()) {
        w.payload = Release{p->agent, p->slot};
    } else if (const auto* d = e.as<ev::Drop>()) {
        w.payload = Release{d->agent, d->requested_slot};
    } else if (const auto* a = e.as<ev::AgentActive>()) {
        w.payload = SetActivity{a->agent, a->start ? std::optional<std::string>(a->label) : std::nullopt};
    }
    return w;
}

/// Re-applies the log to the scenario's initial world, stopping after the last record with
/// time <= until. Throws CorruptLog when a record is illegal or disagrees with the result.
inline WorldState reconstruct_world(const EventLog& log, double until = std::numeric_limits<double>::infinity()) {
    WorldState world = initial_world(log.header.scenario);
    for (std::size_t i = 0; i < log.events.size(); ++i) {
        const SimEvent& e = log.events[i];
        if (e.time > until) break;
        try {
            apply_event_inplace(world, world_event_for(e));
        } catch (const Error& err) {
            throw CorruptLog("record " + std::to_string(i) + " at t=" + std::to_string(e.time) +
                             " cannot be replayed: " + err.what());
        }
        const bool mismatch = [&] {
            if (const auto* p = e.as<ev::Place>()) {
                const Workpiece* w = world.find_workpiece(p->workpiece);
                return w->status != WorkpieceStatus::Placed || w->placed_slot != p->slot;
            }
            if (const auto* d = e.as<ev::Drop>()) {
                const Workpiece* w = world.find_workpiece(d->workpiece);
                return w->status != WorkpieceStatus::OnTable || !(w->pose == d->position);
            }
            return false;
        }();
        if (mismatch) {
            throw CorruptLog("record " + std::to_string(i) + " at t=" + std::to_string(e.time) +
                             " disagrees with the replayed world");
        }
    }
    return world;
}

struct ReplayResult {
    WorldState world;
    ActivityTimeline timeline;
    MetricsReport metrics;
    /// Whether recomputed metrics equal the ones stored in the log (false if none stored).
    bool matches_stored = false;
};

inline ReplayResult replay(const EventLog& log) {
    ReplayResult r;
    r.world = reconstruct_world(log);
    r.timeline = activity_timeline(log.events);
    r.metrics = compute_metrics(log.events, log.header.config.collision_threshold);
    r.matches_stored = log.summary && log.summary->metrics == r.metrics;
    return r;
}

// --- human model specs --------------------------------------------------------------

/// "idle", "scripted:<file>" or "playback:<file>". A playback file may be a JSON record list,
/// a human model object, or an hrcsim log whose human track is extracted.
inline HumanModel load_human(const std::string& spec, double dt) {
    if (spec.empty() || spec == "idle") {
        return ScriptedHuman{};
    }
    const auto colon = spec.find(':');
    if (colon == std::string::npos) {
        throw ValidationError("human", "expected idle, scripted:<file> or playback:<file>, got '" + spec + "'");
    }
    const std::string kind = spec.substr(0, colon);
    const std::string path = spec.substr(colon + 1);
    if (kind != "scripted" && kind != "playback") {
        throw ValidationError("human", "unknown human model '" + kind + "'");
    }
    const std::string text = detail::read_file(path);
    if (kind == "scripted") {
        const json j = detail::parse_json(text, path);
        if (j.is_array()) return ScriptedHuman{detail::decode<std::vector<ScriptStep>>(j, path)};
        if (j.contains("kind")) return detail::decode<HumanModel>(j, path);
        return ScriptedHuman{detail::decode<std::vector<ScriptStep>>(j.at("steps"), path)};
    }
    const std::string first_line = text.substr(0, text.find('\n'));
    if (first_line.find("\"format\":\"" + kLogFormat + "\"") != std::string::npos) {
        return playback_from_log(parse_log(text, path), dt);
    }
    const json j = detail::parse_json(text, path);
    if (j.is_array()) return PlaybackHuman{detail::decode<std::vector<PlaybackRecord>>(j, path)};
    return detail::decode<HumanModel>(j, path);
}

} // namespace hrcsim
