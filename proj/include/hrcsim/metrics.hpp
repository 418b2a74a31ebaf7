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

#include "hrcsim/errors.hpp"
#include "hrcsim/events.hpp"

#include <algorithm>
#include <cstdio>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

namespace hrcsim {

/// Objective team-fluency metrics. Percentages are of the total task time.
struct MetricsReport {
    double robot_idle_pct = 100.0;
    double human_idle_pct = 100.0;
    double functional_delay_pct = 0.0;
    double concurrent_activity_pct = 0.0;
    int collisions = 0;
    int actions_robot = 0;
    int actions_human = 0;
    double completion_time = 0.0;
    bool complete = false;

    // Supplementary primitive counts.
    int grasps_robot = 0;
    int grasps_human = 0;
    int releases_robot = 0;
    int releases_human = 0;

    friend bool operator==(const MetricsReport&, const MetricsReport&) = default;
};

/// Half-open time interval [begin, end).
struct Interval {
    double begin = 0.0;
    double end = 0.0;

    friend bool operator==(const Interval&, const Interval&) = default;
    double length() const { return end - begin; }
};

namespace intervals {

/// Total length of the pairwise overlaps of two sorted, disjoint interval lists.
inline double overlap(std::span<const Interval> a, std::span<const Interval> b) {
    double total = 0.0;
    std::size_t i = 0;
    std::size_t j = 0;
    while (i < a.size() && j < b.size()) {
        const double lo = std::max(a[i].begin, b[j].begin);
        const double hi = std::min(a[i].end, b[j].end);
        if (hi > lo) total += hi - lo;
        (a[i].end < b[j].end) ? ++i : ++j;
    }
    return total;
}

inline double total(std::span<const Interval> a) {
    double t = 0.0;
    for (const Interval& iv : a) t += iv.length();
    return t;
}

/// Sorted union with touching intervals merged.
inline std::vector<Interval> merge(std::vector<Interval> all) {
    std::sort(all.begin(), all.end(), [](const Interval& x, const Interval& y) { return x.begin < y.begin; });
    std::vector<Interval> out;
    for (const Interval& iv : all) {
        if (!out.empty() && iv.begin <= out.back().end) {
            out.back().end = std::max(out.back().end, iv.end);
        } else {
            out.push_back(iv);
        }
    }
    return out;
}

} // namespace intervals

/// Per-agent activity intervals extracted from a log, clipped to [0, horizon].
struct ActivityTimeline {
    std::vector<Interval> robot;
    std::vector<Interval> human;
    double horizon = 0.0;
    bool complete = false;
};

inline ActivityTimeline activity_timeline(std::span<const SimEvent> log) {
    ActivityTimeline tl;
    std::optional<double> completed_at;
    double last = 0.0;
    for (const SimEvent& e : log) {
        if (e.time < last) {
            throw MalformedLog("event times not monotone at t=" + std::to_string(e.time));
        }
        last = e.time;
        if (!completed_at && e.as<ev::TaskComplete>()) {
            completed_at = e.time;
        }
    }
    tl.complete = completed_at.has_value();
    tl.horizon = completed_at.value_or(last);

    std::optional<double> open_robot;
    std::optional<double> open_human;
    for (const SimEvent& e : log) {
        if (e.time > tl.horizon) break;
        const auto* a = e.as<ev::AgentActive>();
        if (a == nullptr) continue;
        std::optional<double>& open = a->agent == Agent::Robot ? open_robot : open_human;
        std::vector<Interval>& out = a->agent == Agent::Robot ? tl.robot : tl.human;
        if (a->start) {
            if (open) {
                throw MalformedLog("overlapping activity for " + std::string(to_string(a->agent)) +
                                   " at t=" + std::to_string(e.time));
            }
            open = e.time;
        } else {
            if (!open) {
                throw MalformedLog("activity end without start for " + std::string(to_string(a->agent)) +
                                   " at t=" + std::to_string(e.time));
            }
            if (e.time > *open) out.push_back({*open, e.time});
            open.reset();
        }
    }
    if (open_robot && tl.horizon > *open_robot) tl.robot.push_back({*open_robot, tl.horizon});
    if (open_human && tl.horizon > *open_human) tl.human.push_back({*open_human, tl.horizon});
    return tl;
}

/// Total length of both-idle gaps that separate the end of one agent's activity from the start
/// of the other agent's. Gaps bounded by the same agent on both sides are idle time only.
inline double functional_delay(const ActivityTimeline& tl) {
    std::vector<Interval> all = tl.robot;
    all.insert(all.end(), tl.human.begin(), tl.human.end());
    const std::vector<Interval> busy = intervals::merge(std::move(all));

    auto ends_at = [](const std::vector<Interval>& ivs, double t) {
        return std::any_of(ivs.begin(), ivs.end(), [t](const Interval& iv) { return iv.end == t; });
    };
    auto starts_at = [](const std::vector<Interval>& ivs, double t) {
        return std::any_of(ivs.begin(), ivs.end(), [t](const Interval& iv) { return iv.begin == t; });
    };

    double delay = 0.0;
    for (std::size_t i = 0; i + 1 < busy.size(); ++i) {
        const double a = busy[i].end;
        const double b = busy[i + 1].begin;
        const bool robot_to_human = ends_at(tl.robot, a) && starts_at(tl.human, b);
        const bool human_to_robot = ends_at(tl.human, a) && starts_at(tl.robot, b);
        if (robot_to_human || human_to_robot) {
            delay += b - a;
        }
    }
    return delay;
}

/// Number of maximal runs of distance samples strictly below `threshold`.
inline int count_collisions(std::span<const SimEvent> log, double threshold, double horizon) {
    int count = 0;
    bool inside = false;
    for (const SimEvent& e : log) {
        if (e.time > horizon) break;
        const auto* d = e.as<ev::DistanceSample>();
        if (d == nullptr) continue;
        const bool below = d->distance < threshold;
        if (below && !inside) ++count;
        inside = below;
    }
    return count;
}

inline MetricsReport compute_metrics(std::span<const SimEvent> log, double collision_threshold) {
    const ActivityTimeline tl = activity_timeline(log);
    MetricsReport r;
    r.complete = tl.complete;
    r.completion_time = tl.horizon;

    struct Hand {
        std::optional<int> holding;
    } robot, human;
    for (const SimEvent& e : log) {
        if (e.time > tl.horizon) break;
        if (const auto* g = e.as<ev::Grasp>()) {
            Hand& h = g->agent == Agent::Robot ? robot : human;
            if (h.holding) {
                throw MalformedLog("unmatched grasp of workpiece " + std::to_string(*h.holding) + " by " +
                                   std::string(to_string(g->agent)));
            }
            h.holding = g->workpiece;
            ++(g->agent == Agent::Robot ? r.grasps_robot : r.grasps_human);
        } else if (const auto* p = e.as<ev::Place>()) {
            Hand& h = p->agent == Agent::Robot ? robot : human;
            if (h.holding != p->workpiece) {
                throw MalformedLog("place of workpiece " + std::to_string(p->workpiece) + " without grasp");
            }
            h.holding.reset();
            ++(p->agent == Agent::Robot ? r.releases_robot : r.releases_human);
            ++(p->agent == Agent::Robot ? r.actions_robot : r.actions_human);
        } else if (const auto* d = e.as<ev::Drop>()) {
            Hand& h = d->agent == Agent::Robot ? robot : human;
            if (h.holding != d->workpiece) {
                throw MalformedLog("drop of workpiece " + std::to_string(d->workpiece) + " without grasp");
            }
            h.holding.reset();
            ++(d->agent == Agent::Robot ? r.releases_robot : r.releases_human);
        }
    }

    r.collisions = count_collisions(log, collision_threshold, tl.horizon);

    const double T = tl.horizon;
    if (T <= 0.0) {
        return r;
    }
    const double pct = 100.0 / T;
    r.robot_idle_pct = (T - intervals::total(tl.robot)) * pct;
    r.human_idle_pct = (T - intervals::total(tl.human)) * pct;
    r.concurrent_activity_pct = intervals::overlap(tl.robot, tl.human) * pct;
    r.functional_delay_pct = functional_delay(tl) * pct;
    return r;
}

/// Fixed-width table, two columns.
inline std::string format_metrics_table(const MetricsReport& r) {
    std::string out;
    char line[96];
    auto row = [&](const char* name, const char* fmt, auto value) {
        char v[48];
        std::snprintf(v, sizeof v, fmt, value);
        std::snprintf(line, sizeof line, "%-28s %14s\n", name, v);
        out += line;
    };
    std::snprintf(line, sizeof line, "%-28s %14s\n", "metric", "value");
    out += line;
    out += std::string(43, '-') + "\n";
    row("robot_idle_pct", "%.2f", r.robot_idle_pct);
    row("human_idle_pct", "%.2f", r.human_idle_pct);
    row("functional_delay_pct", "%.2f", r.functional_delay_pct);
    row("concurrent_activity_pct", "%.2f", r.concurrent_activity_pct);
    row("collisions", "%d", r.collisions);
    row("actions_robot", "%d", r.actions_robot);
    row("actions_human", "%d", r.actions_human);
    row("completion_time_s", "%.2f", r.completion_time);
    row("complete", "%s", r.complete ? "yes" : "no");
    return out;
}

} // namespace hrcsim
