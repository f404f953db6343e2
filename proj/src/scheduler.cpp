/*
 * Copyright 2026 The msim Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "msim/scheduler.hpp"

#include <algorithm>
#include <map>
#include <sstream>

namespace msim {

double Policy::slice_for_level(int level) const {
    if (kind == Kind::Priority && level >= 0 &&
        static_cast<std::size_t>(level) < level_timeslice_s.size())
        return level_timeslice_s[static_cast<std::size_t>(level)];
    return timeslice_s;
}

void Policy::validate() const {
    if (!(timeslice_s > 0)) throw ConfigError("scheduler: timeslice must be positive");
    for (double s : level_timeslice_s)
        if (!(s > 0)) throw ConfigError("scheduler: level timeslices must be positive");
    if (horizon_rounds < 1) throw ConfigError("scheduler: horizon_rounds must be >= 1");
    if (switch_cost_s < 0) throw ConfigError("scheduler: switch cost must be non-negative");
}

std::size_t slice_end(std::span<const double> latencies, std::size_t cursor, double timeslice_s) {
    double used = 0.0;
    while (cursor < latencies.size() && used < timeslice_s) used += latencies[cursor++];
    return cursor;
}

namespace {

struct Projected {
    const TaskSchedInfo* info;
    std::size_t cursor;
    bool live() const { return cursor < info->latencies.size(); }
};

// Round-robin over `group` until `horizon` entries are emitted or every
// member has run dry.
void round_robin_fill(const Policy& policy, std::vector<Projected>& group, std::size_t horizon,
                      Timeline& out) {
    bool progress = true;
    while (out.size() < horizon && progress) {
        progress = false;
        for (auto& p : group) {
            if (out.size() >= horizon) break;
            if (!p.live()) continue;
            double slice = policy.slice_for_level(p.info->priority);
            out.push_back({p.info->id, slice, p.cursor});
            p.cursor = slice_end(p.info->latencies, p.cursor, slice);
            progress = true;
        }
    }
}

}  // namespace

Timeline build_timeline(const Policy& policy, const std::vector<TaskSchedInfo>& tasks,
                        std::size_t horizon_entries) {
    std::vector<Projected> live;
    for (const auto& t : tasks)
        if (t.runnable && t.cursor < t.latencies.size()) live.push_back({&t, t.cursor});
    Timeline out;
    if (live.empty()) return out;
    std::size_t horizon = horizon_entries != 0
                              ? horizon_entries
                              : live.size() * static_cast<std::size_t>(policy.horizon_rounds);
    if (policy.kind == Policy::Kind::RoundRobin) {
        round_robin_fill(policy, live, horizon, out);
        return out;
    }
    // Strict priority: a lower level only appears once every higher-level
    // task is projected to have finished.
    std::map<int, std::vector<Projected>> levels;
    for (const auto& p : live) levels[p.info->priority].push_back(p);
    for (auto& [level, group] : levels) {
        if (out.size() >= horizon) break;
        round_robin_fill(policy, group, horizon, out);
    }
    return out;
}

std::string to_string(const Timeline& timeline) {
    std::ostringstream os;
    os << '[';
    for (std::size_t i = 0; i < timeline.size(); ++i) {
        if (i) os << ", ";
        os << '(' << timeline[i].task << ',' << timeline[i].timeslice_s * 1e3 << "ms,@"
           << timeline[i].resume_cursor << ')';
    }
    os << ']';
    return os.str();
}

}  // namespace msim
