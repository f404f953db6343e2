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

#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "msim/core.hpp"

namespace msim {

struct Policy {
    enum class Kind { RoundRobin, Priority };
    Kind kind = Kind::RoundRobin;
    double timeslice_s = 5e-3;
    /// Priority only: timeslice per level, level 0 first. Levels beyond
    /// the list fall back to timeslice_s.
    std::vector<double> level_timeslice_s;
    /// Timeline length in full rounds over the runnable tasks.
    int horizon_rounds = 2;
    /// Architectural save/restore cost charged on every real switch.
    double switch_cost_s = 50e-6;

    double slice_for_level(int level) const;
    void validate() const;

    static Policy round_robin(double timeslice_s) { return {Kind::RoundRobin, timeslice_s, {}, 2, 50e-6}; }
    static Policy priority(std::vector<double> per_level) {
        Policy p;
        p.kind = Kind::Priority;
        p.level_timeslice_s = std::move(per_level);
        if (!p.level_timeslice_s.empty()) p.timeslice_s = p.level_timeslice_s.back();
        return p;
    }
};

struct TimelineEntry {
    TaskId task = 0;
    double timeslice_s = 0.0;
    std::size_t resume_cursor = 0;

    bool operator==(const TimelineEntry&) const = default;
};

using Timeline = std::vector<TimelineEntry>;

/// Scheduler-visible state of one task. `latencies` covers every command
/// of the task; `cursor` is the next unexecuted one.
struct TaskSchedInfo {
    TaskId id = 0;
    int priority = 0;
    std::size_t cursor = 0;
    std::span<const double> latencies;
    bool runnable = true;
};

/// One past the last command that starts within a timeslice beginning at
/// `cursor`: commands run while the accumulated latency is below the slice.
std::size_t slice_end(std::span<const double> latencies, std::size_t cursor, double timeslice_s);

/// Builds the planned task order. `tasks` is in run-queue order: the first
/// runnable entry is the next task to run. A horizon of 0 selects the
/// policy default (horizon_rounds full rounds).
Timeline build_timeline(const Policy& policy, const std::vector<TaskSchedInfo>& tasks,
                        std::size_t horizon_entries = 0);

std::string to_string(const Timeline& timeline);

}  // namespace msim
