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

#include <cstdint>
#include <vector>

#include "msim/core.hpp"
#include "msim/memman.hpp"

namespace msim {

/// Timing of one migration plan, measured from the moment the copy
/// engines start on it.
///
/// Pipelined: evictions run back to back on one engine while populations
/// run on the other; population j waits until j - free_pages victims are
/// gone. Serialized: each population is preceded by the eviction that makes
/// room for it, all on one engine.
class MigrationTimer {
public:
    MigrationTimer(const MigrationPlan& plan, const HwConfig& hw, bool pipelined);

    bool pipelined() const { return pipelined_; }
    double makespan() const { return makespan_; }
    /// Time at which the first k populated pages are resident.
    double populate_done(std::uint64_t k) const;

private:
    struct RunTiming {
        std::uint64_t first;  // global 1-based index of the run's first page
        std::uint64_t count;
        double stage_s;
        double before_s;      // completion time of the page preceding the run
    };

    double at(const RunTiming& run, std::uint64_t j) const;

    bool pipelined_;
    double evict_s_;
    std::uint64_t free_;
    std::vector<RunTiming> runs_;
    double makespan_ = 0.0;
};

double pipeline_time(const MigrationPlan& plan, const HwConfig& hw);
double sequential_time(const MigrationPlan& plan, const HwConfig& hw);

/// Offset after which a command needing `needs` may start: the time its
/// last needed populate page lands. Needed pages outside the plan fault
/// later and do not delay the start.
double early_start(const MigrationPlan& plan, const HwConfig& hw, const PageSet& needs,
                   bool pipelined = true);

}  // namespace msim
