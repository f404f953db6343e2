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

#include "msim/pipeline.hpp"

#include <algorithm>

namespace msim {

MigrationTimer::MigrationTimer(const MigrationPlan& plan, const HwConfig& hw, bool pipelined)
    : pipelined_(pipelined && hw.copy_engines >= 2),
      evict_s_(hw.evict_stage_s()),
      free_(plan.free_pages) {
    double transfer_s = hw.populate_stage_s();
    double map_only_s = hw.per_page_map_s;
    std::uint64_t next = 1;
    double done = 0.0;
    for (const auto& r : plan.populate) {
        if (r.size() == 0) continue;
        RunTiming run{next, r.size(), r.transfer ? transfer_s : map_only_s, done};
        runs_.push_back(run);
        next += run.count;
        done = at(run, next - 1);
    }
    double evict_total = static_cast<double>(plan.evict_pages()) * evict_s_;
    makespan_ = pipelined_ ? std::max(done, evict_total) : done;
    // Serialized evictions beyond the populate count (never produced by
    // plan_migration, but accepted) still take engine time.
    if (!pipelined_) {
        std::uint64_t interleaved = next - 1 > free_ ? next - 1 - free_ : 0;
        std::uint64_t extra = plan.evict_pages() > interleaved ? plan.evict_pages() - interleaved : 0;
        makespan_ += static_cast<double>(extra) * evict_s_;
    }
}

double MigrationTimer::at(const RunTiming& run, std::uint64_t j) const {
    auto evicted_by = [&](std::uint64_t k) {
        return k > free_ ? static_cast<double>(k - free_) * evict_s_ : 0.0;
    };
    std::uint64_t a = run.first;
    if (!pipelined_) {
        // Each page pays its own stage plus the eviction that freed its slot.
        return run.before_s + static_cast<double>(j - a + 1) * run.stage_s + evicted_by(j) -
               evicted_by(a - 1);
    }
    // P_j = max(P_{a-1} + (j-a+1)p, max_k R_k + (j-k+1)p) with R_k the
    // release time of slot k; the inner term is piecewise linear in k with
    // a single break at free_, so only the piece endpoints matter.
    double p = run.stage_s;
    double best = run.before_s + static_cast<double>(j - a + 1) * p;
    std::uint64_t lo_f = std::clamp<std::uint64_t>(free_, a, j);
    std::uint64_t hi_f = std::clamp<std::uint64_t>(free_ + 1, a, j);
    for (std::uint64_t k : {a, lo_f, hi_f, j})
        best = std::max(best, evicted_by(k) + static_cast<double>(j - k + 1) * p);
    return best;
}

double MigrationTimer::populate_done(std::uint64_t k) const {
    if (k == 0 || runs_.empty()) return 0.0;
    auto it = std::upper_bound(runs_.begin(), runs_.end(), k,
                               [](std::uint64_t v, const RunTiming& r) { return v < r.first; });
    --it;
    std::uint64_t last = it->first + it->count - 1;
    return at(*it, std::min(k, last));
}

double pipeline_time(const MigrationPlan& plan, const HwConfig& hw) {
    return MigrationTimer(plan, hw, true).makespan();
}

double sequential_time(const MigrationPlan& plan, const HwConfig& hw) {
    return MigrationTimer(plan, hw, false).makespan();
}

double early_start(const MigrationPlan& plan, const HwConfig& hw, const PageSet& needs,
                   bool pipelined) {
    if (needs.empty()) return 0.0;
    std::uint64_t position = 0;
    std::uint64_t required = 0;
    for (const auto& r : plan.populate) {
        PageSet hit = needs.intersection(PageSet::from_run(r.lo, r.hi));
        if (!hit.empty()) required = position + (hit.runs().back().hi - r.lo);
        position += r.size();
    }
    return MigrationTimer(plan, hw, pipelined).populate_done(required);
}

}  // namespace msim
