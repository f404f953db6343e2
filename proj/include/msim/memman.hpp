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
#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "msim/core.hpp"
#include "msim/eviction_list.hpp"
#include "msim/page_set.hpp"
#include "msim/scheduler.hpp"

namespace msim {

/// One queued command as the per-task helper sees it.
struct HelperEntry {
    std::size_t command_index = 0;
    PageSet predicted;
    /// Predicted pages whose first use overwrites them (memcpy H2D targets):
    /// they need a mapping but no data transfer.
    PageSet overwrite;
    double latency_s = 0.0;
};

/// Per-task record of unexecuted commands and their predicted pages.
class HelperQueue {
public:
    explicit HelperQueue(TaskId task = 0) : task_(task) {}

    TaskId task() const { return task_; }
    void push(HelperEntry entry);
    /// Drop the oldest pending entry once its command has executed.
    void retire();

    std::size_t size() const { return entries_.size() - head_; }
    bool empty() const { return size() == 0; }
    /// Entry for absolute command index `idx`; idx must be pending.
    const HelperEntry& at(std::size_t idx) const;
    std::size_t first_index() const { return base_ + head_; }
    std::size_t end_index() const { return base_ + entries_.size(); }

    /// Latencies of all commands, executed ones included, for scheduling.
    std::span<const double> latencies() const { return latencies_; }

private:
    TaskId task_;
    std::vector<HelperEntry> entries_;
    std::vector<double> latencies_;
    std::size_t head_ = 0;
    std::size_t base_ = 0;
};

/// madvise: move the resident members of `pages` to the tail.
void madvise(EvictionList& list, const PageSet& pages);

struct ReorderStats {
    std::size_t calls = 0;
    std::uint64_t pages_advised = 0;
    double overhead_s = 0.0;
};

struct MadviseCost {
    double per_call_s = 0.0;
    double per_page_s = 0.0;
};

/// Pages a timeline entry touches, split by the command that first uses
/// them within the entry, in command order.
std::vector<PageSet> entry_first_use(const HelperQueue& helper, std::size_t cursor,
                                     std::size_t end);

/// Walks the timeline from its last entry to its first and madvises each
/// entry's pages, latest command first, so the list head ends up holding
/// the pages whose next use is farthest away. One call per entry.
ReorderStats reorder_for_opt(EvictionList& list, const Timeline& timeline,
                             const std::map<TaskId, const HelperQueue*>& helpers,
                             const MadviseCost& cost = {});

struct PopulateRun {
    PageId lo = 0;
    PageId hi = 0;
    /// false for pages that are allocated and mapped without moving data.
    bool transfer = true;

    std::uint64_t size() const { return hi - lo; }
    bool operator==(const PopulateRun&) const = default;
};

struct MigrationPlan {
    std::vector<PageRun> evict;
    std::vector<PopulateRun> populate;
    /// marks[i]: populate prefix (in pages) that must be resident before
    /// the i-th planned command may start.
    std::vector<std::uint64_t> marks;
    std::uint64_t free_pages = 0;
    bool truncated = false;
    /// Leading planned commands whose pages are all in the plan.
    std::size_t covered = 0;

    std::uint64_t evict_pages() const;
    std::uint64_t populate_pages() const;
    std::uint64_t transfer_pages() const;
    bool empty() const { return evict.empty() && populate.empty(); }
    PageSet populate_set() const;
    PageSet evict_set() const;
    std::string to_string() const;
};

/// Working set of the next planned commands, as the helper reports it.
struct PlannedCommand {
    PageSet predicted;
    PageSet overwrite;
};

/// Populate the non-resident planned pages in first-access order and pick
/// victims from the list head, never from the planned set itself. A set
/// larger than HBM keeps its capacity-sized prefix.
MigrationPlan plan_migration(const EvictionList& list, std::span<const PlannedCommand> commands,
                             std::uint64_t capacity_pages);

/// Convenience form for a single ordered working set.
MigrationPlan plan_migration(const EvictionList& list, const PageSet& working_set,
                             std::uint64_t capacity_pages);

/// Applies a plan: victims leave, populated pages join the tail in order.
void apply_plan(EvictionList& list, const MigrationPlan& plan);

struct OracleResult {
    std::uint64_t faults = 0;
    /// (position in sequence, evicted page) per eviction.
    std::vector<std::pair<std::size_t, PageId>> evictions;
};

/// Brute-force Belady OPT: on a miss with full frames, evict the resident
/// page whose next use is farthest (never-again first, then lowest id).
OracleResult belady_oracle(std::span<const PageId> sequence, std::size_t frames);

}  // namespace msim
