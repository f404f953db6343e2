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
#include <deque>
#include <iosfwd>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "msim/analyzer.hpp"
#include "msim/core.hpp"
#include "msim/eviction_list.hpp"
#include "msim/memman.hpp"
#include "msim/pipeline.hpp"
#include "msim/predictor.hpp"
#include "msim/scheduler.hpp"

namespace msim {

struct Mode {
    enum class Kind { UM, Proactive, Ideal };
    enum class Predictor { Template, Allocation, GroundTruth };

    Kind kind = Kind::UM;
    /// UM: pages brought in per fault.
    int prefetch_pages = 16;
    bool pipelined = true;
    bool early_start = true;
    Predictor predictor = Predictor::Template;

    static Mode um(int prefetch_pages = 16);
    static Mode proactive(Predictor p = Predictor::Template, bool pipelined = true, bool early_start = true);
    /// Exact working sets, pipelined with early start, free madvise.
    static Mode ideal();

    std::string name() const;
    void validate() const;
};

struct Metrics {
    double sim_time_s = 0.0;
    /// Sum of profiled latencies of executed commands.
    double work_s = 0.0;
    std::uint64_t commands = 0;
    std::uint64_t faults = 0;
    std::uint64_t fault_bytes = 0;
    std::uint64_t populate_bytes = 0;
    /// Pages mapped without a transfer (memcpy destinations).
    std::uint64_t mapped_bytes = 0;
    std::uint64_t migrated_bytes_h2d = 0;
    std::uint64_t migrated_bytes_d2h = 0;
    std::uint64_t completions = 0;
    std::map<TaskId, std::uint64_t> per_task_completions;
    double normalized_throughput = 0.0;
    double madvise_overhead_s = 0.0;
    std::uint64_t madvise_calls = 0;
    std::uint64_t plan_truncations = 0;
    std::uint64_t switches = 0;
    std::uint64_t plans = 0;
    std::uint64_t skipped_rules = 0;
    double fault_stall_s = 0.0;
    double migration_wait_s = 0.0;
    std::uint64_t max_resident_pages = 0;

    double throughput() const { return sim_time_s > 0 ? work_s / sim_time_s : 0.0; }
    double faults_per_completion() const;
    double migrated_bytes_per_completion() const;
};

struct SimEvent {
    enum class Kind { SaveRestore, Reorder, Migrate, Resume };
    Kind kind;
    double time_s;
    TaskId task;
    double duration_s = 0.0;
    std::uint64_t pages = 0;
};

const char* to_string(SimEvent::Kind k);

struct SimOptions {
    /// Stop at the first command boundary at or after this time; 0 runs
    /// every task to completion.
    double time_budget_s = 0.0;
    /// Descriptors for template prediction; empty means profile the
    /// simulated tasks themselves.
    std::vector<KernelDescriptor> descriptors;
    bool check_invariants = true;
    bool record_events = false;
    /// Per-switch eviction list and plan dump.
    std::ostream* dump = nullptr;
    std::size_t dump_max_runs = 16;
    /// Compute normalized_throughput against an exclusive in-HBM run.
    bool compute_reference = true;
};

/// One demand-paged command: faults missing pages in `prefetch_pages`
/// batches, appending them at the tail and evicting from the head. Hits
/// leave the list order unchanged.
struct UmOutcome {
    double duration_s = 0.0;
    std::uint64_t faults = 0;
    std::uint64_t faulted_pages = 0;
    std::uint64_t mapped_pages = 0;
    std::uint64_t evicted_pages = 0;
};

UmOutcome run_kernel_um(const Command& cmd, EvictionList& list, std::uint64_t capacity_pages,
                        const HwConfig& hw, int prefetch_pages);

class Engine {
public:
    Engine(std::vector<Task> tasks, Policy policy, Mode mode, HwConfig hw, SimOptions opts = {});
    ~Engine();
    Engine(const Engine&) = delete;
    Engine& operator=(const Engine&) = delete;

    /// Runs until every task finishes or the time budget is spent.
    const Metrics& run();
    /// Runs one timeslice; false once nothing is left to run.
    bool step();

    /// Adds commands to a live task; they are predicted immediately and
    /// the next context switch plans for them.
    void append_commands(TaskId task, std::vector<Command> cmds);

    const Metrics& metrics() const { return metrics_; }
    const EvictionList& eviction_list() const { return list_; }
    const std::vector<SimEvent>& events() const { return events_; }
    const Task& task(TaskId id) const;
    double now() const { return now_; }
    bool finished() const;
    /// Marks pages resident before the first step; must fit in HBM.
    void list_preload(const PageSet& pages);

private:
    struct State;
    std::unique_ptr<State> s_;
    Metrics metrics_;
    EvictionList list_;
    std::vector<SimEvent> events_;
    double now_ = 0.0;
};

Metrics simulate(std::vector<Task> tasks, const Policy& policy, const Mode& mode, const HwConfig& hw,
                 const SimOptions& opts = {});

/// Throughput of the same tasks with unlimited HBM and every page resident.
double reference_throughput(const std::vector<Task>& tasks, const Policy& policy, const HwConfig& hw,
                            double time_budget_s);

}  // namespace msim
