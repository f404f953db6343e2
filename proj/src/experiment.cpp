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

#include "msim/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "msim/trace.hpp"
#include "msim/workload.hpp"

namespace msim {

namespace {

std::uint64_t footprint(const std::vector<Task>& tasks, std::uint64_t page_size) {
    std::uint64_t pages = 0;
    for (const auto& t : tasks) pages += allocation_pages(t, page_size).size();
    return pages * page_size;
}

}  // namespace

ScenarioInstance instantiate(const ScenarioConfig& cfg, double ratio) {
    ScenarioInstance inst;
    inst.hw = cfg.hw;
    inst.ratio = ratio;
    const WorkloadSpec& w = cfg.workload;
    const std::uint64_t page = cfg.hw.page_size_bytes;
    bool fixed_size = false;
    switch (w.kind) {
        case WorkloadSpec::Kind::Microbench: {
            MicrobenchParams p = w.microbench;
            p.hbm_bytes = cfg.hw.hbm_capacity_bytes;
            p.ratio = ratio > 0 ? ratio : 1.0;
            p.seed = cfg.seed;
            p.page_size = page;
            inst.tasks = gen_microbench(p);
            break;
        }
        case WorkloadSpec::Kind::LlmMix: {
            LlmMixParams p = w.llm_mix;
            p.hbm_bytes = cfg.hw.hbm_capacity_bytes;
            p.ratio = ratio > 0 ? ratio : 1.0;
            p.seed = cfg.seed;
            p.page_size = page;
            inst.tasks = gen_llm_mix(p);
            break;
        }
        case WorkloadSpec::Kind::VectorAdd: {
            const VectorAddParams& p = w.vector_add;
            for (std::uint32_t i = 0; i < p.tasks; ++i) {
                WorkloadOptions o;
                o.task_id = i;
                o.seed = cfg.seed + i;
                o.page_size = page;
                o.indirect_rate = p.indirect_rate;
                inst.tasks.push_back(gen_vector_add(p.elems, p.elem_bytes, p.iterations, o));
            }
            fixed_size = true;
            break;
        }
        case WorkloadSpec::Kind::Trace: {
            std::set<TaskId> ids;
            for (const auto& path : w.trace_paths) {
                Task t = load_trace(path, page);
                if (!ids.insert(t.id).second)
                    throw ConfigError("trace '" + path + "': task id " + std::to_string(t.id) +
                                      " already used by another trace");
                inst.tasks.push_back(std::move(t));
            }
            fixed_size = true;
            break;
        }
    }
    inst.footprint_bytes = footprint(inst.tasks, page);
    if (fixed_size && ratio > 0) {
        double pages = std::ceil(static_cast<double>(inst.footprint_bytes / page) / ratio);
        inst.hw.hbm_capacity_bytes = std::max<std::uint64_t>(1, static_cast<std::uint64_t>(pages)) * page;
    }
    return inst;
}

double PointResult::faults_per_task() const {
    return tasks ? static_cast<double>(metrics.faults) / static_cast<double>(tasks) : 0.0;
}

double PointResult::migrated_bytes_per_task() const {
    if (!tasks) return 0.0;
    return static_cast<double>(metrics.migrated_bytes_h2d + metrics.migrated_bytes_d2h) /
           static_cast<double>(tasks);
}

Metrics window_delta(const Metrics& a, const Metrics& b) {
    Metrics d = b;
    d.sim_time_s = b.sim_time_s - a.sim_time_s;
    d.work_s = b.work_s - a.work_s;
    d.commands = b.commands - a.commands;
    d.faults = b.faults - a.faults;
    d.fault_bytes = b.fault_bytes - a.fault_bytes;
    d.populate_bytes = b.populate_bytes - a.populate_bytes;
    d.mapped_bytes = b.mapped_bytes - a.mapped_bytes;
    d.migrated_bytes_h2d = b.migrated_bytes_h2d - a.migrated_bytes_h2d;
    d.migrated_bytes_d2h = b.migrated_bytes_d2h - a.migrated_bytes_d2h;
    d.completions = b.completions - a.completions;
    for (auto& [id, n] : d.per_task_completions) {
        auto it = a.per_task_completions.find(id);
        if (it != a.per_task_completions.end()) n -= it->second;
    }
    d.madvise_overhead_s = b.madvise_overhead_s - a.madvise_overhead_s;
    d.madvise_calls = b.madvise_calls - a.madvise_calls;
    d.plan_truncations = b.plan_truncations - a.plan_truncations;
    d.switches = b.switches - a.switches;
    d.plans = b.plans - a.plans;
    d.skipped_rules = b.skipped_rules - a.skipped_rules;
    d.fault_stall_s = b.fault_stall_s - a.fault_stall_s;
    d.migration_wait_s = b.migration_wait_s - a.migration_wait_s;
    d.normalized_throughput = 0.0;
    return d;
}

PointResult run_point(const ScenarioConfig& cfg, const ScenarioInstance& inst, const Mode& mode) {
    SimOptions o;
    o.time_budget_s = cfg.time_budget_s;
    o.compute_reference = false;
    Engine e(inst.tasks, cfg.policy, mode, inst.hw, o);
    PointResult r;
    r.scenario = cfg.name;
    r.ratio = inst.ratio;
    r.mode = mode.name();
    if (mode.kind == Mode::Kind::UM && mode.prefetch_pages != Mode::um().prefetch_pages)
        r.mode += ":" + std::to_string(mode.prefetch_pages);
    r.tasks = inst.tasks.size();
    if (cfg.warmup_s > 0) {
        while (e.now() < cfg.warmup_s && e.step()) {
        }
        Metrics start = e.metrics();
        start.sim_time_s = e.now();
        e.run();
        r.metrics = window_delta(start, e.metrics());
    } else {
        r.metrics = e.run();
    }
    double ref = reference_throughput(inst.tasks, cfg.policy, inst.hw, cfg.time_budget_s);
    r.normalized_throughput = ref > 0 ? r.metrics.throughput() / ref : 0.0;
    r.metrics.normalized_throughput = r.normalized_throughput;
    return r;
}

std::vector<PointResult> run_sweep(const ScenarioConfig& cfg, const std::vector<double>& ratios,
                                   unsigned jobs) {
    std::vector<ScenarioInstance> insts;
    for (double ratio : ratios) insts.push_back(instantiate(cfg, ratio));
    const std::size_t n_modes = cfg.modes.size();
    const std::size_t n = insts.size() * n_modes;
    std::vector<PointResult> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::mutex error_mu;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = run_point(cfg, insts[i / n_modes], cfg.modes[i % n_modes]);
            } catch (...) {
                std::lock_guard<std::mutex> lock(error_mu);
                if (!error) error = std::current_exception();
            }
        }
    };
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
        for (auto& t : pool) t.join();
    }
    if (error) std::rethrow_exception(error);
    // Slots are indexed by (ratio, mode), so the order is already the key order.
    std::stable_sort(out.begin(), out.end(),
                     [](const PointResult& a, const PointResult& b) { return a.ratio < b.ratio; });
    return out;
}

}  // namespace msim
