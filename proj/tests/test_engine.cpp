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


#include <random>
#include <sstream>

#include "doctest.h"
#include "msim/engine.hpp"
#include "msim/presets.hpp"
#include "msim/workload.hpp"

using msim::Command;
using msim::CommandKind;
using msim::Metrics;
using msim::Mode;
using msim::PageId;
using msim::Policy;
using msim::Task;

namespace {

constexpr std::uint64_t kPage = 4096;

msim::HwConfig small_hw(std::uint64_t frames) {
    msim::HwConfig hw = msim::rtx5080();
    hw.hbm_capacity_bytes = frames * kPage;
    return hw;
}

// One task touching one page per command in the given order.
Task page_sequence_task(const std::vector<PageId>& seq, std::uint64_t pages) {
    Task t;
    t.id = 0;
    msim::Addr base = 1ull << 40;
    t.allocations.push_back({0, base, pages * kPage, 0});
    for (PageId p : seq) {
        Command c;
        c.kernel_name = "touch";
        c.launch_args = {msim::LaunchArg::u64(base + p * kPage)};
        c.latency_s = 1e-3;
        c.ground_truth_access = {{base + p * kPage, 256}};
        c.job_end = true;
        t.commands.push_back(c);
    }
    return t;
}

std::vector<PageId> event_pages(const std::vector<PageId>& seq) {
    std::vector<PageId> out;
    for (PageId p : seq) out.push_back((1ull << 40) / kPage + p);
    return out;
}

Metrics run_one(const Task& t, const Mode& mode, std::uint64_t frames, double slice = 1e3) {
    msim::SimOptions o;
    o.compute_reference = false;
    return msim::simulate({t}, Policy::round_robin(slice), mode, small_hw(frames), o);
}

std::uint64_t loads(const Metrics& m) { return (m.populate_bytes + m.fault_bytes) / kPage; }

}  // namespace

TEST_CASE("engine: proactive single task matches the Belady oracle") {
    std::mt19937_64 rng(2026);
    for (int inst = 0; inst < 200; ++inst) {
        std::uniform_int_distribution<int> len(1, 512), distinct(1, 64), frames(1, 8);
        int k = distinct(rng);
        std::uint64_t f = static_cast<std::uint64_t>(frames(rng));
        std::uniform_int_distribution<int> pick(0, k - 1);
        std::vector<PageId> seq;
        int n = len(rng);
        for (int j = 0; j < n; ++j) seq.push_back(static_cast<PageId>(pick(rng)));
        Task t = page_sequence_task(seq, 64);
        auto opt = msim::belady_oracle(event_pages(seq), f);
        Metrics pro = run_one(t, Mode::proactive(Mode::Predictor::GroundTruth), f);
        INFO("instance " << inst << " frames " << f << " len " << n);
        CHECK(pro.faults == 0);
        CHECK(loads(pro) == opt.faults);
        Metrics lru = run_one(t, Mode::um(1), f);
        CHECK(opt.faults <= lru.faults);
        CHECK(lru.max_resident_pages <= f);
    }
}

namespace {

bool same(const Metrics& a, const Metrics& b) {
    return a.sim_time_s == b.sim_time_s && a.work_s == b.work_s && a.faults == b.faults &&
           a.commands == b.commands && a.migrated_bytes_h2d == b.migrated_bytes_h2d &&
           a.migrated_bytes_d2h == b.migrated_bytes_d2h && a.completions == b.completions &&
           a.per_task_completions == b.per_task_completions &&
           a.normalized_throughput == b.normalized_throughput &&
           a.madvise_overhead_s == b.madvise_overhead_s;
}

std::vector<Task> small_microbench(double ratio, std::uint64_t hbm) {
    msim::MicrobenchParams mp;
    mp.hbm_bytes = hbm;
    mp.ratio = ratio;
    mp.matmul_dim = 1024;
    mp.vecadd_bytes_per_s = 100e9;
    mp.iterations = 400;
    return msim::gen_microbench(mp);
}

msim::HwConfig hw_with_hbm(std::uint64_t hbm) {
    msim::HwConfig hw = msim::rtx5080();
    hw.hbm_capacity_bytes = hbm;
    return hw;
}

}  // namespace

TEST_CASE("engine: zero tasks give zero metrics") {
    Metrics m = msim::simulate({}, Policy::round_robin(1e-3), Mode::proactive(), msim::rtx5080());
    CHECK(m.sim_time_s == 0.0);
    CHECK(m.commands == 0);
    CHECK(m.faults == 0);
    CHECK(m.migrated_bytes_h2d == 0);
    CHECK(m.normalized_throughput == 0.0);
}

TEST_CASE("engine: UM fault cost and effective fault bandwidth") {
    msim::EvictionList list;
    Task t = page_sequence_task({0}, 1);
    msim::HwConfig hw = msim::rtx5080();
    auto out = msim::run_kernel_um(t.commands[0], list, hw.hbm_pages(), hw, 1);
    CHECK(out.faults == 1);
    CHECK(out.duration_s - t.commands[0].latency_s == doctest::Approx(33.14e-6).epsilon(1e-9));
    double bw = 4096.0 / (out.duration_s - t.commands[0].latency_s);
    CHECK(bw == doctest::Approx(0.12e9).epsilon(0.05));
    // A resident page costs nothing extra.
    auto again = msim::run_kernel_um(t.commands[0], list, hw.hbm_pages(), hw, 1);
    CHECK(again.faults == 0);
    CHECK(again.duration_s == t.commands[0].latency_s);
    // Batches of 4: 9 missing pages take 3 faults.
    msim::EvictionList l2;
    Command c = t.commands[0];
    c.ground_truth_access = {{t.allocations[0].base, 9 * kPage}};
    t.allocations[0].size = 9 * kPage;
    auto b = msim::run_kernel_um(c, l2, 100, hw, 4);
    CHECK(b.faults == 3);
    CHECK(b.faulted_pages == 9);
    CHECK(b.duration_s - c.latency_s == doctest::Approx(3 * (31.79e-6 + 4 * 1.35e-6)));
}

TEST_CASE("engine: UM eviction keeps the command's own pages") {
    msim::EvictionList list;
    msim::HwConfig hw = msim::rtx5080();
    Task t = page_sequence_task({0, 1, 2, 3}, 4);
    for (const auto& c : t.commands) msim::run_kernel_um(c, list, 2, hw, 1);
    CHECK(list.size() == 2);
    CHECK(list.order() == std::vector<PageId>{(1ull << 40) / kPage + 2, (1ull << 40) / kPage + 3});
}

TEST_CASE("engine: a lone task fitting in HBM migrates once") {
    Task t = page_sequence_task({0, 1, 2, 3, 0, 1, 2, 3, 0, 1, 2, 3}, 4);
    msim::SimOptions o;
    o.record_events = true;
    o.compute_reference = false;
    // The first 4.5 ms slice covers every page the task ever touches.
    msim::Engine e({t}, Policy::round_robin(4.5e-3), Mode::proactive(Mode::Predictor::GroundTruth),
                   small_hw(8), o);
    e.run();
    int saves = 0, migrates = 0;
    for (const auto& ev : e.events()) {
        saves += ev.kind == msim::SimEvent::Kind::SaveRestore;
        migrates += ev.kind == msim::SimEvent::Kind::Migrate;
    }
    CHECK(saves == 1);
    CHECK(migrates == 1);
    CHECK(e.metrics().switches == 1);
    CHECK(e.metrics().faults == 0);
    CHECK(e.metrics().populate_bytes == 4 * kPage);
    CHECK(e.metrics().completions == 12);
}

TEST_CASE("engine: determinism and conservation across modes") {
    const std::uint64_t hbm = 256ull << 20;
    auto tasks = small_microbench(2.0, hbm);
    msim::SimOptions o;
    o.time_budget_s = 2.0;
    for (Mode m : {Mode::um(16), Mode::proactive(), Mode::proactive(Mode::Predictor::Allocation),
                   Mode::proactive(Mode::Predictor::Template, false, false), Mode::ideal()}) {
        INFO(m.name());
        Metrics a = msim::simulate(tasks, Policy::round_robin(0.02), m, hw_with_hbm(hbm), o);
        Metrics b = msim::simulate(tasks, Policy::round_robin(0.02), m, hw_with_hbm(hbm), o);
        CHECK(same(a, b));
        CHECK(a.migrated_bytes_h2d == a.fault_bytes + a.populate_bytes);
        CHECK(a.max_resident_pages <= hbm / kPage);
        CHECK(a.normalized_throughput > 0.0);
        CHECK(a.normalized_throughput <= 1.0 + 1e-9);
        CHECK(a.sim_time_s > 0.0);
    }
}

TEST_CASE("engine: mode dominance when oversubscribed") {
    const std::uint64_t hbm = 256ull << 20;
    for (double r : {1.5, 2.0, 3.0}) {
        auto tasks = small_microbench(r, hbm);
        msim::SimOptions o;
        o.time_budget_s = 3.0;
        auto run = [&](const Mode& m) {
            return msim::simulate(tasks, Policy::round_robin(0.02), m, hw_with_hbm(hbm), o).normalized_throughput;
        };
        double um = run(Mode::um(128)), tmpl = run(Mode::proactive()),
               alloc = run(Mode::proactive(Mode::Predictor::Allocation)), ideal = run(Mode::ideal());
        INFO("ratio " << r << " um " << um << " alloc " << alloc << " tmpl " << tmpl << " ideal " << ideal);
        CHECK(ideal >= tmpl);
        CHECK(tmpl >= alloc);
        CHECK(tmpl > um);
    }
}

TEST_CASE("engine: early start never slows the vector add scenario") {
    msim::WorkloadOptions wo;
    wo.indirect_rate = 0;
    wo.kernels_per_iteration = 8;
    std::vector<Task> tasks;
    for (msim::TaskId id = 0; id < 3; ++id) {
        wo.task_id = id;
        tasks.push_back(msim::gen_vector_add(4u << 20, 4, 20, wo));
    }
    const std::uint64_t hbm = 96ull << 20;
    msim::SimOptions o;
    o.compute_reference = false;
    for (bool pipelined : {true, false}) {
        Metrics on = msim::simulate(tasks, Policy::round_robin(5e-3),
                                    Mode::proactive(Mode::Predictor::Template, pipelined, true), hw_with_hbm(hbm), o);
        Metrics off = msim::simulate(tasks, Policy::round_robin(5e-3),
                                     Mode::proactive(Mode::Predictor::Template, pipelined, false), hw_with_hbm(hbm), o);
        CHECK(on.sim_time_s < off.sim_time_s);
        CHECK(on.completions == off.completions);
    }
}

TEST_CASE("engine: zero faults without indirect accesses when slices fit") {
    const std::uint64_t hbm = 256ull << 20;
    for (double r : {0.8, 1.5, 3.0}) {
        auto tasks = small_microbench(r, hbm);
        msim::SimOptions o;
        o.time_budget_s = 2.0;
        Metrics m = msim::simulate(tasks, Policy::round_robin(0.02), Mode::proactive(), hw_with_hbm(hbm), o);
        CHECK(m.plan_truncations == 0);
        CHECK(m.faults == 0);
        CHECK(m.commands > 0);
    }
}

TEST_CASE("engine: planted indirect accesses fault in proactive mode") {
    msim::WorkloadOptions wo;
    wo.indirect_rate = 0.5;
    wo.seed = 3;
    // No prologue copies, so the lookup table is not mapped up front.
    wo.emit_memcpy = false;
    Task t = msim::gen_vector_add(1u << 16, 4, 50, wo);
    std::uint64_t planted = 0;
    for (const auto& c : t.commands) planted += !c.indirect_access.empty();
    REQUIRE(planted > 0);
    msim::SimOptions o;
    o.compute_reference = false;
    Metrics m = msim::simulate({t}, Policy::round_robin(1e-3), Mode::proactive(), msim::rtx5080(), o);
    // The lookup table fits; each distinct page faults once at most.
    CHECK(m.faults > 0);
    CHECK(m.faults <= 16);
    Metrics exact = msim::simulate({t}, Policy::round_robin(1e-3), Mode::ideal(), msim::rtx5080(), o);
    CHECK(exact.faults == 0);
}

TEST_CASE("engine: append_commands matches a pre-declared decode loop") {
    msim::LlmParams p;
    p.layers = 4;
    p.weight_bytes_per_layer = 8u << 20;
    p.kv_max_bytes = 16u << 20;
    p.bytes_per_token = 16384;
    p.decode_steps = 120;
    p.kv_used_fraction_schedule.clear();
    for (std::uint32_t s = 0; s < p.decode_steps; ++s) p.kv_used_fraction_schedule.push_back(0.1 + 0.005 * s);
    std::vector<Task> full;
    msim::WorkloadOptions wo;
    wo.indirect_rate = 0;
    for (msim::TaskId id = 0; id < 3; ++id) {
        wo.task_id = id;
        full.push_back(msim::gen_llm_like(p, wo));
    }
    const std::uint64_t hbm = 160ull << 20;
    Policy pol = Policy::round_robin(5e-4);
    msim::SimOptions o;
    o.compute_reference = false;
    Metrics pre = msim::simulate(full, pol, Mode::proactive(), hw_with_hbm(hbm), o);

    // Same tasks holding only their prologue and first step; later steps
    // arrive one at a time while the task still has queued work.
    const std::size_t per_step = p.layers;
    std::vector<Task> partial = full;
    std::vector<std::size_t> prologue(3);
    for (auto& t : partial) {
        std::size_t head = t.commands.size() - per_step * p.decode_steps;
        prologue[t.id] = head;
        t.commands.resize(head + per_step);
    }
    // Templates come from the full run's traces, as a profiling pass would give.
    std::vector<msim::KernelDescriptor> descs;
    for (const auto& t : full)
        for (auto& d : msim::analyze_task(t)) descs.push_back(std::move(d));
    o.descriptors = descs;
    msim::Engine e(partial, pol, Mode::proactive(), hw_with_hbm(hbm), o);
    std::vector<std::uint32_t> next(3, 1);
    auto feed = [&] {
        for (msim::TaskId id = 0; id < 3; ++id) {
            const Task& t = e.task(id);
            while (next[id] < p.decode_steps && t.commands.size() - t.cursor < 16 * per_step) {
                std::size_t from = prologue[id] + per_step * next[id];
                std::vector<Command> step(full[id].commands.begin() + static_cast<std::ptrdiff_t>(from),
                                          full[id].commands.begin() + static_cast<std::ptrdiff_t>(from + per_step));
                e.append_commands(id, std::move(step));
                ++next[id];
            }
        }
    };
    feed();
    int late_appends = 0;
    while (e.step()) {
        auto before = next;
        feed();
        late_appends += before != next;
    }
    CHECK(late_appends > 10);
    const Metrics& app = e.metrics();
    CHECK(app.completions == pre.completions);
    CHECK(app.sim_time_s == doctest::Approx(pre.sim_time_s).epsilon(0.10));
    CHECK_THROWS_AS(e.append_commands(0, full[0].commands), msim::Error);
}

TEST_CASE("engine: appending nothing changes nothing") {
    Task t = page_sequence_task({0, 1, 2}, 3);
    msim::SimOptions o;
    o.compute_reference = false;
    Metrics ref = msim::simulate({t}, Policy::round_robin(1e-3), Mode::proactive(), small_hw(2), o);
    msim::Engine e({t}, Policy::round_robin(1e-3), Mode::proactive(), small_hw(2), o);
    e.append_commands(0, {});
    CHECK(same(e.run(), ref));
}

TEST_CASE("engine: priority preempts at a command boundary") {
    Task lo = page_sequence_task(std::vector<PageId>(20, 0), 1);
    lo.priority = 1;
    Task hi = page_sequence_task({1, 1}, 2);
    hi.id = 1;
    hi.priority = 0;
    hi.arrival_s = 3.5e-3;
    for (auto& a : hi.allocations) a.owner = 1;
    hi.allocations[0].base = 2ull << 40;
    for (auto& c : hi.commands) {
        c.launch_args[0].value += (1ull << 40);
        c.ground_truth_access[0].start += (1ull << 40);
    }
    msim::SimOptions o;
    o.compute_reference = false;
    o.record_events = true;
    msim::Engine e({lo, hi}, Policy::priority({1.0, 1.0}), Mode::um(1), small_hw(4), o);
    e.run();
    // lo runs 4 commands (to t ~ 4 ms), then hi runs to completion, then lo resumes.
    std::vector<msim::TaskId> order;
    for (const auto& ev : e.events())
        if (ev.kind == msim::SimEvent::Kind::Resume) order.push_back(ev.task);
    CHECK(order == std::vector<msim::TaskId>{0, 1, 0});
    CHECK(e.metrics().completions == 22);
}

TEST_CASE("engine: mode names and validation") {
    CHECK(Mode::um().name() == "um");
    CHECK(Mode::ideal().name() == "ideal");
    CHECK(Mode::proactive().name() == "proactive");
    CHECK(Mode::proactive(Mode::Predictor::Allocation, false, false).name() == "proactive-alloc-serial-nostart");
    CHECK_THROWS_AS(Mode::um(0).validate(), msim::ConfigError);
    CHECK_THROWS_AS(msim::simulate({}, Policy::round_robin(0), Mode::um(), msim::rtx5080()), msim::ConfigError);
}
