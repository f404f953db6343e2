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


#include "msim/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <ostream>

namespace msim {

Mode Mode::um(int prefetch_pages) {
    Mode m;
    m.kind = Kind::UM;
    m.prefetch_pages = prefetch_pages;
    return m;
}

Mode Mode::proactive(Predictor p, bool pipelined, bool early_start) {
    Mode m;
    m.kind = Kind::Proactive;
    m.predictor = p;
    m.pipelined = pipelined;
    m.early_start = early_start;
    return m;
}

Mode Mode::ideal() {
    Mode m;
    m.kind = Kind::Ideal;
    m.predictor = Predictor::GroundTruth;
    return m;
}

std::string Mode::name() const {
    switch (kind) {
        case Kind::UM: return "um";
        case Kind::Ideal: return "ideal";
        case Kind::Proactive: break;
    }
    std::string n = "proactive";
    if (predictor == Predictor::Allocation) n += "-alloc";
    if (predictor == Predictor::GroundTruth) n += "-exact";
    if (!pipelined) n += "-serial";
    if (!early_start) n += "-nostart";
    return n;
}

void Mode::validate() const {
    if (kind == Kind::UM && prefetch_pages < 1) throw ConfigError("mode: prefetch_pages must be >= 1");
}

double Metrics::faults_per_completion() const {
    return completions ? static_cast<double>(faults) / static_cast<double>(completions) : 0.0;
}

double Metrics::migrated_bytes_per_completion() const {
    return completions ? static_cast<double>(migrated_bytes_h2d + migrated_bytes_d2h) /
                             static_cast<double>(completions)
                       : 0.0;
}

const char* to_string(SimEvent::Kind k) {
    switch (k) {
        case SimEvent::Kind::SaveRestore: return "save_restore";
        case SimEvent::Kind::Reorder: return "reorder";
        case SimEvent::Kind::Migrate: return "migrate";
        case SimEvent::Kind::Resume: return "resume";
    }
    return "?";
}

namespace {

// Pages a command needs resident while it runs. D2H copies read device
// memory that the host can reach directly, so they need nothing.
PageSet needed_pages(const Command& cmd, std::uint64_t page) {
    switch (cmd.kind) {
        case CommandKind::Kernel: return pages_of(cmd.ground_truth_access, page);
        case CommandKind::MemcpyH2D: return pages_of(cmd.memcpy_device_range(), page);
        case CommandKind::MemcpyD2H: return {};
    }
    return {};
}

// Last `n` pages of `s`.
PageSet suffix(const PageSet& s, std::uint64_t n) {
    std::uint64_t size = s.size();
    return n >= size ? s : s.difference(s.prefix(size - n));
}

// Brings `missing` in at the tail, evicting from the head while sparing
// `protect`. Returns evicted page count. A set larger than HBM streams
// through: only its last `capacity` pages stay resident.
std::uint64_t bring_in(EvictionList& list, PageSet missing, const PageSet& protect,
                       std::uint64_t capacity) {
    std::uint64_t evicted = 0;
    std::uint64_t n = missing.size();
    if (n > capacity) {
        evicted += n - capacity;
        missing = suffix(missing, capacity);
        n = capacity;
    }
    std::uint64_t free = capacity > list.size() ? capacity - list.size() : 0;
    if (n > free) {
        std::uint64_t need = n - free;
        PageSet victims;
        for (const auto& r : list.select_victims(need, protect)) victims.insert_run(r.lo, r.hi);
        list.remove(victims);
        std::uint64_t got = victims.size();
        if (got < need) list.pop_head(need - got);
        evicted += need;
    }
    list.push_tail(missing);
    return evicted;
}

}  // namespace

UmOutcome run_kernel_um(const Command& cmd, EvictionList& list, std::uint64_t capacity_pages,
                        const HwConfig& hw, int prefetch_pages) {
    UmOutcome out;
    out.duration_s = cmd.latency_s;
    PageSet needs = needed_pages(cmd, hw.page_size_bytes);
    if (needs.empty()) return out;
    // The driver sees no GPU hits, so resident pages keep their list
    // position; only migrations append to the tail.
    PageSet missing = needs.difference(list.resident_part(needs));
    if (missing.empty()) return out;
    std::uint64_t n = missing.size();
    out.evicted_pages = bring_in(list, std::move(missing), needs, capacity_pages);
    if (cmd.kind == CommandKind::MemcpyH2D) {
        // The copy overwrites its destination: pages are mapped, not faulted.
        out.mapped_pages = n;
        return out;
    }
    auto batch = static_cast<std::uint64_t>(prefetch_pages);
    out.faults = (n + batch - 1) / batch;
    out.faulted_pages = n;
    out.duration_s += static_cast<double>(out.faults) *
                      (hw.fault_control_plane_s + hw.fault_transfer_s * static_cast<double>(batch));
    return out;
}

struct Engine::State {
    struct TaskRt {
        Task task;
        HelperQueue helper;
        bool queued = false;
        bool done = false;
    };

    // Plan covering commands [from, covered_end) of the running task.
    struct Segment {
        bool active = false;
        std::size_t from = 0;
        std::size_t covered_end = 0;
        MigrationPlan plan;
        double start_s = 0.0;
        std::unique_ptr<MigrationTimer> timer;

        double gate(std::size_t cursor, bool early) const {
            if (!early) return start_s + timer->makespan();
            return start_s + timer->populate_done(plan.marks.at(cursor - from));
        }
    };

    Policy policy;
    Mode mode;
    HwConfig hw;
    SimOptions opts;
    std::uint64_t capacity = 0;
    std::vector<TaskRt> tasks;
    std::map<TaskId, std::size_t> index;
    std::deque<TaskId> queue;
    bool has_prev = false;
    TaskId prev = 0;
    double ce_free_at = 0.0;
    TemplatePredictor templates;
    MadviseCost madvise_cost;
    Segment seg;
    bool budget_hit = false;

    bool proactive() const { return mode.kind != Mode::Kind::UM; }
    TaskRt& rt(TaskId id) { return tasks.at(index.at(id)); }

    HelperEntry make_entry(const TaskRt& t, const Command& c) const {
        HelperEntry e;
        e.latency_s = c.latency_s;
        if (!proactive() || c.kind == CommandKind::MemcpyD2H) return e;
        std::uint64_t page = hw.page_size_bytes;
        if (c.kind == CommandKind::MemcpyH2D) {
            e.predicted = pages_of(c.memcpy_device_range(), page);
            e.overwrite = e.predicted;
            return e;
        }
        switch (mode.predictor) {
            case Mode::Predictor::Template: e.predicted = templates.predict(c, page); break;
            case Mode::Predictor::Allocation:
                e.predicted = predict_allocation(t.task.allocations, c, page);
                break;
            case Mode::Predictor::GroundTruth: e.predicted = pages_of(c.ground_truth_access, page); break;
        }
        return e;
    }

    std::vector<TaskSchedInfo> sched_order(TaskId first) const {
        std::vector<TaskSchedInfo> out;
        auto info = [&](TaskId id) {
            const TaskRt& t = tasks.at(index.at(id));
            return TaskSchedInfo{id, t.task.priority, t.task.cursor, t.helper.latencies(), true};
        };
        out.push_back(info(first));
        for (TaskId id : queue)
            if (id != first) out.push_back(info(id));
        return out;
    }

    std::map<TaskId, const HelperQueue*> helper_map() const {
        std::map<TaskId, const HelperQueue*> m;
        for (const auto& t : tasks) m[t.task.id] = &t.helper;
        return m;
    }
};

namespace {

void check_capacity(const EvictionList& list, std::uint64_t capacity, Metrics& m, bool check) {
    m.max_resident_pages = std::max<std::uint64_t>(m.max_resident_pages, list.size());
    if (check && list.size() > capacity)
        throw Error("invariant violated: " + std::to_string(list.size()) +
                    " resident pages exceed HBM capacity of " + std::to_string(capacity));
}

void dump_state(std::ostream& os, double now, TaskId task, const Timeline& tl,
                const EvictionList& list, const MigrationPlan& plan, std::size_t max_runs) {
    os << "t=" << now << " plan task=" << task << " timeline=" << to_string(tl) << "\n  list["
       << list.size() << "] head:";
    std::size_t n = 0;
    for (const auto& r : list.order_runs()) {
        if (n++ == max_runs) {
            os << " ...";
            break;
        }
        os << ' ' << r.lo << ".." << r.hi - 1;
    }
    os << "\n  evict=" << plan.evict_pages() << " populate=" << plan.populate_pages()
       << " transfer=" << plan.transfer_pages() << " commands=" << plan.marks.size()
       << (plan.truncated ? " truncated" : "") << '\n';
}

}  // namespace

Engine::Engine(std::vector<Task> tasks, Policy policy, Mode mode, HwConfig hw, SimOptions opts)
    : s_(std::make_unique<State>()) {
    policy.validate();
    mode.validate();
    hw.validate();
    State& s = *s_;
    s.policy = std::move(policy);
    s.mode = mode;
    s.hw = std::move(hw);
    s.opts = std::move(opts);
    s.capacity = s.hw.hbm_pages();
    if (s.capacity == 0) throw ConfigError("engine: HBM holds no pages");
    if (mode.kind == Mode::Kind::Proactive)
        s.madvise_cost = {s.hw.madvise_call_s, s.hw.per_page_madvise_s};
    if (mode.kind == Mode::Kind::Proactive && mode.predictor == Mode::Predictor::Template) {
        if (!s.opts.descriptors.empty()) {
            s.templates = TemplatePredictor(s.opts.descriptors);
        } else {
            std::vector<KernelDescriptor> all;
            for (const auto& t : tasks)
                for (auto& d : analyze_task(t)) all.push_back(std::move(d));
            s.templates = TemplatePredictor(all);
        }
    }
    for (auto& t : tasks) {
        t.validate(s.hw.page_size_bytes);
        if (s.index.count(t.id)) throw ValidationError("engine: duplicate task id " + std::to_string(t.id));
        s.index[t.id] = s.tasks.size();
        State::TaskRt rt{std::move(t), HelperQueue(0), false, false};
        rt.helper = HelperQueue(rt.task.id);
        if (rt.task.cursor != 0) throw ValidationError("engine: tasks must start at cursor 0");
        for (const auto& c : rt.task.commands) rt.helper.push(s.make_entry(rt, c));
        rt.done = rt.task.commands.empty();
        s.tasks.push_back(std::move(rt));
    }
}

Engine::~Engine() = default;

const Task& Engine::task(TaskId id) const {
    auto it = s_->index.find(id);
    if (it == s_->index.end()) throw Error("engine: unknown task " + std::to_string(id));
    return s_->tasks[it->second].task;
}

bool Engine::finished() const {
    if (s_->budget_hit) return true;
    return std::all_of(s_->tasks.begin(), s_->tasks.end(), [](const auto& t) { return t.done; });
}

void Engine::append_commands(TaskId id, std::vector<Command> cmds) {
    auto it = s_->index.find(id);
    if (it == s_->index.end()) throw Error("engine: unknown task " + std::to_string(id));
    State::TaskRt& t = s_->tasks[it->second];
    if (t.done) throw Error("engine: cannot append to finished task " + std::to_string(id));
    for (auto& c : cmds) {
        t.helper.push(s_->make_entry(t, c));
        t.task.commands.push_back(std::move(c));
    }
    t.task.validate(s_->hw.page_size_bytes);
}

bool Engine::step() {
    State& s = *s_;
    if (finished()) return false;
    const std::uint64_t page = s.hw.page_size_bytes;
    auto record = [&](SimEvent::Kind k, double t, TaskId id, double dur, std::uint64_t pages) {
        if (s.opts.record_events) events_.push_back({k, t, id, dur, pages});
    };
    auto admit = [&] {
        for (auto& t : s.tasks)
            if (!t.done && !t.queued && t.task.arrival_s <= now_) {
                t.queued = true;
                s.queue.push_back(t.task.id);
            }
    };

    admit();
    if (s.queue.empty()) {
        double next = std::numeric_limits<double>::infinity();
        for (const auto& t : s.tasks)
            if (!t.done && !t.queued) next = std::min(next, t.task.arrival_s);
        if (!std::isfinite(next)) return false;
        now_ = next;
        admit();
    }

    // Pick: queue head for round-robin, first task of the best level for priority.
    TaskId id = s.queue.front();
    if (s.policy.kind == Policy::Kind::Priority) {
        for (TaskId q : s.queue)
            if (s.rt(q).task.priority < s.rt(id).task.priority) id = q;
    }
    State::TaskRt& cur = s.rt(id);
    const double slice = s.policy.slice_for_level(cur.task.priority);

    if (!s.has_prev || s.prev != id) {
        record(SimEvent::Kind::SaveRestore, now_, id, s.policy.switch_cost_s, 0);
        now_ += s.policy.switch_cost_s;
        ++metrics_.switches;
    }
    s.has_prev = true;
    s.prev = id;

    // Reorder the list for the projected timeline, then plan commands
    // [from, slice end) of the running task.
    auto plan_segment = [&](std::size_t from, double slice_left) {
        Timeline tl = build_timeline(s.policy, s.sched_order(id));
        if (!tl.empty()) tl.front().timeslice_s = slice_left;
        ReorderStats rs = reorder_for_opt(list_, tl, s.helper_map(), s.madvise_cost);
        record(SimEvent::Kind::Reorder, now_, id, rs.overhead_s, rs.pages_advised);
        now_ += rs.overhead_s;
        metrics_.madvise_overhead_s += rs.overhead_s;
        metrics_.madvise_calls += rs.calls;

        std::size_t end = std::min(slice_end(cur.helper.latencies(), from, slice_left),
                                   cur.helper.end_index());
        std::vector<PlannedCommand> cmds;
        for (std::size_t i = from; i < end; ++i) {
            const HelperEntry& e = cur.helper.at(i);
            cmds.push_back({e.predicted, e.overwrite});
        }
        State::Segment& seg = s.seg;
        seg.plan = plan_migration(list_, cmds, s.capacity);
        ++metrics_.plans;
        if (seg.plan.truncated) {
            ++metrics_.plan_truncations;
            // The slice overflows HBM. Holding a whole window resident would
            // also protect pages whose last use in it has passed, so plan one
            // command at a time: after the reorder the head is exactly the
            // farthest next use.
            if (cmds.size() > 1)
                seg.plan = plan_migration(list_, std::span<const PlannedCommand>(cmds.data(), 1),
                                          s.capacity);
        }
        if (s.opts.dump) dump_state(*s.opts.dump, now_, id, tl, list_, seg.plan, s.opts.dump_max_runs);
        apply_plan(list_, seg.plan);
        std::uint64_t evicted = seg.plan.evict_pages();
        std::uint64_t moved = seg.plan.transfer_pages();
        std::uint64_t mapped = seg.plan.populate_pages() - moved;
        metrics_.migrated_bytes_d2h += evicted * page;
        metrics_.populate_bytes += moved * page;
        metrics_.migrated_bytes_h2d += moved * page;
        metrics_.mapped_bytes += mapped * page;
        seg.timer = std::make_unique<MigrationTimer>(seg.plan, s.hw, s.mode.pipelined);
        seg.start_s = std::max(now_, s.ce_free_at);
        s.ce_free_at = seg.start_s + seg.timer->makespan();
        seg.from = from;
        seg.covered_end = from + std::max<std::size_t>(seg.plan.covered, 1);
        seg.active = true;
        if (!seg.plan.empty())
            record(SimEvent::Kind::Migrate, seg.start_s, id, seg.timer->makespan(),
                   evicted + seg.plan.populate_pages());
        check_capacity(list_, s.capacity, metrics_, s.opts.check_invariants);
    };

    s.seg.active = false;
    if (s.proactive()) plan_segment(cur.task.cursor, slice);
    record(SimEvent::Kind::Resume, now_, id, 0.0, 0);

    auto preempted = [&] {
        if (s.policy.kind != Policy::Kind::Priority) return false;
        for (const auto& t : s.tasks)
            if (!t.done && t.task.arrival_s <= now_ && t.task.priority < cur.task.priority) return true;
        return false;
    };

    bool started = false;
    double slice_start = now_;
    Task& task = cur.task;
    while (task.cursor < task.commands.size()) {
        if (s.opts.time_budget_s > 0 && now_ >= s.opts.time_budget_s) {
            s.budget_hit = true;
            break;
        }
        if (started && (now_ - slice_start >= slice || preempted())) break;
        std::size_t i = task.cursor;
        const Command& cmd = task.commands[i];
        double latency = cmd.latency_s;
        double duration = latency;
        if (!s.proactive()) {
            UmOutcome o = run_kernel_um(cmd, list_, s.capacity, s.hw, s.mode.prefetch_pages);
            duration = o.duration_s;
            metrics_.faults += o.faults;
            metrics_.fault_bytes += o.faulted_pages * page;
            metrics_.migrated_bytes_h2d += o.faulted_pages * page;
            metrics_.mapped_bytes += o.mapped_pages * page;
            metrics_.migrated_bytes_d2h += o.evicted_pages * page;
        } else {
            if (started && i >= s.seg.covered_end)
                plan_segment(i, std::max(slice - (now_ - slice_start), 1e-12));
            double gate = s.seg.gate(i, s.mode.early_start);
            if (gate > now_) {
                metrics_.migration_wait_s += gate - now_;
                now_ = gate;
            }
            // Pages the plan missed: mapped for copy targets, faulted one
            // page at a time otherwise.
            PageSet needs = needed_pages(cmd, page);
            PageSet missing = needs.difference(list_.resident_part(needs));
            if (!missing.empty()) {
                std::uint64_t n = missing.size();
                std::uint64_t evicted = bring_in(list_, std::move(missing), needs, s.capacity);
                metrics_.migrated_bytes_d2h += evicted * page;
                if (cmd.kind == CommandKind::MemcpyH2D) {
                    metrics_.mapped_bytes += n * page;
                } else {
                    metrics_.faults += n;
                    metrics_.fault_bytes += n * page;
                    metrics_.migrated_bytes_h2d += n * page;
                    duration += static_cast<double>(n) * s.hw.fault_cost_s();
                }
            }
        }
        if (!started) {
            started = true;
            slice_start = now_;
        }
        now_ += duration;
        metrics_.fault_stall_s += duration - latency;
        metrics_.work_s += latency;
        ++metrics_.commands;
        if (cmd.job_end) {
            ++metrics_.completions;
            ++metrics_.per_task_completions[id];
        }
        cur.helper.retire();
        ++task.cursor;
        check_capacity(list_, s.capacity, metrics_, s.opts.check_invariants);
    }

    s.queue.erase(std::find(s.queue.begin(), s.queue.end(), id));
    if (task.cursor >= task.commands.size()) {
        cur.done = true;
        cur.queued = false;
    } else {
        s.queue.push_back(id);
    }
    metrics_.sim_time_s = now_;
    metrics_.skipped_rules = s.templates.skipped_rules();
    return true;
}

void Engine::list_preload(const PageSet& pages) {
    if (metrics_.commands != 0) throw Error("engine: preload after the first step");
    list_.push_tail(pages);
    check_capacity(list_, s_->capacity, metrics_, true);
}

const Metrics& Engine::run() {
    while (step()) {
    }
    metrics_.sim_time_s = now_;
    metrics_.skipped_rules = s_->templates.skipped_rules();
    if (s_->opts.compute_reference && metrics_.work_s > 0 && metrics_.sim_time_s > 0) {
        std::vector<Task> fresh;
        for (const auto& t : s_->tasks) {
            Task copy = t.task;
            copy.cursor = 0;
            fresh.push_back(std::move(copy));
        }
        double ref = reference_throughput(fresh, s_->policy, s_->hw, s_->opts.time_budget_s);
        metrics_.normalized_throughput = ref > 0 ? metrics_.throughput() / ref : 0.0;
    }
    return metrics_;
}

Metrics simulate(std::vector<Task> tasks, const Policy& policy, const Mode& mode, const HwConfig& hw,
                 const SimOptions& opts) {
    Engine e(std::move(tasks), policy, mode, hw, opts);
    return e.run();
}

double reference_throughput(const std::vector<Task>& tasks, const Policy& policy, const HwConfig& hw,
                            double time_budget_s) {
    HwConfig big = hw;
    PageSet all;
    for (const auto& t : tasks) all = all.union_with(allocation_pages(t, hw.page_size_bytes));
    std::uint64_t pages = std::max<std::uint64_t>(all.size(), 1);
    big.hbm_capacity_bytes = std::max(hw.hbm_capacity_bytes, (pages + 1) * hw.page_size_bytes);
    SimOptions o;
    o.time_budget_s = time_budget_s;
    o.compute_reference = false;
    Engine e(tasks, policy, Mode::um(), big, o);
    // Every page starts resident, so the run never faults.
    e.list_preload(all);
    return e.run().throughput();
}

}  // namespace msim
