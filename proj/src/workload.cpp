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

#include "msim/workload.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace msim {

double KernelCostModel::memory_bound(std::uint64_t bytes) const {
    return launch_overhead_s + static_cast<double>(bytes) / mem_bytes_per_s;
}

double KernelCostModel::compute_bound(double flops) const {
    return launch_overhead_s + flops / flops_per_s;
}

double KernelCostModel::memcpy(std::uint64_t bytes) const {
    return launch_overhead_s + static_cast<double>(bytes) / memcpy_bytes_per_s;
}

AddressSpace::AddressSpace(TaskId task, std::uint64_t page_size)
    : task_(task),
      page_size_(page_size),
      next_((static_cast<Addr>(task) + 1) << 40),
      limit_((static_cast<Addr>(task) + 2) << 40) {}

Allocation AddressSpace::allocate(std::uint64_t bytes) {
    if (bytes == 0) throw ValidationError("allocation of zero bytes");
    std::uint64_t rounded = (bytes + page_size_ - 1) / page_size_ * page_size_;
    if (rounded < bytes || next_ + rounded + page_size_ > limit_ || next_ + rounded < next_)
        throw ValidationError("task address space exhausted");
    Allocation a{next_id_++, next_, bytes, task_};
    next_ += rounded + page_size_;
    return a;
}

namespace {

Command memcpy_h2d(const Allocation& a, const KernelCostModel& cost) {
    Command c;
    c.kind = CommandKind::MemcpyH2D;
    c.launch_args = {LaunchArg::u64(0), LaunchArg::u64(a.base), LaunchArg::u64(a.size)};
    c.latency_s = cost.memcpy(a.size);
    c.ground_truth_access = {{a.base, a.size}};
    return c;
}

// Seeded per task so that tasks stay independent of generation order.
class IndirectPlanter {
public:
    explicit IndirectPlanter(const WorkloadOptions& opts)
        : rate_(opts.indirect_rate),
          page_(opts.page_size),
          rng_(opts.seed * 0x9E3779B97F4A7C15ull + opts.task_id),
          table_bytes_(std::max<std::uint64_t>(opts.lookup_table_bytes, opts.page_size)) {
        if (rate_ < 0.0 || rate_ > 1.0) throw ValidationError("indirect_rate must be in [0, 1]");
    }

    bool enabled() const { return rate_ > 0.0; }
    void set_table(const Allocation& a) { table_ = a; }
    std::uint64_t table_bytes() const { return table_bytes_; }

    void maybe_plant(Command& c) {
        if (!enabled()) return;
        if (std::bernoulli_distribution(rate_)(rng_)) {
            std::uint64_t slots = table_.size / page_;
            std::uint64_t slot = std::uniform_int_distribution<std::uint64_t>(0, slots - 1)(rng_);
            ByteRange r{table_.base + slot * page_, 256};
            c.ground_truth_access.push_back(r);
            c.indirect_access.push_back(r);
        }
    }

private:
    double rate_;
    std::uint64_t page_;
    std::mt19937_64 rng_;
    std::uint64_t table_bytes_ = 0;
    Allocation table_;
};

// Shared tail of every generator: lookup table, memcpy prologue, checks.
void finish(Task& task, AddressSpace& space, IndirectPlanter& planter,
            const WorkloadOptions& opts, std::vector<Command> kernels) {
    if (planter.enabled()) {
        Allocation t = space.allocate(planter.table_bytes());
        task.allocations.push_back(t);
        planter.set_table(t);
        for (auto& k : kernels) planter.maybe_plant(k);
    }
    if (opts.emit_memcpy)
        for (const auto& a : task.allocations) task.commands.push_back(memcpy_h2d(a, opts.cost));
    for (auto& k : kernels) task.commands.push_back(std::move(k));
    task.validate(opts.page_size);
}

Task new_task(const WorkloadOptions& opts) {
    Task t;
    t.id = opts.task_id;
    t.priority = opts.priority;
    return t;
}

std::uint64_t checked_mul(std::uint64_t a, std::uint64_t b) {
    if (a != 0 && b > UINT64_MAX / a) throw ValidationError("buffer size overflows the address space");
    return a * b;
}

}  // namespace

Task gen_vector_add(std::uint64_t n_elems, std::uint64_t elem_bytes, std::uint32_t iterations,
                    const WorkloadOptions& opts) {
    if (n_elems == 0 || elem_bytes == 0) throw ValidationError("vector add needs n_elems > 0");
    std::uint32_t parts = std::max<std::uint32_t>(1, opts.kernels_per_iteration);
    if (parts > n_elems) throw ValidationError("more kernels per iteration than elements");
    std::uint64_t bytes = checked_mul(n_elems, elem_bytes);
    Task task = new_task(opts);
    AddressSpace space(opts.task_id, opts.page_size);
    Allocation a = space.allocate(bytes), b = space.allocate(bytes), c = space.allocate(bytes);
    task.allocations = {a, b, c};
    IndirectPlanter planter(opts);
    std::vector<Command> kernels;
    for (std::uint32_t it = 0; it < iterations; ++it) {
        for (std::uint32_t p = 0; p < parts; ++p) {
            std::uint64_t lo = n_elems * p / parts, hi = n_elems * (p + 1) / parts;
            std::uint64_t off = lo * elem_bytes, len = (hi - lo) * elem_bytes;
            Command k;
            k.kernel_name = "vector_add";
            k.launch_args = {LaunchArg::u64(a.base + off), LaunchArg::u64(b.base + off),
                             LaunchArg::u64(c.base + off), LaunchArg::u64(hi - lo)};
            k.grid = {static_cast<std::uint32_t>((hi - lo + 255) / 256), 1, 1};
            k.block = {256, 1, 1};
            k.latency_s = opts.cost.memory_bound(3 * len);
            k.ground_truth_access = {{a.base + off, len}, {b.base + off, len}, {c.base + off, len}};
            k.job_end = p + 1 == parts;
            kernels.push_back(std::move(k));
        }
    }
    finish(task, space, planter, opts, std::move(kernels));
    return task;
}

Task gen_matmul(std::uint64_t m, std::uint64_t n, std::uint64_t k, std::uint32_t count,
                const WorkloadOptions& opts, std::uint64_t elem_bytes) {
    if (m == 0 || n == 0 || k == 0) throw ValidationError("matmul dimensions must be positive");
    Task task = new_task(opts);
    AddressSpace space(opts.task_id, opts.page_size);
    std::uint64_t sa = checked_mul(checked_mul(m, k), elem_bytes);
    std::uint64_t sb = checked_mul(checked_mul(k, n), elem_bytes);
    std::uint64_t sc = checked_mul(checked_mul(m, n), elem_bytes);
    Allocation a = space.allocate(sa), b = space.allocate(sb), c = space.allocate(sc);
    task.allocations = {a, b, c};
    IndirectPlanter planter(opts);
    std::vector<Command> kernels;
    for (std::uint32_t i = 0; i < count; ++i) {
        Command cmd;
        cmd.kernel_name = "matmul";
        cmd.launch_args = {LaunchArg::u64(a.base), LaunchArg::u64(b.base), LaunchArg::u64(c.base),
                           LaunchArg::u64(m),      LaunchArg::u64(n),      LaunchArg::u64(k)};
        cmd.grid = {static_cast<std::uint32_t>((n + 15) / 16), static_cast<std::uint32_t>((m + 15) / 16), 1};
        cmd.block = {16, 16, 1};
        cmd.latency_s = opts.cost.compute_bound(2.0 * static_cast<double>(m) * static_cast<double>(n) *
                                                static_cast<double>(k));
        cmd.ground_truth_access = {{a.base, sa}, {b.base, sb}, {c.base, sc}};
        cmd.job_end = true;
        kernels.push_back(std::move(cmd));
    }
    finish(task, space, planter, opts, std::move(kernels));
    return task;
}

namespace {

void check_llm(const LlmParams& p) {
    if (p.layers == 0 || p.weight_bytes_per_layer == 0 || p.kv_max_bytes == 0 || p.bytes_per_token == 0)
        throw ValidationError("llm-like: sizes must be positive");
    if (p.kv_used_fraction_schedule.size() != p.decode_steps)
        throw ValidationError("llm-like: fraction schedule length must equal decode_steps");
    double prev = 0.0;
    for (double f : p.kv_used_fraction_schedule) {
        if (!(f > 0.0 && f <= 1.0)) throw ValidationError("llm-like: fractions must lie in (0, 1]");
        if (f < prev) throw ValidationError("llm-like: fraction schedule must be non-decreasing");
        prev = f;
    }
}

std::uint32_t seq_len_for(const LlmParams& p, double fraction) {
    std::uint64_t max_tokens = std::max<std::uint64_t>(1, p.kv_max_bytes / p.bytes_per_token);
    auto tokens = static_cast<std::uint64_t>(std::ceil(fraction * static_cast<double>(max_tokens) - 1e-9));
    return static_cast<std::uint32_t>(std::clamp<std::uint64_t>(tokens, 1, max_tokens));
}

}  // namespace

std::vector<Command> llm_step_commands(const Task& task, const LlmParams& p, std::uint32_t step,
                                       const WorkloadOptions& opts) {
    check_llm(p);
    if (step >= p.decode_steps) throw ValidationError("llm-like: step out of range");
    if (task.allocations.size() < 1 + p.layers) throw ValidationError("llm-like: task layout mismatch");
    const Allocation& w = task.allocations[0];
    std::uint32_t seq = seq_len_for(p, p.kv_used_fraction_schedule[step]);
    std::uint64_t kv_len = static_cast<std::uint64_t>(seq) * p.bytes_per_token;
    std::vector<Command> out;
    for (std::uint32_t l = 0; l < p.layers; ++l) {
        const Allocation& kv = task.allocations[1 + l];
        Addr slice = w.base + static_cast<Addr>(l) * p.weight_bytes_per_layer;
        Command k;
        k.kernel_name = "decode_layer";
        k.launch_args = {LaunchArg::u64(slice), LaunchArg::u64(kv.base), LaunchArg::u32(seq)};
        k.grid = {p.layers, 1, 1};
        k.block = {128, 1, 1};
        k.latency_s = opts.cost.memory_bound(p.weight_bytes_per_layer + kv_len);
        k.ground_truth_access = {{slice, p.weight_bytes_per_layer}, {kv.base, kv_len}};
        k.job_end = l + 1 == p.layers;
        out.push_back(std::move(k));
    }
    return out;
}

Task gen_llm_like(const LlmParams& p, const WorkloadOptions& opts) {
    check_llm(p);
    Task task = new_task(opts);
    AddressSpace space(opts.task_id, opts.page_size);
    task.allocations.push_back(space.allocate(checked_mul(p.layers, p.weight_bytes_per_layer)));
    for (std::uint32_t l = 0; l < p.layers; ++l) task.allocations.push_back(space.allocate(p.kv_max_bytes));
    IndirectPlanter planter(opts);
    std::vector<Command> kernels;
    for (std::uint32_t s = 0; s < p.decode_steps; ++s)
        for (auto& k : llm_step_commands(task, p, s, opts)) kernels.push_back(std::move(k));
    finish(task, space, planter, opts, std::move(kernels));
    return task;
}

std::vector<Task> gen_llm_mix(const LlmMixParams& mp) {
    if (!(mp.ratio > 0.0) || mp.tasks == 0 || mp.layers == 0 || mp.decode_steps == 0)
        throw ValidationError("llm mix: ratio, tasks, layers and steps must be positive");
    if (!(mp.weight_fraction > 0.0 && mp.weight_fraction < 1.0))
        throw ValidationError("llm mix: weight_fraction must lie in (0, 1)");
    if (!(mp.kv_start > 0.0 && mp.kv_start <= mp.kv_end && mp.kv_end <= 1.0))
        throw ValidationError("llm mix: need 0 < kv_start <= kv_end <= 1");
    const double per_task = mp.ratio * static_cast<double>(mp.hbm_bytes) / mp.tasks;
    auto pages_of_share = [&](double bytes) {
        auto n = static_cast<std::uint64_t>(bytes / static_cast<double>(mp.page_size));
        return std::max<std::uint64_t>(1, n) * mp.page_size;
    };
    LlmParams p;
    p.layers = mp.layers;
    p.weight_bytes_per_layer = pages_of_share(per_task * mp.weight_fraction / mp.layers);
    p.kv_max_bytes = pages_of_share(per_task * (1.0 - mp.weight_fraction) / mp.layers);
    p.bytes_per_token = std::max<std::uint64_t>(1, p.kv_max_bytes / 1024);
    p.decode_steps = mp.decode_steps;
    p.kv_used_fraction_schedule.clear();
    for (std::uint32_t s = 0; s < mp.decode_steps; ++s) {
        double t = mp.decode_steps > 1 ? static_cast<double>(s) / (mp.decode_steps - 1) : 0.0;
        p.kv_used_fraction_schedule.push_back(mp.kv_start + (mp.kv_end - mp.kv_start) * t);
    }
    std::vector<Task> tasks;
    for (std::uint32_t i = 0; i < mp.tasks; ++i) {
        WorkloadOptions o;
        o.task_id = i;
        o.seed = mp.seed;
        o.page_size = mp.page_size;
        o.indirect_rate = 0.0;
        tasks.push_back(gen_llm_like(p, o));
    }
    return tasks;
}

std::vector<Task> gen_microbench(const MicrobenchParams& mp) {
    if (!(mp.ratio > 0.0)) throw ValidationError("microbench: ratio must be positive");
    if (mp.processes == 0) throw ValidationError("microbench: needs at least one process");
    auto total = static_cast<std::uint64_t>(std::llround(mp.ratio * static_cast<double>(mp.hbm_bytes)));
    std::uint64_t per_proc = total / mp.processes;
    std::uint64_t matrix = mp.matmul_dim * mp.matmul_dim * 4;
    std::uint32_t n_matmul = mp.processes / 2;
    std::uint32_t n_vecadd = mp.processes - n_matmul;
    std::vector<Task> tasks;
    std::uint64_t used = 0;
    // Matmul streams hold whole matrix triples; vector add streams absorb
    // the remainder so the aggregate footprint is exact.
    std::vector<Task> matmuls;
    for (std::uint32_t i = 0; i < n_matmul; ++i) {
        WorkloadOptions o;
        o.task_id = n_vecadd + i;
        o.seed = mp.seed;
        o.page_size = mp.page_size;
        o.indirect_rate = mp.indirect_rate;
        std::uint64_t triples = std::max<std::uint64_t>(1, per_proc / (3 * matrix));
        Task t = new_task(o);
        AddressSpace space(o.task_id, o.page_size);
        std::vector<Allocation> trip;
        for (std::uint64_t j = 0; j < 3 * triples; ++j) trip.push_back(space.allocate(matrix));
        t.allocations = trip;
        IndirectPlanter planter(o);
        std::vector<Command> kernels;
        double lat = o.cost.compute_bound(2.0 * std::pow(static_cast<double>(mp.matmul_dim), 3));
        for (std::uint32_t it = 0; it < mp.iterations; ++it) {
            for (std::uint64_t j = 0; j < triples; ++j) {
                const Allocation &a = trip[3 * j], &b = trip[3 * j + 1], &c = trip[3 * j + 2];
                Command cmd;
                cmd.kernel_name = "matmul";
                cmd.launch_args = {LaunchArg::u64(a.base), LaunchArg::u64(b.base), LaunchArg::u64(c.base),
                                   LaunchArg::u64(mp.matmul_dim), LaunchArg::u64(mp.matmul_dim),
                                   LaunchArg::u64(mp.matmul_dim)};
                cmd.latency_s = lat;
                cmd.ground_truth_access = {{a.base, matrix}, {b.base, matrix}, {c.base, matrix}};
                cmd.job_end = j + 1 == triples;
                kernels.push_back(std::move(cmd));
            }
        }
        finish(t, space, planter, o, std::move(kernels));
        used += 3 * triples * matrix;
        matmuls.push_back(std::move(t));
    }
    std::uint64_t rest = total > used ? total - used : 0;
    for (std::uint32_t i = 0; i < n_vecadd; ++i) {
        WorkloadOptions o;
        o.task_id = i;
        o.seed = mp.seed;
        o.page_size = mp.page_size;
        o.indirect_rate = mp.indirect_rate;
        o.kernels_per_iteration = mp.kernels_per_iteration;
        o.cost.mem_bytes_per_s = mp.vecadd_bytes_per_s;
        std::uint64_t share = rest / n_vecadd + (i + 1 == n_vecadd ? rest % n_vecadd : 0);
        std::uint64_t n = std::max<std::uint64_t>(mp.kernels_per_iteration, share / 3 / 4);
        tasks.push_back(gen_vector_add(n, 4, mp.iterations, o));
    }
    for (auto& t : matmuls) tasks.push_back(std::move(t));
    return tasks;
}

}  // namespace msim

namespace msim {

PlantedCorpus gen_planted_corpus(const CorpusParams& cp) {
    if (cp.invocations == 0 || cp.kernels == 0) throw ValidationError("corpus: needs kernels and invocations");
    std::mt19937_64 rng(cp.seed);
    auto uni = [&](std::uint64_t lo, std::uint64_t hi) {
        return std::uniform_int_distribution<std::uint64_t>(lo, hi)(rng);
    };
    PlantedCorpus out;
    WorkloadOptions opts;
    opts.seed = cp.seed;
    opts.page_size = cp.page_size;
    opts.indirect_rate = cp.indirect_rate;
    out.task = new_task(opts);
    AddressSpace space(0, cp.page_size);
    IndirectPlanter planter(opts);
    std::vector<Command> kernels;
    static const std::uint64_t kCoeffs[] = {1, 2, 4, 8, 12, 16};

    for (std::uint32_t k = 0; k < cp.kernels; ++k) {
        PlantedKernel pk;
        pk.name = "kernel_" + std::to_string(k);
        auto n_bufs = static_cast<std::uint32_t>(uni(1, 3));
        std::uint32_t n_ints = 4;
        bool packed = uni(0, 3) == 0;
        // Pointer slots, then integer slots, then (optionally) a struct
        // {u32 pad, u32 n} whose n sits in window slot base + 2.
        std::uint32_t int_base = n_bufs;
        std::uint32_t struct_n_slot = int_base + n_ints + 2;
        std::vector<std::uint32_t> size_slots;
        for (std::uint32_t i = 0; i < n_ints; ++i) size_slots.push_back(int_base + i);
        if (packed) size_slots.push_back(struct_n_slot);
        std::vector<bool> is32(n_ints);
        for (auto&& w : is32) w = uni(0, 1) == 1;
        for (std::uint32_t b = 0; b < n_bufs; ++b) {
            PlantedBuffer pb;
            pb.ptr_slot = b;
            switch (uni(0, 2)) {
                case 0:
                    pb.kind = PlantedBuffer::Kind::Fixed;
                    pb.fixed_size = uni(1, 64) * 256 + uni(0, 255);
                    break;
                case 1: {
                    pb.kind = PlantedBuffer::Kind::Linear;
                    pb.coeff = kCoeffs[uni(0, 5)];
                    auto terms = uni(1, 2);
                    std::vector<std::uint32_t> pool = size_slots;
                    std::shuffle(pool.begin(), pool.end(), rng);
                    pb.size_slots.assign(pool.begin(), pool.begin() + static_cast<long>(terms));
                    std::sort(pb.size_slots.begin(), pb.size_slots.end());
                    break;
                }
                default: {
                    pb.kind = PlantedBuffer::Kind::Strided;
                    std::vector<std::uint32_t> pool(size_slots.begin(), size_slots.begin() + n_ints);
                    std::shuffle(pool.begin(), pool.end(), rng);
                    pb.chunk_slot = pool[0];
                    pb.stride_slot = pool[1];
                    pb.count_slot = pool[2];
                    pb.chunk_coeff = kCoeffs[uni(0, 3)];
                    // Stride driver values are scaled so chunks never touch.
                    pb.stride_coeff = 64;
                }
            }
            pk.buffers.push_back(pb);
        }
        // Per-invocation argument values, distinct across invocations. Two
        // slots whose values are proportional in every invocation would make
        // the planted law ambiguous, so such draws are repeated.
        std::vector<std::vector<std::uint64_t>> ints;
        auto proportional = [&](std::uint32_t a, std::uint32_t b) {
            for (std::uint32_t inv = 1; inv < cp.invocations; ++inv)
                if (ints[inv][a] * ints[0][b] != ints[inv][b] * ints[0][a]) return false;
            return true;
        };
        for (bool clash = true; clash;) {
            ints.assign(cp.invocations, {});
            for (auto& v : ints)
                for (std::uint32_t i = 0; i < n_ints + 1; ++i) v.push_back(uni(2, 9));
            for (std::uint32_t inv = 0; inv < cp.invocations; ++inv)
                for (std::uint32_t i = 0; i < n_ints + 1; ++i) ints[inv][i] += 11 * inv + 3 * i * inv;
            clash = false;
            for (std::uint32_t a = 0; a <= n_ints && !clash && cp.invocations > 1; ++a)
                for (std::uint32_t b = a + 1; b <= n_ints && !clash; ++b) clash = proportional(a, b);
        }
        auto val = [&](std::uint32_t inv, std::uint32_t slot) {
            if (slot == struct_n_slot) return ints[inv][n_ints];
            return ints[inv][slot - int_base];
        };
        auto extent = [&](const PlantedBuffer& pb, std::uint32_t inv) -> std::vector<ByteRange> {
            if (pb.kind == PlantedBuffer::Kind::Fixed) return {{0, pb.fixed_size}};
            if (pb.kind == PlantedBuffer::Kind::Linear) {
                std::uint64_t s = pb.coeff;
                for (auto sl : pb.size_slots) s *= val(inv, sl);
                return {{0, s}};
            }
            std::uint64_t chunk = pb.chunk_coeff * val(inv, pb.chunk_slot);
            std::uint64_t st = pb.stride_coeff * val(inv, pb.stride_slot);
            std::vector<ByteRange> rs;
            for (std::uint64_t i = 0; i < val(inv, pb.count_slot); ++i) rs.push_back({i * st, chunk});
            return rs;
        };
        // Chunks must stay apart for the strided law to be observable.
        for (auto& pb : pk.buffers) {
            if (pb.kind != PlantedBuffer::Kind::Strided) continue;
            for (std::uint32_t inv = 0; inv < cp.invocations; ++inv)
                while (pb.stride_coeff * val(inv, pb.stride_slot) <= pb.chunk_coeff * val(inv, pb.chunk_slot))
                    pb.stride_coeff *= 2;
        }
        std::vector<Allocation> allocs;
        for (const auto& pb : pk.buffers) {
            std::uint64_t need = 1;
            for (std::uint32_t inv = 0; inv < cp.invocations; ++inv)
                for (const auto& r : extent(pb, inv)) need = std::max(need, r.end());
            allocs.push_back(space.allocate(need));
            out.task.allocations.push_back(allocs.back());
        }
        Dim3 grid{static_cast<std::uint32_t>(uni(1, 64)), 1, 1};
        Dim3 block{static_cast<std::uint32_t>(32 * uni(1, 8)), 1, 1};
        for (std::uint32_t inv = 0; inv < cp.invocations; ++inv) {
            Command c;
            c.kernel_name = pk.name;
            c.grid = grid;
            c.block = block;
            for (const auto& a : allocs) c.launch_args.push_back(LaunchArg::u64(a.base));
            for (std::uint32_t i = 0; i < n_ints; ++i)
                c.launch_args.push_back(is32[i] ? LaunchArg::u32(static_cast<std::uint32_t>(ints[inv][i]))
                                                : LaunchArg::u64(ints[inv][i]));
            if (packed) {
                std::vector<std::uint8_t> raw(8);
                auto pad = static_cast<std::uint32_t>(uni(0, 0xffffffffull));
                auto n = static_cast<std::uint32_t>(ints[inv][n_ints]);
                for (int i = 0; i < 4; ++i) {
                    raw[static_cast<std::size_t>(i)] = static_cast<std::uint8_t>(pad >> (8 * i));
                    raw[static_cast<std::size_t>(4 + i)] = static_cast<std::uint8_t>(n >> (8 * i));
                }
                c.launch_args.push_back(LaunchArg::raw(raw));
            }
            std::uint64_t bytes = 0;
            for (std::size_t b = 0; b < allocs.size(); ++b)
                for (const auto& r : extent(pk.buffers[b], inv)) {
                    c.ground_truth_access.push_back({allocs[b].base + r.start, r.length});
                    bytes += r.length;
                }
            c.latency_s = opts.cost.memory_bound(bytes);
            c.job_end = true;
            kernels.push_back(std::move(c));
        }
        out.kernels.push_back(std::move(pk));
    }
    finish(out.task, space, planter, opts, std::move(kernels));
    return out;
}

}  // namespace msim
