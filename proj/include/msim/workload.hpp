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
#include <string>
#include <vector>

#include "msim/core.hpp"

namespace msim {

/// Profiled-latency model for generated kernels.
struct KernelCostModel {
    /// Streaming rate of memory-bound kernels: 8.5 GB swept in 12.7 ms.
    double mem_bytes_per_s = 8.5e9 / 12.7e-3;
    double flops_per_s = 56.3e12;
    double memcpy_bytes_per_s = 25.0e9;
    double launch_overhead_s = 2.0e-6;

    double memory_bound(std::uint64_t bytes) const;
    double compute_bound(double flops) const;
    double memcpy(std::uint64_t bytes) const;
};

struct WorkloadOptions {
    TaskId task_id = 0;
    int priority = 0;
    std::uint64_t seed = 1;
    std::uint64_t page_size = 4096;
    KernelCostModel cost;
    /// Probability that a kernel invocation also reads one entry of a
    /// lookup table it receives no pointer to.
    double indirect_rate = 0.0025;
    std::uint64_t lookup_table_bytes = 64 * 1024;
    bool emit_memcpy = true;
    /// Vector add only: kernels per pass over the buffers.
    std::uint32_t kernels_per_iteration = 1;
};

/// Deterministic per-task bump allocator. Tasks get disjoint 1 TiB windows
/// and consecutive allocations are separated by a guard page.
class AddressSpace {
public:
    AddressSpace(TaskId task, std::uint64_t page_size);
    Allocation allocate(std::uint64_t bytes);

private:
    TaskId task_;
    std::uint64_t page_size_;
    Addr next_;
    Addr limit_;
    std::uint32_t next_id_ = 0;
};

Task gen_vector_add(std::uint64_t n_elems, std::uint64_t elem_bytes, std::uint32_t iterations,
                    const WorkloadOptions& opts = {});

Task gen_matmul(std::uint64_t m, std::uint64_t n, std::uint64_t k, std::uint32_t count,
                const WorkloadOptions& opts = {}, std::uint64_t elem_bytes = 4);

struct LlmParams {
    std::uint32_t layers = 2;
    std::uint64_t weight_bytes_per_layer = 1 << 20;
    std::uint64_t kv_max_bytes = 1 << 20;
    std::uint32_t decode_steps = 1;
    std::vector<double> kv_used_fraction_schedule{0.25};
    std::uint64_t bytes_per_token = 4096;
};

/// One monolithic weight buffer sliced per layer plus one KV buffer per
/// layer. Each decode step launches one kernel per layer with args
/// [weight_slice_ptr, kv_ptr, seq_len:u32].
Task gen_llm_like(const LlmParams& params, const WorkloadOptions& opts = {});

/// Kernels of an LLM-like task for one decode step (no memcpy prologue).
std::vector<Command> llm_step_commands(const Task& task, const LlmParams& params,
                                       std::uint32_t step, const WorkloadOptions& opts = {});

/// Several LLM-like decode streams sharing one GPU. Each stream's
/// footprint is ratio * hbm / tasks, split between weights and per-layer
/// KV buffers; the used KV share ramps linearly over the decode steps.
struct LlmMixParams {
    std::uint64_t hbm_bytes = 16ull << 30;
    double ratio = 1.0;
    std::uint32_t tasks = 4;
    std::uint32_t layers = 16;
    double weight_fraction = 0.2;
    double kv_start = 0.10;
    double kv_end = 0.11;
    std::uint32_t decode_steps = 4000;
    std::uint64_t seed = 1;
    std::uint64_t page_size = 4096;
};

std::vector<Task> gen_llm_mix(const LlmMixParams& params);

/// Four-process micro-benchmark: two vector-add and two matmul streams
/// whose total footprint is `ratio` times HBM.
struct MicrobenchParams {
    std::uint64_t hbm_bytes = 16ull << 30;
    double ratio = 1.0;
    std::uint32_t processes = 4;
    /// Touch rate of the vector add streams; one kernel sweeps the whole
    /// footprint per iteration.
    double vecadd_bytes_per_s = 100.0e9;
    std::uint64_t matmul_dim = 8192;
    std::uint32_t kernels_per_iteration = 1;
    std::uint32_t iterations = 1000;
    double indirect_rate = 0.0;
    std::uint64_t seed = 1;
    std::uint64_t page_size = 4096;
};

std::vector<Task> gen_microbench(const MicrobenchParams& params);

/// Buffer access law planted in a synthetic kernel. Slot numbers follow
/// the analyzer's candidate order: scalar arguments first, then the
/// windows of a trailing 8-byte struct argument.
struct PlantedBuffer {
    enum class Kind { Fixed, Linear, Strided };
    Kind kind = Kind::Fixed;
    std::uint32_t ptr_slot = 0;
    std::uint64_t fixed_size = 0;
    /// Linear: size = coeff * product(size_slots).
    std::uint64_t coeff = 1;
    std::vector<std::uint32_t> size_slots;
    /// Strided: chunk = chunk_coeff * s[chunk_slot], stride =
    /// stride_coeff * s[stride_slot], count = s[count_slot].
    std::uint64_t chunk_coeff = 1, stride_coeff = 1;
    std::uint32_t chunk_slot = 0, stride_slot = 0, count_slot = 0;
};

struct PlantedKernel {
    std::string name;
    std::vector<PlantedBuffer> buffers;
};

struct PlantedCorpus {
    Task task;
    std::vector<PlantedKernel> kernels;
};

struct CorpusParams {
    std::uint32_t kernels = 60;
    std::uint32_t invocations = 4;
    std::uint64_t seed = 1;
    double indirect_rate = 0.0;
    std::uint64_t page_size = 4096;
};

/// Kernels with randomly chosen Fixed, Linear and Strided buffers and
/// per-invocation argument variation.
PlantedCorpus gen_planted_corpus(const CorpusParams& params);

}  // namespace msim
