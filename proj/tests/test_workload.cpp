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


#include <set>
#include <sstream>

#include "doctest.h"
#include "msim/trace.hpp"
#include "msim/workload.hpp"

using namespace msim;

namespace {

std::uint64_t summed(const Command& c) {
    std::uint64_t n = 0;
    for (const auto& r : c.ground_truth_access) n += r.length;
    return n;
}

const Command& first_kernel(const Task& t) {
    for (const auto& c : t.commands)
        if (c.kind == CommandKind::Kernel) return c;
    throw Error("no kernel");
}

WorkloadOptions quiet() {
    WorkloadOptions o;
    o.indirect_rate = 0.0;
    return o;
}

}  // namespace

TEST_CASE("vector add layout") {
    Task t = gen_vector_add(1024, 4, 1, quiet());
    REQUIRE(t.allocations.size() == 3);
    for (const auto& a : t.allocations) CHECK(a.size == 4096);
    const Command& k = first_kernel(t);
    CHECK(pages_of(k.ground_truth_access, 4096).size() == 3);
    CHECK(k.launch_args.at(3) == LaunchArg::u64(1024));
    CHECK(k.launch_args.at(0).value == t.allocations[0].base);
    // One memcpy per allocation before the first kernel.
    CHECK(t.commands[0].kind == CommandKind::MemcpyH2D);
    CHECK(t.commands[2].kind == CommandKind::MemcpyH2D);
    CHECK(t.commands[3].kind == CommandKind::Kernel);

    Task big = gen_vector_add(1 << 20, 4, 10, quiet());
    std::size_t kernels = 0;
    for (const auto& c : big.commands) {
        if (c.kind != CommandKind::Kernel) continue;
        ++kernels;
        CHECK(summed(c) == 3ull * (1 << 20) * 4);
    }
    CHECK(kernels == 10);
    CHECK_THROWS_AS(gen_vector_add(0, 4, 1), ValidationError);
    CHECK_THROWS_AS(gen_vector_add(1ull << 62, 8, 1), ValidationError);
}

TEST_CASE("matmul sizes and cubic latency") {
    Task t = gen_matmul(2, 3, 4, 1, quiet());
    const Command& k = first_kernel(t);
    CHECK(k.ground_truth_access[0].length == 2 * 4 * 4);
    CHECK(k.ground_truth_access[1].length == 4 * 3 * 4);
    CHECK(k.ground_truth_access[2].length == 2 * 3 * 4);
    WorkloadOptions o = quiet();
    o.cost.launch_overhead_s = 0;
    Task a = gen_matmul(1024, 1024, 1024, 4, o), b = gen_matmul(2048, 2048, 2048, 1, o);
    std::size_t kernels = 0;
    for (const auto& c : a.commands)
        if (c.kind == CommandKind::Kernel) {
            ++kernels;
            CHECK(summed(c) == 3ull * 1024 * 1024 * 4);
        }
    CHECK(kernels == 4);
    CHECK(first_kernel(b).latency_s == doctest::Approx(8 * first_kernel(a).latency_s));
}

TEST_CASE("llm-like planted ranges") {
    LlmParams p;
    p.layers = 2;
    p.weight_bytes_per_layer = 1 << 20;
    p.kv_max_bytes = 1 << 20;
    p.decode_steps = 1;
    p.kv_used_fraction_schedule = {0.25};
    Task t = gen_llm_like(p, quiet());
    std::uint64_t total = 0;
    for (const auto& c : t.commands)
        if (c.kind == CommandKind::Kernel) total += summed(c);
    CHECK(total == 2 * (1 << 20) + 2 * (1 << 18));
    const Allocation& w = t.allocations[0];
    std::size_t layer = 0;
    for (const auto& c : t.commands)
        if (c.kind == CommandKind::Kernel) {
            CHECK(c.ground_truth_access[0].start == w.base + layer * (1 << 20));
            CHECK(c.launch_args[2].width == LaunchArg::Width::W32);
            ++layer;
        }

    LlmParams q = p;
    q.decode_steps = 4;
    q.kv_used_fraction_schedule = {0.1, 0.2, 0.2, 0.9};
    Task u = gen_llm_like(q, quiet());
    std::uint64_t prev = 0, step = 0;
    for (const auto& c : u.commands) {
        if (c.kind != CommandKind::Kernel) continue;
        step += summed(c);
        if (c.job_end) {
            CHECK(step >= prev);
            prev = step;
            step = 0;
        }
    }
    q.kv_used_fraction_schedule = {0.1, 0.2, 0.1, 0.9};
    CHECK_THROWS_AS(gen_llm_like(q), ValidationError);
    q.kv_used_fraction_schedule = {0.1, 0.2, 0.3, 1.5};
    CHECK_THROWS_AS(gen_llm_like(q), ValidationError);
}

TEST_CASE("determinism and planted indirect accesses") {
    WorkloadOptions o;
    o.indirect_rate = 0.2;
    o.seed = 42;
    Task a = gen_vector_add(4096, 4, 200, o), b = gen_vector_add(4096, 4, 200, o);
    CHECK(trace_to_string(a) == trace_to_string(b));
    std::size_t planted = 0;
    for (const auto& c : a.commands) {
        if (c.indirect_access.empty()) continue;
        ++planted;
        // The table is reachable through no launch argument.
        const Allocation* table = a.find_allocation(c.indirect_access[0].start);
        REQUIRE(table != nullptr);
        for (const auto& arg : c.launch_args) CHECK_FALSE(table->contains(arg.value));
    }
    CHECK(planted > 20);
    CHECK(planted < 70);
    o.seed = 43;
    CHECK(trace_to_string(gen_vector_add(4096, 4, 200, o)) != trace_to_string(a));
}

TEST_CASE("microbench footprint is exact") {
    MicrobenchParams mp;
    mp.hbm_bytes = 1ull << 30;
    mp.matmul_dim = 1024;
    mp.iterations = 2;
    for (double r : {1.0, 1.5, 2.0, 3.0}) {
        mp.ratio = r;
        auto tasks = gen_microbench(mp);
        REQUIRE(tasks.size() == 4);
        std::uint64_t fp = 0;
        std::set<TaskId> ids;
        for (const auto& t : tasks) fp += t.footprint_bytes(), ids.insert(t.id);
        CHECK(static_cast<double>(fp) == doctest::Approx(r * (1ull << 30)).epsilon(1e-6));
        CHECK(ids.size() == 4);
    }
}

TEST_CASE("trace round trip and errors") {
    WorkloadOptions o;
    o.indirect_rate = 0.3;
    Task t = gen_llm_like(LlmParams{}, o);
    Command s;
    s.kernel_name = "packed";
    s.launch_args = {LaunchArg::raw({0, 1, 2, 3, 0xff, 0xab, 0, 0}), LaunchArg::u64(t.allocations[0].base)};
    s.latency_s = 1.0 / 3.0;
    s.ground_truth_access = {{t.allocations[0].base, 100}};
    s.grid = {4, 5, 6};
    t.commands.push_back(s);
    std::string text = trace_to_string(t);
    std::istringstream in(text);
    Task back = parse_trace(in);
    CHECK(trace_to_string(back) == text);
    CHECK(back.commands == t.commands);
    CHECK(back.allocations == t.allocations);

    std::istringstream spaced("MSIM-TRACE v1\n# c\nALLOC 0 0x1000 4096\n"
                              "KERNEL k 1e-3 args=[ 64:0x1000 , 32:7 ] access=[ (4096, 10) ]\n");
    Task sp = parse_trace(spaced);
    CHECK(sp.commands.at(0).launch_args.at(1) == LaunchArg::u32(7));

    std::istringstream empty("MSIM-TRACE v1\n");
    Task e = parse_trace(empty);
    CHECK(e.commands.empty());
    CHECK(e.cursor == 0);

    std::istringstream bad("MSIM-TRACE v1\nALLOC 0 4096 4096\nKERNEL k x args=[] access=[]\n");
    try {
        parse_trace(bad);
        FAIL("expected a parse error");
    } catch (const ParseError& err) {
        CHECK(err.line() == 3);
    }
    std::istringstream overlap("MSIM-TRACE v1\nALLOC 0 4096 8192\nALLOC 1 8192 4096\n");
    CHECK_THROWS_AS(parse_trace(overlap), ValidationError);
    std::istringstream nohdr("ALLOC 0 4096 8192\n");
    CHECK_THROWS_AS(parse_trace(nohdr), ParseError);
}
