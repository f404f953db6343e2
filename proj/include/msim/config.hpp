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
#include "msim/engine.hpp"
#include "msim/scheduler.hpp"
#include "msim/workload.hpp"

namespace msim {

struct VectorAddParams {
    std::uint32_t tasks = 1;
    std::uint64_t elems = 1 << 20;
    std::uint64_t elem_bytes = 4;
    std::uint32_t iterations = 10;
    double indirect_rate = 0.0;
};

struct WorkloadSpec {
    enum class Kind { Microbench, LlmMix, VectorAdd, Trace };
    Kind kind = Kind::Microbench;
    MicrobenchParams microbench;
    LlmMixParams llm_mix;
    VectorAddParams vector_add;
    /// Trace workload: one task per file, ids taken from the files.
    std::vector<std::string> trace_paths;
    /// Subscription used by `run`; 0 keeps the configured HBM as is.
    double ratio = 0.0;
};

const char* to_string(WorkloadSpec::Kind k);

/// One experiment manifest. See docs/config.md for the file schema.
struct ScenarioConfig {
    std::string name = "scenario";
    std::uint64_t seed = 1;
    HwConfig hw;
    WorkloadSpec workload;
    Policy policy = Policy::round_robin(100e-3);
    std::vector<Mode> modes{Mode::um(), Mode::proactive(), Mode::ideal()};
    double time_budget_s = 0.0;
    /// Metrics cover [warmup_s, end] when positive.
    double warmup_s = 0.0;
    std::vector<double> ratios;
};

/// Parses TOML text; `origin` names the source in diagnostics. Unknown
/// keys and missing sections raise ConfigError naming the section.
ScenarioConfig parse_config(const std::string& text, const std::string& origin = "<config>");
/// Relative trace paths resolve against the config file's directory.
ScenarioConfig load_config(const std::string& path);

/// Accepts "um", "um:<prefetch>", "ideal" and Mode::name() spellings of
/// proactive modes, e.g. "proactive-alloc-serial".
Mode parse_mode(const std::string& name);

}  // namespace msim
