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

#include "msim/config.hpp"
#include "msim/engine.hpp"

namespace msim {

/// A scenario instantiated at one subscription ratio.
struct ScenarioInstance {
    HwConfig hw;
    std::vector<Task> tasks;
    double ratio = 0.0;
    std::uint64_t footprint_bytes = 0;
};

/// Generators size their footprint to ratio * HBM; fixed-size workloads
/// (vector_add, trace) shrink HBM to footprint / ratio instead. A ratio
/// of 0 keeps both as configured.
ScenarioInstance instantiate(const ScenarioConfig& cfg, double ratio);

struct PointResult {
    std::string scenario;
    double ratio = 0.0;
    std::string mode;
    std::size_t tasks = 0;
    /// Counters over the measured window.
    Metrics metrics;
    double normalized_throughput = 0.0;

    double faults_per_task() const;
    double migrated_bytes_per_task() const;
};

/// Counters of `b` minus those of `a`; time and work become window spans.
Metrics window_delta(const Metrics& a, const Metrics& b);

/// Runs one mode on an instance. With warmup_s > 0 the metrics cover
/// [warmup, budget] and throughput is normalized over that window.
PointResult run_point(const ScenarioConfig& cfg, const ScenarioInstance& inst, const Mode& mode);

/// Every (ratio, mode) point, sorted by ratio then configured mode order.
/// Points run on up to `jobs` threads; results do not depend on `jobs`.
std::vector<PointResult> run_sweep(const ScenarioConfig& cfg, const std::vector<double>& ratios,
                                   unsigned jobs = 1);

}  // namespace msim
