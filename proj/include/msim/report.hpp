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

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "msim/analyzer.hpp"
#include "msim/experiment.hpp"
#include "msim/predictor.hpp"

namespace msim {

/// Every CSV starts with a `version` column holding this value. Bump it
/// when a column is added, removed or changes meaning.
inline constexpr int kCsvSchemaVersion = 1;

/// Shortest round-trippable form, fixed across platforms: "%.9g" with
/// negative zero folded to 0.
std::string format_number(double v);

/// One row per (scenario, ratio, mode), full counters.
void write_metrics_csv(const std::vector<PointResult>& rows, std::ostream& out);
/// The three sweep panels: normalized throughput, faults and migrated
/// bytes per task.
void write_sweep_csv(const std::vector<PointResult>& rows, std::ostream& out);
/// Kernel-level false negative and false positive rates, in percent.
void write_accuracy_csv(const std::vector<KernelAccuracy>& rows, std::ostream& out);
/// Access-type shares in percent: one row per kernel, then an ALL row.
void write_distribution_csv(const std::vector<KernelDescriptor>& descs,
                            const std::map<std::string, std::vector<InvocationRecord>>& records,
                            std::ostream& out);
/// Plain-text table for terminals.
void write_summary(const std::vector<PointResult>& rows, std::ostream& out);

struct ChartSeries {
    std::string name;
    std::vector<double> x;
    std::vector<double> y;
};

struct ChartSpec {
    std::string title;
    std::string x_label;
    std::string y_label;
    bool log_y = false;
    std::vector<ChartSeries> series;
};

/// Self-contained SVG line chart with axes, ticks and a legend.
std::string svg_line_chart(const ChartSpec& spec);

/// Sweep panels as charts keyed by file stem: throughput, faults, migrated.
std::map<std::string, ChartSpec> sweep_charts(const std::vector<PointResult>& rows);

}  // namespace msim
