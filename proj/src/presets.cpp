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

#include "msim/presets.hpp"

#include <algorithm>
#include <cmath>

#include "msim/pipeline.hpp"

namespace msim {

HwConfig make_preset(const std::string& name, std::uint64_t hbm_bytes, std::uint64_t dram_bytes,
                     const SwapCalibration& cal, std::uint64_t page_size) {
    HwConfig hw;
    hw.name = name;
    hw.hbm_capacity_bytes = hbm_bytes;
    hw.dram_capacity_bytes = dram_bytes;
    hw.page_size_bytes = page_size;
    hw.bw_h2d_bytes_per_s = cal.h2d_link_bytes_per_s;
    hw.bw_d2h_bytes_per_s = cal.d2h_link_bytes_per_s;
    // Each swapped page moves 2 pages of data. Serialized: 2P / (e + p).
    // Pipelined in steady state the slower stage sets the pace: 2P / max(e, p).
    // Eviction is taken as the slower stage.
    double two_p = 2.0 * static_cast<double>(page_size);
    double evict_s = two_p / cal.pipelined_swap_bytes_per_s;
    double populate_s = two_p / cal.serialized_swap_bytes_per_s - evict_s;
    if (populate_s <= 0.0 || populate_s > evict_s)
        throw ConfigError("preset " + name + ": swap bandwidths are inconsistent");
    hw.per_page_unmap_s = evict_s - static_cast<double>(page_size) / cal.d2h_link_bytes_per_s;
    hw.per_page_map_s = populate_s - static_cast<double>(page_size) / cal.h2d_link_bytes_per_s;
    if (hw.per_page_unmap_s < 0.0 || hw.per_page_map_s < 0.0)
        throw ConfigError("preset " + name + ": link bandwidth exceeds swap stage rate");
    hw.validate();
    return hw;
}

HwConfig rtx5080() {
    return make_preset("rtx5080", 16ull << 30, 96ull << 30, {41.7e9, 63.5e9, 64.0e9, 35.0e9});
}

HwConfig rtx3080() {
    return make_preset("rtx3080", 10ull << 30, 64ull << 30, {22.22e9, 39.8e9, 32.0e9, 26.0e9});
}

HwConfig preset_by_name(const std::string& name) {
    if (name == "rtx5080") return rtx5080();
    if (name == "rtx3080") return rtx3080();
    throw ConfigError("unknown hardware preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"rtx3080", "rtx5080"}; }

double swap_bandwidth(const HwConfig& hw, bool pipelined, std::uint64_t pages) {
    MigrationPlan plan;
    plan.evict.push_back({0, pages});
    plan.populate.push_back({pages, 2 * pages, true});
    plan.marks.push_back(pages);
    double t = pipelined ? pipeline_time(plan, hw) : sequential_time(plan, hw);
    return 2.0 * static_cast<double>(pages * hw.page_size_bytes) / t;
}

}  // namespace msim
