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

#include <string>
#include <vector>

#include "msim/core.hpp"

namespace msim {

/// Hardware preset derived from two measured swap bandwidths: serialized
/// (evict then populate, per page) and overlapped on two copy engines.
/// Batched swap bandwidth counts bytes moved in both directions.
struct SwapCalibration {
    double serialized_swap_bytes_per_s;
    double pipelined_swap_bytes_per_s;
    double h2d_link_bytes_per_s;
    double d2h_link_bytes_per_s;
};

HwConfig make_preset(const std::string& name, std::uint64_t hbm_bytes, std::uint64_t dram_bytes,
                     const SwapCalibration& cal, std::uint64_t page_size = 4096);

/// 16 GiB HBM, PCIe 5.0 x16.
HwConfig rtx5080();
/// 10 GiB HBM, PCIe 4.0 x16.
HwConfig rtx3080();

/// Throws ConfigError for an unknown name.
HwConfig preset_by_name(const std::string& name);
std::vector<std::string> preset_names();

/// Bytes swapped per second (both directions) for a balanced N-evict /
/// N-populate plan under the serialized or the pipelined engine.
double swap_bandwidth(const HwConfig& hw, bool pipelined, std::uint64_t pages = 1u << 20);

}  // namespace msim
