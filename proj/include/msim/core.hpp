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

#include <array>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "msim/page_set.hpp"

namespace msim {

using Addr = std::uint64_t;
using TaskId = std::uint32_t;

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Malformed input file; carries the 1-based line number.
class ParseError : public Error {
public:
    ParseError(const std::string& what, int line)
        : Error("line " + std::to_string(line) + ": " + what), line_(line) {}
    int line() const { return line_; }

private:
    int line_;
};

class ValidationError : public Error {
public:
    using Error::Error;
};

class ConfigError : public Error {
public:
    using Error::Error;
};

struct HwConfig {
    std::string name = "custom";
    std::uint64_t hbm_capacity_bytes = 16ull << 30;
    std::uint64_t dram_capacity_bytes = 96ull << 30;
    std::uint64_t page_size_bytes = 4096;
    double bw_d2h_bytes_per_s = 34.0e9;
    double bw_h2d_bytes_per_s = 64.0e9;
    double fault_control_plane_s = 31.79e-6;
    double fault_transfer_s = 1.35e-6;
    double per_page_unmap_s = 0.0;
    double per_page_map_s = 0.0;
    double per_page_madvise_s = 2.0e-11;
    double madvise_call_s = 2.0e-6;
    int copy_engines = 2;

    std::uint64_t hbm_pages() const { return hbm_capacity_bytes / page_size_bytes; }
    double evict_stage_s() const {
        return per_page_unmap_s + static_cast<double>(page_size_bytes) / bw_d2h_bytes_per_s;
    }
    double populate_stage_s() const {
        return static_cast<double>(page_size_bytes) / bw_h2d_bytes_per_s + per_page_map_s;
    }
    double fault_cost_s() const { return fault_control_plane_s + fault_transfer_s; }

    /// Throws ConfigError when an invariant is violated.
    void validate() const;
};

struct ByteRange {
    Addr start = 0;
    std::uint64_t length = 0;

    Addr end() const { return start + length; }
    bool operator==(const ByteRange&) const = default;
};

struct Allocation {
    std::uint32_t id = 0;
    Addr base = 0;
    std::uint64_t size = 0;
    TaskId owner = 0;

    bool contains(Addr a) const { return a >= base && a < base + size; }
    bool operator==(const Allocation&) const = default;
};

enum class CommandKind { Kernel, MemcpyH2D, MemcpyD2H };

/// One launch argument. Struct arguments carry their raw bytes and are
/// sliced into candidate integer slots by the analyzer.
struct LaunchArg {
    enum class Width : std::uint8_t { W32, W64, Bytes };
    Width width = Width::W64;
    std::uint64_t value = 0;
    std::vector<std::uint8_t> bytes;

    static LaunchArg u64(std::uint64_t v) { return {Width::W64, v, {}}; }
    static LaunchArg u32(std::uint32_t v) { return {Width::W32, v, {}}; }
    static LaunchArg raw(std::vector<std::uint8_t> b) { return {Width::Bytes, 0, std::move(b)}; }

    bool operator==(const LaunchArg&) const = default;
};

using Dim3 = std::array<std::uint32_t, 3>;

struct Command {
    CommandKind kind = CommandKind::Kernel;
    std::string kernel_name;
    std::vector<LaunchArg> launch_args;
    Dim3 grid{1, 1, 1};
    Dim3 block{1, 1, 1};
    double latency_s = 0.0;
    std::vector<ByteRange> ground_truth_access;
    /// Subset of ground_truth_access reached through memory-resident
    /// pointers; kept so tests know the planted false-negative share.
    std::vector<ByteRange> indirect_access;
    /// Marks the last command of one logical task iteration.
    bool job_end = false;

    /// Memcpy accessors; launch_args are [src, dst, size].
    Addr memcpy_src() const { return launch_args.at(0).value; }
    Addr memcpy_dst() const { return launch_args.at(1).value; }
    std::uint64_t memcpy_size() const { return launch_args.at(2).value; }
    /// Device-side range a memcpy touches.
    ByteRange memcpy_device_range() const;

    bool operator==(const Command&) const = default;
};

struct Task {
    TaskId id = 0;
    std::vector<Allocation> allocations;
    std::vector<Command> commands;
    std::size_t cursor = 0;
    /// 0 is the highest priority level.
    int priority = 0;
    double arrival_s = 0.0;

    std::uint64_t footprint_bytes() const;
    const Allocation* find_allocation(Addr a) const;
    /// Non-overlap, alignment and in-bounds access checks.
    void validate(std::uint64_t page_size) const;
};

/// Every page overlapping [start, start + length).
PageSet pages_of(const ByteRange& range, std::uint64_t page_size);
PageSet pages_of(const std::vector<ByteRange>& ranges, std::uint64_t page_size);

/// Pages of every allocation of the task.
PageSet allocation_pages(const Task& task, std::uint64_t page_size);

const char* to_string(CommandKind kind);

}  // namespace msim
