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

#include "msim/core.hpp"

#include <algorithm>

namespace msim {

void HwConfig::validate() const {
    if (hbm_capacity_bytes == 0) throw ConfigError("hw: hbm_capacity_bytes must be positive");
    if (dram_capacity_bytes == 0) throw ConfigError("hw: dram_capacity_bytes must be positive");
    if (page_size_bytes == 0 || (page_size_bytes & (page_size_bytes - 1)) != 0)
        throw ConfigError("hw: page_size_bytes must be a power of two");
    if (!(bw_d2h_bytes_per_s > 0) || !(bw_h2d_bytes_per_s > 0))
        throw ConfigError("hw: bandwidths must be positive");
    if (fault_control_plane_s < 0 || fault_transfer_s < 0 || per_page_unmap_s < 0 ||
        per_page_map_s < 0 || per_page_madvise_s < 0 || madvise_call_s < 0)
        throw ConfigError("hw: costs must be non-negative");
    if (copy_engines < 1) throw ConfigError("hw: copy_engines must be >= 1");
    if (hbm_capacity_bytes < page_size_bytes) throw ConfigError("hw: HBM smaller than one page");
}

ByteRange Command::memcpy_device_range() const {
    if (kind == CommandKind::MemcpyH2D) return {memcpy_dst(), memcpy_size()};
    return {memcpy_src(), memcpy_size()};
}

std::uint64_t Task::footprint_bytes() const {
    std::uint64_t n = 0;
    for (const auto& a : allocations) n += a.size;
    return n;
}

const Allocation* Task::find_allocation(Addr a) const {
    for (const auto& al : allocations)
        if (al.contains(a)) return &al;
    return nullptr;
}

void Task::validate(std::uint64_t page_size) const {
    std::vector<const Allocation*> sorted;
    for (const auto& a : allocations) {
        if (a.size == 0) throw ValidationError("allocation " + std::to_string(a.id) + " has zero size");
        if (a.base % page_size != 0)
            throw ValidationError("allocation " + std::to_string(a.id) + " is not page-aligned");
        sorted.push_back(&a);
    }
    std::sort(sorted.begin(), sorted.end(),
              [](const Allocation* x, const Allocation* y) { return x->base < y->base; });
    for (std::size_t i = 1; i < sorted.size(); ++i) {
        if (sorted[i - 1]->base + sorted[i - 1]->size > sorted[i]->base)
            throw ValidationError("allocations " + std::to_string(sorted[i - 1]->id) + " and " +
                                  std::to_string(sorted[i]->id) + " overlap");
    }
    if (cursor > commands.size()) throw ValidationError("task cursor out of range");
    for (std::size_t i = 0; i < commands.size(); ++i) {
        const auto& c = commands[i];
        if (!(c.latency_s > 0))
            throw ValidationError("command " + std::to_string(i) + " has non-positive latency");
        for (const auto& r : c.ground_truth_access) {
            if (r.length == 0)
                throw ValidationError("command " + std::to_string(i) + " has an empty access range");
            const Allocation* a = find_allocation(r.start);
            if (a == nullptr || r.end() > a->base + a->size)
                throw ValidationError("command " + std::to_string(i) +
                                      " accesses memory outside its task's allocations");
        }
    }
}

PageSet pages_of(const ByteRange& range, std::uint64_t page_size) {
    if (range.length == 0) throw Error("pages_of: zero-length range");
    PageId lo = range.start / page_size;
    PageId hi = (range.start + range.length - 1) / page_size + 1;
    return PageSet::from_run(lo, hi);
}

PageSet pages_of(const std::vector<ByteRange>& ranges, std::uint64_t page_size) {
    std::vector<ByteRange> sorted = ranges;
    std::sort(sorted.begin(), sorted.end(),
              [](const ByteRange& a, const ByteRange& b) { return a.start < b.start; });
    PageSet s;
    for (const auto& r : sorted) {
        if (r.length == 0) continue;
        s.insert_run(r.start / page_size, (r.start + r.length - 1) / page_size + 1);
    }
    return s;
}

PageSet allocation_pages(const Task& task, std::uint64_t page_size) {
    std::vector<ByteRange> ranges;
    for (const auto& a : task.allocations) ranges.push_back({a.base, a.size});
    return pages_of(ranges, page_size);
}

const char* to_string(CommandKind kind) {
    switch (kind) {
        case CommandKind::Kernel: return "KERNEL";
        case CommandKind::MemcpyH2D: return "H2D";
        case CommandKind::MemcpyD2H: return "D2H";
    }
    return "?";
}

}  // namespace msim
