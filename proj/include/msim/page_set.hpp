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
#include <initializer_list>
#include <string>
#include <vector>

namespace msim {

using PageId = std::uint64_t;

/// Half-open run of consecutive pages [lo, hi).
struct PageRun {
    PageId lo = 0;
    PageId hi = 0;

    std::uint64_t size() const { return hi - lo; }
    bool operator==(const PageRun&) const = default;
};

/// Set of page ids stored as sorted, disjoint, non-adjacent runs.
///
/// Workloads touch large contiguous buffers, so a run-length representation
/// keeps multi-gigabyte working sets at a handful of entries. Iteration is
/// always in ascending page order.
class PageSet {
public:
    PageSet() = default;
    PageSet(std::initializer_list<PageId> pages);

    static PageSet from_run(PageId lo, PageId hi);
    static PageSet from_pages(const std::vector<PageId>& pages);

    bool empty() const { return runs_.empty(); }
    std::uint64_t size() const;
    bool contains(PageId page) const;

    /// Add [lo, hi); merges with neighbours.
    void insert_run(PageId lo, PageId hi);
    void insert(PageId page) { insert_run(page, page + 1); }

    PageSet union_with(const PageSet& other) const;
    PageSet difference(const PageSet& other) const;
    PageSet intersection(const PageSet& other) const;
    bool is_subset_of(const PageSet& other) const;

    /// First `count` pages in ascending order.
    PageSet prefix(std::uint64_t count) const;

    const std::vector<PageRun>& runs() const { return runs_; }
    std::vector<PageId> to_vector() const;

    bool operator==(const PageSet&) const = default;

    std::string to_string() const;

private:
    std::vector<PageRun> runs_;
};

}  // namespace msim
