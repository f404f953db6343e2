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
#include <map>
#include <set>
#include <utility>
#include <vector>

#include "msim/page_set.hpp"

namespace msim {

/// Ordered set of HBM-resident pages. The head is the next eviction victim,
/// the tail is the most protected position.
///
/// Pages are held as address-contiguous runs. Each run carries a sequence
/// number; list order is (seq, lo), so a run split in two keeps both halves
/// adjacent and in place.
class EvictionList {
public:
    std::uint64_t size() const { return pages_; }
    bool empty() const { return pages_ == 0; }
    bool contains(PageId page) const;

    PageSet resident() const;
    /// Pages of `set` that are currently resident.
    PageSet resident_part(const PageSet& set) const;

    /// Append non-resident pages at the tail in ascending order. Pages
    /// already resident are left where they are.
    void push_tail(const PageSet& pages);

    /// Move the resident members of `pages` to the tail, keeping their
    /// relative list order. Non-resident pages are ignored.
    void move_to_tail(const PageSet& pages);

    /// Remove up to `count` pages from the head; returns them in list order.
    std::vector<PageRun> pop_head(std::uint64_t count);

    /// First `count` pages from the head without removing them.
    std::vector<PageRun> peek_head(std::uint64_t count) const;

    void remove(const PageSet& pages);
    /// First `count` pages from the head that are not in `protect`.
    std::vector<PageRun> select_victims(std::uint64_t count, const PageSet& protect) const;

    /// All pages head to tail.
    std::vector<PageId> order() const;
    /// Runs head to tail.
    std::vector<PageRun> order_runs() const;

    std::size_t run_count() const { return by_addr_.size(); }

private:
    struct RunInfo {
        PageId hi;
        std::uint64_t seq;
    };
    using Key = std::pair<std::uint64_t, PageId>;  // (seq, lo)

    /// Detach the resident parts of [lo, hi) and return them as (key, run) pieces.
    void extract(PageId lo, PageId hi, std::vector<std::pair<Key, PageRun>>& out);
    void add_run(PageId lo, PageId hi, std::uint64_t seq);
    void erase_run(std::map<PageId, RunInfo>::iterator it);
    void append(PageId lo, PageId hi);

    std::map<PageId, RunInfo> by_addr_;
    std::set<Key> by_order_;
    std::uint64_t next_seq_ = 1;
    std::uint64_t pages_ = 0;
};

}  // namespace msim
