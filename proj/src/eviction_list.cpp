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

#include "msim/eviction_list.hpp"

#include <algorithm>

namespace msim {

bool EvictionList::contains(PageId page) const {
    auto it = by_addr_.upper_bound(page);
    if (it == by_addr_.begin()) return false;
    --it;
    return page < it->second.hi;
}

PageSet EvictionList::resident() const {
    PageSet s;
    for (const auto& [lo, info] : by_addr_) s.insert_run(lo, info.hi);
    return s;
}

PageSet EvictionList::resident_part(const PageSet& set) const {
    PageSet out;
    for (const auto& r : set.runs()) {
        auto it = by_addr_.upper_bound(r.lo);
        if (it != by_addr_.begin()) --it;
        for (; it != by_addr_.end() && it->first < r.hi; ++it) {
            PageId lo = std::max(it->first, r.lo);
            PageId hi = std::min(it->second.hi, r.hi);
            if (lo < hi) out.insert_run(lo, hi);
        }
    }
    return out;
}

void EvictionList::add_run(PageId lo, PageId hi, std::uint64_t seq) {
    by_addr_.emplace(lo, RunInfo{hi, seq});
    by_order_.emplace(seq, lo);
    pages_ += hi - lo;
}

void EvictionList::erase_run(std::map<PageId, RunInfo>::iterator it) {
    by_order_.erase({it->second.seq, it->first});
    pages_ -= it->second.hi - it->first;
    by_addr_.erase(it);
}

void EvictionList::extract(PageId lo, PageId hi, std::vector<std::pair<Key, PageRun>>& out) {
    auto it = by_addr_.upper_bound(lo);
    if (it != by_addr_.begin()) --it;
    while (it != by_addr_.end() && it->first < hi) {
        PageId rlo = it->first;
        PageId rhi = it->second.hi;
        std::uint64_t seq = it->second.seq;
        if (rhi <= lo) {
            ++it;
            continue;
        }
        PageId cut_lo = std::max(rlo, lo);
        PageId cut_hi = std::min(rhi, hi);
        auto next = std::next(it);
        erase_run(it);
        if (rlo < cut_lo) add_run(rlo, cut_lo, seq);
        if (cut_hi < rhi) add_run(cut_hi, rhi, seq);
        out.push_back({{seq, cut_lo}, {cut_lo, cut_hi}});
        it = next;
        // A right remainder was re-inserted at cut_hi; it lies beyond hi.
        if (cut_hi < rhi) break;
    }
}

void EvictionList::append(PageId lo, PageId hi) {
    // The current tail run absorbs an address-contiguous extension.
    if (!by_order_.empty()) {
        const Key& tail = *by_order_.rbegin();
        auto it = by_addr_.find(tail.second);
        if (it != by_addr_.end() && it->second.hi == lo) {
            it->second.hi = hi;
            pages_ += hi - lo;
            return;
        }
    }
    add_run(lo, hi, next_seq_++);
}

void EvictionList::push_tail(const PageSet& pages) {
    PageSet fresh = pages.difference(resident_part(pages));
    for (const auto& r : fresh.runs()) append(r.lo, r.hi);
}

void EvictionList::move_to_tail(const PageSet& pages) {
    std::vector<std::pair<Key, PageRun>> pieces;
    for (const auto& r : pages.runs()) extract(r.lo, r.hi, pieces);
    std::sort(pieces.begin(), pieces.end(),
              [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [key, run] : pieces) append(run.lo, run.hi);
}

std::vector<PageRun> EvictionList::pop_head(std::uint64_t count) {
    std::vector<PageRun> out;
    while (count > 0 && !by_order_.empty()) {
        Key head = *by_order_.begin();
        auto it = by_addr_.find(head.second);
        PageId lo = it->first;
        PageId hi = it->second.hi;
        std::uint64_t take = std::min<std::uint64_t>(count, hi - lo);
        erase_run(it);
        if (lo + take < hi) add_run(lo + take, hi, head.first);
        out.push_back({lo, lo + take});
        count -= take;
    }
    return out;
}

std::vector<PageRun> EvictionList::peek_head(std::uint64_t count) const {
    std::vector<PageRun> out;
    for (auto k = by_order_.begin(); k != by_order_.end() && count > 0; ++k) {
        PageId hi = by_addr_.at(k->second).hi;
        std::uint64_t take = std::min<std::uint64_t>(count, hi - k->second);
        out.push_back({k->second, k->second + take});
        count -= take;
    }
    return out;
}

void EvictionList::remove(const PageSet& pages) {
    std::vector<std::pair<Key, PageRun>> pieces;
    for (const auto& r : pages.runs()) extract(r.lo, r.hi, pieces);
}

std::vector<PageRun> EvictionList::select_victims(std::uint64_t count, const PageSet& protect) const {
    std::vector<PageRun> out;
    for (auto k = by_order_.begin(); k != by_order_.end() && count > 0; ++k) {
        PageId lo = k->second, hi = by_addr_.at(lo).hi;
        PageSet candidates = PageSet::from_run(lo, hi);
        if (!protect.empty()) candidates = candidates.difference(protect);
        for (const auto& v : candidates.runs()) {
            if (count == 0) break;
            std::uint64_t take = std::min<std::uint64_t>(count, v.size());
            out.push_back({v.lo, v.lo + take});
            count -= take;
        }
    }
    return out;
}

std::vector<PageRun> EvictionList::order_runs() const {
    std::vector<PageRun> out;
    for (const auto& k : by_order_) out.push_back({k.second, by_addr_.at(k.second).hi});
    return out;
}

std::vector<PageId> EvictionList::order() const {
    std::vector<PageId> out;
    for (const auto& r : order_runs())
        for (PageId p = r.lo; p < r.hi; ++p) out.push_back(p);
    return out;
}

}  // namespace msim
