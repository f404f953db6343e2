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

#include "msim/page_set.hpp"

#include <algorithm>
#include <sstream>

namespace msim {

PageSet::PageSet(std::initializer_list<PageId> pages) {
    for (PageId p : pages) insert(p);
}

PageSet PageSet::from_run(PageId lo, PageId hi) {
    PageSet s;
    if (hi > lo) s.runs_.push_back({lo, hi});
    return s;
}

PageSet PageSet::from_pages(const std::vector<PageId>& pages) {
    std::vector<PageId> sorted = pages;
    std::sort(sorted.begin(), sorted.end());
    PageSet s;
    for (PageId p : sorted) {
        if (!s.runs_.empty() && s.runs_.back().hi >= p) {
            s.runs_.back().hi = std::max(s.runs_.back().hi, p + 1);
        } else {
            s.runs_.push_back({p, p + 1});
        }
    }
    return s;
}

std::uint64_t PageSet::size() const {
    std::uint64_t n = 0;
    for (const auto& r : runs_) n += r.size();
    return n;
}

bool PageSet::contains(PageId page) const {
    auto it = std::upper_bound(runs_.begin(), runs_.end(), page,
                               [](PageId p, const PageRun& r) { return p < r.lo; });
    if (it == runs_.begin()) return false;
    --it;
    return page < it->hi;
}

void PageSet::insert_run(PageId lo, PageId hi) {
    if (hi <= lo) return;
    // Fast path: appending past the end, the common case when building in order.
    if (runs_.empty() || lo > runs_.back().hi) {
        runs_.push_back({lo, hi});
        return;
    }
    if (lo >= runs_.back().lo) {
        runs_.back().hi = std::max(runs_.back().hi, hi);
        return;
    }
    // First run whose hi >= lo (touching counts as mergeable).
    auto first = std::lower_bound(runs_.begin(), runs_.end(), lo,
                                  [](const PageRun& r, PageId v) { return r.hi < v; });
    auto last = first;
    PageId new_lo = lo;
    PageId new_hi = hi;
    while (last != runs_.end() && last->lo <= hi) {
        new_lo = std::min(new_lo, last->lo);
        new_hi = std::max(new_hi, last->hi);
        ++last;
    }
    if (first == last) {
        runs_.insert(first, {lo, hi});
        return;
    }
    *first = {new_lo, new_hi};
    runs_.erase(first + 1, last);
}

PageSet PageSet::union_with(const PageSet& other) const {
    PageSet out;
    out.runs_.reserve(runs_.size() + other.runs_.size());
    auto a = runs_.begin();
    auto b = other.runs_.begin();
    auto push = [&out](const PageRun& r) {
        if (!out.runs_.empty() && out.runs_.back().hi >= r.lo) {
            out.runs_.back().hi = std::max(out.runs_.back().hi, r.hi);
        } else {
            out.runs_.push_back(r);
        }
    };
    while (a != runs_.end() || b != other.runs_.end()) {
        if (b == other.runs_.end() || (a != runs_.end() && a->lo <= b->lo)) {
            push(*a++);
        } else {
            push(*b++);
        }
    }
    return out;
}

PageSet PageSet::difference(const PageSet& other) const {
    PageSet out;
    auto b = other.runs_.begin();
    for (PageRun r : runs_) {
        PageId cur = r.lo;
        while (b != other.runs_.end() && b->hi <= cur) ++b;
        auto bb = b;
        while (bb != other.runs_.end() && bb->lo < r.hi) {
            if (bb->lo > cur) out.runs_.push_back({cur, bb->lo});
            cur = std::max(cur, bb->hi);
            if (cur >= r.hi) break;
            ++bb;
        }
        if (cur < r.hi) out.runs_.push_back({cur, r.hi});
    }
    return out;
}

PageSet PageSet::intersection(const PageSet& other) const {
    PageSet out;
    auto a = runs_.begin();
    auto b = other.runs_.begin();
    while (a != runs_.end() && b != other.runs_.end()) {
        PageId lo = std::max(a->lo, b->lo);
        PageId hi = std::min(a->hi, b->hi);
        if (lo < hi) out.runs_.push_back({lo, hi});
        if (a->hi < b->hi) {
            ++a;
        } else {
            ++b;
        }
    }
    return out;
}

bool PageSet::is_subset_of(const PageSet& other) const {
    return difference(other).empty();
}

PageSet PageSet::prefix(std::uint64_t count) const {
    PageSet out;
    for (const auto& r : runs_) {
        if (count == 0) break;
        std::uint64_t take = std::min<std::uint64_t>(count, r.size());
        out.runs_.push_back({r.lo, r.lo + take});
        count -= take;
    }
    return out;
}

std::vector<PageId> PageSet::to_vector() const {
    std::vector<PageId> v;
    v.reserve(size());
    for (const auto& r : runs_)
        for (PageId p = r.lo; p < r.hi; ++p) v.push_back(p);
    return v;
}

std::string PageSet::to_string() const {
    std::ostringstream os;
    os << '{';
    bool first = true;
    for (const auto& r : runs_) {
        if (!first) os << ',';
        first = false;
        if (r.size() == 1) {
            os << r.lo;
        } else {
            os << r.lo << ".." << r.hi - 1;
        }
    }
    os << '}';
    return os.str();
}

}  // namespace msim
