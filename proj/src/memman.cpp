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

#include "msim/memman.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

namespace msim {

void HelperQueue::push(HelperEntry entry) {
    entry.command_index = end_index();
    latencies_.push_back(entry.latency_s);
    entries_.push_back(std::move(entry));
}

void HelperQueue::retire() {
    if (empty()) throw Error("helper queue: retire on empty queue");
    // Release page sets of executed commands; latencies stay for scheduling.
    entries_[head_].predicted = {};
    entries_[head_].overwrite = {};
    ++head_;
}

const HelperEntry& HelperQueue::at(std::size_t idx) const {
    if (idx < first_index() || idx >= end_index()) throw Error("helper queue: index not pending");
    return entries_[idx - base_];
}

void madvise(EvictionList& list, const PageSet& pages) { list.move_to_tail(pages); }

std::vector<PageSet> entry_first_use(const HelperQueue& helper, std::size_t cursor,
                                     std::size_t end) {
    std::vector<PageSet> out;
    PageSet seen;
    for (std::size_t i = cursor; i < end; ++i) {
        const PageSet& pred = helper.at(i).predicted;
        PageSet fresh = pred.difference(seen);
        seen = seen.union_with(pred);
        out.push_back(std::move(fresh));
    }
    return out;
}

ReorderStats reorder_for_opt(EvictionList& list, const Timeline& timeline,
                             const std::map<TaskId, const HelperQueue*>& helpers,
                             const MadviseCost& cost) {
    ReorderStats stats;
    for (auto e = timeline.rbegin(); e != timeline.rend(); ++e) {
        auto it = helpers.find(e->task);
        if (it == helpers.end() || it->second == nullptr) continue;
        const HelperQueue& helper = *it->second;
        std::size_t cursor = std::max(e->resume_cursor, helper.first_index());
        std::size_t end = std::min(slice_end(helper.latencies(), cursor, e->timeslice_s),
                                   helper.end_index());
        if (cursor >= end) continue;
        std::vector<PageSet> first_use = entry_first_use(helper, cursor, end);
        ++stats.calls;
        stats.overhead_s += cost.per_call_s;
        // Latest first use goes to the tail first, so the earliest ends up last.
        for (auto s = first_use.rbegin(); s != first_use.rend(); ++s) {
            if (s->empty()) continue;
            madvise(list, *s);
            std::uint64_t n = s->size();
            stats.pages_advised += n;
            stats.overhead_s += cost.per_page_s * static_cast<double>(n);
        }
    }
    return stats;
}

std::uint64_t MigrationPlan::evict_pages() const {
    std::uint64_t n = 0;
    for (const auto& r : evict) n += r.size();
    return n;
}

std::uint64_t MigrationPlan::populate_pages() const {
    std::uint64_t n = 0;
    for (const auto& r : populate) n += r.size();
    return n;
}

std::uint64_t MigrationPlan::transfer_pages() const {
    std::uint64_t n = 0;
    for (const auto& r : populate)
        if (r.transfer) n += r.size();
    return n;
}

PageSet MigrationPlan::populate_set() const {
    PageSet s;
    for (const auto& r : populate) s = s.union_with(PageSet::from_run(r.lo, r.hi));
    return s;
}

PageSet MigrationPlan::evict_set() const {
    PageSet s;
    for (const auto& r : evict) s = s.union_with(PageSet::from_run(r.lo, r.hi));
    return s;
}

std::string MigrationPlan::to_string() const {
    std::ostringstream os;
    os << "evict=[";
    for (std::size_t i = 0; i < evict.size(); ++i)
        os << (i ? "," : "") << evict[i].lo << ".." << evict[i].hi - 1;
    os << "] populate=[";
    for (std::size_t i = 0; i < populate.size(); ++i)
        os << (i ? "," : "") << populate[i].lo << ".." << populate[i].hi - 1
           << (populate[i].transfer ? "" : "*");
    os << "] marks=[";
    for (std::size_t i = 0; i < marks.size(); ++i) os << (i ? "," : "") << marks[i];
    os << "] free=" << free_pages << (truncated ? " truncated" : "");
    return os.str();
}

namespace {

void append_populate(MigrationPlan& plan, const PageSet& pages, const PageSet& overwrite) {
    PageSet moved = pages.difference(overwrite);
    PageSet mapped = pages.intersection(overwrite);
    // Keep ascending address order within one command's pages.
    auto a = moved.runs().begin();
    auto b = mapped.runs().begin();
    while (a != moved.runs().end() || b != mapped.runs().end()) {
        bool take_a = b == mapped.runs().end() || (a != moved.runs().end() && a->lo < b->lo);
        const PageRun& r = take_a ? *a++ : *b++;
        if (!plan.populate.empty() && plan.populate.back().hi == r.lo &&
            plan.populate.back().transfer == take_a) {
            plan.populate.back().hi = r.hi;
        } else {
            plan.populate.push_back({r.lo, r.hi, take_a});
        }
    }
}

}  // namespace

MigrationPlan plan_migration(const EvictionList& list, std::span<const PlannedCommand> commands,
                             std::uint64_t capacity_pages) {
    MigrationPlan plan;
    plan.free_pages = capacity_pages > list.size() ? capacity_pages - list.size() : 0;
    PageSet accepted;
    std::uint64_t accepted_pages = 0;
    std::uint64_t populated = 0;
    for (const auto& cmd : commands) {
        if (!plan.truncated) {
            PageSet fresh = cmd.predicted.difference(accepted);
            std::uint64_t n = fresh.size();
            if (accepted_pages + n > capacity_pages) {
                fresh = fresh.prefix(capacity_pages - accepted_pages);
                n = fresh.size();
                plan.truncated = true;
            }
            if (!plan.truncated) ++plan.covered;
            accepted = accepted.union_with(fresh);
            accepted_pages += n;
            PageSet missing = fresh.difference(list.resident_part(fresh));
            append_populate(plan, missing, cmd.overwrite);
            populated += missing.size();
        }
        plan.marks.push_back(populated);
    }
    std::uint64_t need = populated > plan.free_pages ? populated - plan.free_pages : 0;
    if (need > 0) {
        for (const auto& v : list.select_victims(need, accepted)) {
            if (!plan.evict.empty() && plan.evict.back().hi == v.lo) plan.evict.back().hi = v.hi;
            else plan.evict.push_back(v);
        }
    }
    return plan;
}

MigrationPlan plan_migration(const EvictionList& list, const PageSet& working_set,
                             std::uint64_t capacity_pages) {
    PlannedCommand cmd{working_set, {}};
    return plan_migration(list, std::span<const PlannedCommand>(&cmd, 1), capacity_pages);
}

void apply_plan(EvictionList& list, const MigrationPlan& plan) {
    list.remove(plan.evict_set());
    for (const auto& r : plan.populate) list.push_tail(PageSet::from_run(r.lo, r.hi));
}

OracleResult belady_oracle(std::span<const PageId> sequence, std::size_t frames) {
    OracleResult res;
    if (frames == 0) throw Error("belady_oracle: frames must be >= 1");
    std::vector<PageId> resident;
    constexpr std::size_t kNever = std::numeric_limits<std::size_t>::max();
    for (std::size_t i = 0; i < sequence.size(); ++i) {
        PageId p = sequence[i];
        if (std::find(resident.begin(), resident.end(), p) != resident.end()) continue;
        ++res.faults;
        if (resident.size() == frames) {
            std::size_t victim = 0;
            std::size_t victim_next = 0;
            for (std::size_t r = 0; r < resident.size(); ++r) {
                std::size_t next = kNever;
                for (std::size_t j = i + 1; j < sequence.size(); ++j) {
                    if (sequence[j] == resident[r]) {
                        next = j;
                        break;
                    }
                }
                bool better = next > victim_next ||
                              (next == victim_next && resident[r] < resident[victim]);
                if (r == 0 || better) {
                    victim = r;
                    victim_next = next;
                }
            }
            res.evictions.push_back({i, resident[victim]});
            resident.erase(resident.begin() + static_cast<std::ptrdiff_t>(victim));
        }
        resident.push_back(p);
    }
    return res;
}

}  // namespace msim
