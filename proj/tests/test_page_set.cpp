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


#include <random>
#include <set>

#include "doctest.h"
#include "msim/core.hpp"
#include "msim/page_set.hpp"

using msim::PageSet;

namespace {

std::set<msim::PageId> naive(const PageSet& s) {
    auto v = s.to_vector();
    return {v.begin(), v.end()};
}

PageSet random_set(std::mt19937_64& rng, int universe) {
    PageSet s;
    std::uniform_int_distribution<int> coin(0, 2);
    for (int p = 0; p < universe; ++p)
        if (coin(rng) == 0) s.insert(static_cast<msim::PageId>(p));
    return s;
}

// Every address in the range, divided by the page size: the slow way.
std::set<msim::PageId> brute_pages(msim::Addr start, std::uint64_t len, std::uint64_t pg) {
    std::set<msim::PageId> out;
    for (msim::Addr a = start; a < start + len; ++a) out.insert(a / pg);
    return out;
}

}  // namespace

TEST_CASE("pages_of boundary cases") {
    CHECK(msim::pages_of({0, 4096}, 4096) == PageSet{0});
    CHECK(msim::pages_of({4095, 2}, 4096) == PageSet{0, 1});
    auto p = msim::pages_of({8192, 12288}, 4096);
    auto expect = brute_pages(8192, 12288, 4096);
    CHECK(naive(p) == expect);
    CHECK(p == PageSet{2, 3, 4});
    CHECK_THROWS_AS(msim::pages_of({100, 0}, 4096), msim::Error);
}

TEST_CASE("pages_of agrees with address enumeration and bounds") {
    std::mt19937_64 rng(7);
    std::uniform_int_distribution<std::uint64_t> start(0, 40000), len(1, 20000);
    for (int i = 0; i < 200; ++i) {
        auto s = start(rng);
        auto l = len(rng);
        auto p = msim::pages_of({s, l}, 4096);
        CHECK(naive(p) == brute_pages(s, l, 4096));
        std::uint64_t lo = (l + 4095) / 4096;
        CHECK(p.size() >= lo);
        CHECK(p.size() <= lo + 1);
        // Monotone: a longer range keeps every page.
        CHECK(p.is_subset_of(msim::pages_of({s, l + 5000}, 4096)));
    }
}

TEST_CASE("set algebra matches std::set") {
    std::mt19937_64 rng(11);
    for (int i = 0; i < 300; ++i) {
        PageSet a = random_set(rng, 80), b = random_set(rng, 80);
        auto na = naive(a), nb = naive(b);
        std::set<msim::PageId> u = na, d, x;
        u.insert(nb.begin(), nb.end());
        for (auto v : na) (nb.count(v) ? x : d).insert(v);
        CHECK(naive(a.union_with(b)) == u);
        CHECK(naive(a.difference(b)) == d);
        CHECK(naive(a.intersection(b)) == x);
        CHECK(a.size() == na.size());
        CHECK(a.is_subset_of(a.union_with(b)));
        CHECK(a.difference(b).union_with(a.intersection(b)) == a);
        // Canonical runs: sorted, disjoint, non-adjacent.
        PageSet un = a.union_with(b);
        const auto& r = un.runs();
        for (std::size_t k = 1; k < r.size(); ++k) CHECK(r[k - 1].hi < r[k].lo);
    }
}

TEST_CASE("prefix and contains") {
    PageSet s{1, 2, 3, 10, 11, 20};
    CHECK(s.prefix(4) == PageSet{1, 2, 3, 10});
    CHECK(s.prefix(0).empty());
    CHECK(s.prefix(100) == s);
    CHECK(s.contains(10));
    CHECK_FALSE(s.contains(4));
    CHECK(s.runs().size() == 3);
    PageSet t;
    t.insert_run(5, 8);
    t.insert_run(0, 5);
    CHECK(t == PageSet::from_run(0, 8));
    CHECK(t.runs().size() == 1);
}
