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


#include <map>
#include <vector>

#include "doctest.h"
#include "msim/scheduler.hpp"

using msim::Policy;
using msim::TaskSchedInfo;
using msim::TimelineEntry;

TEST_CASE("round robin timeline") {
    std::vector<double> lat(100, 1e-3);
    std::vector<TaskSchedInfo> tasks;
    for (msim::TaskId id : {1u, 2u, 3u}) tasks.push_back({id, 0, 0, lat, true});
    auto tl = msim::build_timeline(Policy::round_robin(5e-3), tasks, 6);
    REQUIRE(tl.size() == 6);
    for (std::size_t i = 0; i < 6; ++i) {
        CHECK(tl[i].task == static_cast<msim::TaskId>(i % 3 + 1));
        CHECK(tl[i].timeslice_s == doctest::Approx(5e-3));
    }
    // Resume cursors advance by one slice worth of commands per round.
    CHECK(tl[3].resume_cursor == 5);
    // Default horizon: two full rounds.
    CHECK(msim::build_timeline(Policy::round_robin(5e-3), tasks).size() == 6);
}

TEST_CASE("single task and exhausted tasks") {
    std::vector<double> lat(3, 1e-3);
    std::vector<TaskSchedInfo> one{{7, 0, 0, lat, true}};
    auto tl = msim::build_timeline(Policy::round_robin(1e-3), one, 5);
    CHECK(tl.size() == 3);  // three single-command slices, then dry
    for (const auto& e : tl) CHECK(e.task == 7);
    std::vector<TaskSchedInfo> none{{7, 0, 3, lat, true}};
    CHECK(msim::build_timeline(Policy::round_robin(1e-3), none).empty());
}

TEST_CASE("fairness over K rounds") {
    std::vector<double> lat(1000, 2e-3);
    std::vector<TaskSchedInfo> tasks;
    for (msim::TaskId id = 0; id < 5; ++id) tasks.push_back({id, 0, 0, lat, true});
    auto tl = msim::build_timeline(Policy::round_robin(5e-3), tasks, 5 * 7);
    std::map<msim::TaskId, int> count;
    for (const auto& e : tl) ++count[e.task];
    for (const auto& [id, c] : count) CHECK(c == 7);
}

TEST_CASE("rotation stability") {
    std::vector<double> lat(1000, 1e-3);
    std::vector<TaskSchedInfo> tasks;
    for (msim::TaskId id = 0; id < 3; ++id) tasks.push_back({id, 0, 0, lat, true});
    auto p = Policy::round_robin(4e-3);
    auto first = msim::build_timeline(p, tasks, 9);
    // Task 0 ran its slice and rotated to the back of the queue.
    std::vector<TaskSchedInfo> next{tasks[1], tasks[2], tasks[0]};
    next[2].cursor = 4;
    auto second = msim::build_timeline(p, next, 9);
    CHECK(std::vector<TimelineEntry>(first.begin() + 1, first.end()) ==
          std::vector<TimelineEntry>(second.begin(), second.end() - 1));
}

TEST_CASE("priority head is the highest level regardless of queue order") {
    std::vector<double> be(50, 1e-3), rt(4, 1e-3);
    std::vector<TaskSchedInfo> tasks{{1, 1, 0, be, true}, {2, 1, 0, be, true}, {3, 0, 0, rt, true}};
    auto p = Policy::priority({2e-3, 10e-3});
    auto tl = msim::build_timeline(p, tasks, 6);
    REQUIRE(!tl.empty());
    CHECK(tl[0].task == 3);
    CHECK(tl[1].task == 3);
    // RT runs dry after two 2 ms slices; only then do BE tasks appear.
    CHECK(tl[2].task == 1);
    CHECK(tl[2].timeslice_s == doctest::Approx(10e-3));
}

TEST_CASE("slice_end counts commands started within the slice") {
    std::vector<double> lat{1.0, 1.0, 1.0, 1.0};
    CHECK(msim::slice_end(lat, 0, 2.0) == 2);
    CHECK(msim::slice_end(lat, 0, 2.5) == 3);
    CHECK(msim::slice_end(lat, 3, 10.0) == 4);
    CHECK_THROWS_AS(Policy::round_robin(0).validate(), msim::ConfigError);
}
