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

#include <iosfwd>
#include <string>

#include "msim/core.hpp"

namespace msim {

/// Line-oriented trace format, version header `MSIM-TRACE v1`:
///
///   TASK id=<n> priority=<n>                       (optional, first record)
///   ALLOC <id> <base> <size>
///   KERNEL <name> <latency_s> args=[w:v,...] access=[(start,len),...]
///          [indirect=[(start,len),...]] [grid=x,y,z] [block=x,y,z] [job_end=1]
///   MEMCPY <H2D|D2H> <src> <dst> <size> <latency_s> [job_end=1]
///
/// Arg widths are 64, 32 or b (raw struct bytes in hex). Integers accept
/// any C base prefix on input and are written in decimal. `#` starts a
/// comment. Whitespace inside brackets is ignored.
Task parse_trace(std::istream& in, std::uint64_t page_size = 4096);
Task load_trace(const std::string& path, std::uint64_t page_size = 4096);

void write_trace(const Task& task, std::ostream& out);
void save_trace(const Task& task, const std::string& path);
std::string trace_to_string(const Task& task);

}  // namespace msim
