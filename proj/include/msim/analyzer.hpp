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
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "msim/core.hpp"

namespace msim {

/// Non-negative exact fraction, kept reduced.
struct Rational {
    std::uint64_t num = 0;
    std::uint64_t den = 1;

    static Rational make(std::uint64_t num, std::uint64_t den);
    bool operator==(const Rational&) const = default;
    std::string to_string() const;
};

/// One integer candidate drawn from a launch: a 64/32-bit argument, an
/// aligned window of a struct argument, or a grid/block dimension.
struct Slot {
    enum class Source : std::uint8_t { Arg, StructWindow, Grid, Block };
    Source source = Source::Arg;
    std::uint32_t arg_index = 0;  // argument position, or dimension 0..2
    std::uint32_t offset = 0;     // byte offset inside a struct argument
    std::uint32_t width = 64;     // bits
    std::uint64_t value = 0;

    bool operator==(const Slot&) const = default;
};

struct StructWindow {
    std::uint32_t offset;
    std::uint32_t width;
    std::uint64_t value;

    bool operator==(const StructWindow&) const = default;
};

/// Every aligned 64-bit window, then every aligned 32-bit window of a
/// little-endian struct payload.
std::vector<StructWindow> slice_struct_args(const std::vector<std::uint8_t>& raw);

/// Candidate slots of a launch: arguments in order (structs expanded),
/// followed by grid x,y,z and block x,y,z.
std::vector<Slot> launch_slots(const std::vector<LaunchArg>& args, const Dim3& grid, const Dim3& block);

/// Layout signature of a slot list, e.g. "64,64,s32@4,g,g,g,b,b,b".
std::string slot_layout(const std::vector<Slot>& slots);

struct InvocationRecord {
    std::string kernel_name;
    std::vector<LaunchArg> launch_args;
    Dim3 grid{1, 1, 1};
    Dim3 block{1, 1, 1};
    double latency_s = 0.0;
    /// Coalesced and sorted.
    std::vector<ByteRange> observed_regions;

    std::vector<Slot> slots() const { return launch_slots(launch_args, grid, block); }
};

/// Sorted union of overlapping or touching ranges.
std::vector<ByteRange> coalesce(std::vector<ByteRange> ranges);

InvocationRecord make_record(const Command& cmd);

/// Kernel records of a task, grouped by kernel name.
std::map<std::string, std::vector<InvocationRecord>> records_by_kernel(const Task& task);

/// coeff * product(slot values); no factors means a constant.
struct LinearExpr {
    Rational coeff;
    std::vector<std::uint32_t> factors;

    /// nullopt if a factor is missing or the product overflows.
    std::optional<std::uint64_t> eval(const std::vector<Slot>& slots) const;
    bool operator==(const LinearExpr&) const = default;
    std::string to_string() const;
};

enum class RuleKind { Fixed, Linear, Strided, Unpredictable };
const char* to_string(RuleKind k);

struct TemplateRule {
    std::uint32_t ptr_slot = 0;
    /// Region start = pointer value + ptr_offset.
    std::uint64_t ptr_offset = 0;
    RuleKind kind = RuleKind::Unpredictable;
    std::uint64_t fixed_size = 0;   // Fixed
    LinearExpr linear;              // Linear: size
    LinearExpr chunk, stride, count;  // Strided

    bool operator==(const TemplateRule&) const = default;
};

struct KernelDescriptor {
    std::string kernel_name;
    std::string layout;
    std::vector<TemplateRule> rules;
    double profiled_latency_s = 0.0;
    double unpredictable_fraction = 0.0;
    std::size_t records = 0;

    const TemplateRule* rule_for(std::uint32_t ptr_slot) const;
};

struct AnalyzerOptions {
    std::size_t max_product_terms = 3;
    std::size_t min_records = 2;
    bool offset_pointers = true;
    std::uint64_t max_pointer_offset = 64 * 1024;
};

struct PointerArg {
    std::uint32_t slot;
    std::uint64_t offset;
    bool operator==(const PointerArg&) const = default;
};

/// 64-bit slots whose value (plus one constant offset when enabled) is the
/// start of an observed region in every record.
std::vector<PointerArg> identify_pointer_args(const std::vector<InvocationRecord>& records,
                                              const AnalyzerOptions& opts = {});

/// Slot indices only, exact matches.
std::vector<std::uint32_t> identify_pointer_slots(const std::vector<InvocationRecord>& records);

TemplateRule infer_rule(const std::vector<InvocationRecord>& records, const PointerArg& ptr,
                        const std::vector<PointerArg>& all_ptrs, const AnalyzerOptions& opts = {});

KernelDescriptor build_descriptor(const std::string& kernel_name,
                                  const std::vector<InvocationRecord>& records,
                                  const AnalyzerOptions& opts = {});

/// Descriptors for every kernel of a task, sorted by kernel name.
std::vector<KernelDescriptor> analyze_task(const Task& task, const AnalyzerOptions& opts = {});

/// Share of observed region instances per access type.
struct AccessDistribution {
    std::uint64_t fixed = 0, linear = 0, strided = 0, others = 0;
    std::uint64_t total() const { return fixed + linear + strided + others; }
    double share(RuleKind k) const;
};

AccessDistribution access_distribution(const std::vector<KernelDescriptor>& descs,
                                       const std::map<std::string, std::vector<InvocationRecord>>& records);

/// Byte ranges a rule predicts for one launch; empty if the rule cannot be
/// evaluated.
std::vector<ByteRange> evaluate_rule(const TemplateRule& rule, const std::vector<Slot>& slots,
                                     bool* failed = nullptr);

/// `MSIM-DESC v1` files.
void write_descriptors(const std::vector<KernelDescriptor>& descs, std::ostream& out);
std::vector<KernelDescriptor> parse_descriptors(std::istream& in);
void save_descriptors(const std::vector<KernelDescriptor>& descs, const std::string& path);
std::vector<KernelDescriptor> load_descriptors(const std::string& path);

}  // namespace msim
