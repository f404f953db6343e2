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

#include <map>
#include <string>
#include <vector>

#include "msim/analyzer.hpp"
#include "msim/core.hpp"

namespace msim {

/// Pages a command will touch according to its kernel's descriptor.
/// Memcpy commands use their explicit device range. Rules that cannot be
/// evaluated are skipped and counted in `skipped_rules`.
PageSet predict(const KernelDescriptor& desc, const Command& cmd, std::uint64_t page_size,
                std::uint64_t* skipped_rules = nullptr);

/// Whole-allocation baseline: every allocation that some 64-bit argument
/// points into is predicted in full.
PageSet predict_allocation(const std::vector<Allocation>& allocations, const Command& cmd,
                           std::uint64_t page_size);

/// Template predictor over a descriptor set. Unknown kernels predict
/// nothing.
class TemplatePredictor {
public:
    TemplatePredictor() = default;
    explicit TemplatePredictor(const std::vector<KernelDescriptor>& descs);

    PageSet predict(const Command& cmd, std::uint64_t page_size) const;
    bool knows(const std::string& kernel) const { return by_name_.count(kernel) != 0; }
    std::uint64_t skipped_rules() const { return skipped_; }
    std::uint64_t unknown_kernels() const { return unknown_; }

private:
    std::map<std::string, KernelDescriptor> by_name_;
    mutable std::uint64_t skipped_ = 0;
    mutable std::uint64_t unknown_ = 0;
};

struct Accuracy {
    double f_neg = 0.0;
    double f_pos = 0.0;
};

Accuracy accuracy(const PageSet& predicted, const PageSet& actual);

struct KernelAccuracy {
    std::string kernel;
    std::string predictor;  // "template" or "allocation"
    double f_neg = 0.0;
    double f_pos = 0.0;
    std::size_t invocations = 0;
};

/// Per-kernel rates averaged over invocations, both predictors, plus an
/// "ALL" row per predictor averaging kernels without weights. Sorted by
/// (kernel, predictor) with the ALL rows last.
std::vector<KernelAccuracy> accuracy_table(const Task& task, const std::vector<KernelDescriptor>& descs,
                                           std::uint64_t page_size = 4096);

}  // namespace msim
