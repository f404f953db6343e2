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

#include "msim/predictor.hpp"

namespace msim {

PageSet predict(const KernelDescriptor& desc, const Command& cmd, std::uint64_t page_size,
                std::uint64_t* skipped_rules) {
    if (cmd.kind != CommandKind::Kernel) return pages_of(cmd.memcpy_device_range(), page_size);
    auto slots = launch_slots(cmd.launch_args, cmd.grid, cmd.block);
    std::vector<ByteRange> ranges;
    for (const auto& rule : desc.rules) {
        bool failed = false;
        auto r = evaluate_rule(rule, slots, &failed);
        if (failed && skipped_rules) ++*skipped_rules;
        ranges.insert(ranges.end(), r.begin(), r.end());
    }
    return pages_of(ranges, page_size);
}

PageSet predict_allocation(const std::vector<Allocation>& allocations, const Command& cmd,
                           std::uint64_t page_size) {
    if (cmd.kind != CommandKind::Kernel) return pages_of(cmd.memcpy_device_range(), page_size);
    std::vector<ByteRange> ranges;
    for (const auto& s : launch_slots(cmd.launch_args, cmd.grid, cmd.block)) {
        if (s.width != 64) continue;
        for (const auto& a : allocations)
            if (a.contains(s.value)) ranges.push_back({a.base, a.size});
    }
    return pages_of(ranges, page_size);
}

TemplatePredictor::TemplatePredictor(const std::vector<KernelDescriptor>& descs) {
    for (const auto& d : descs) by_name_[d.kernel_name] = d;
}

PageSet TemplatePredictor::predict(const Command& cmd, std::uint64_t page_size) const {
    if (cmd.kind != CommandKind::Kernel) return pages_of(cmd.memcpy_device_range(), page_size);
    auto it = by_name_.find(cmd.kernel_name);
    if (it == by_name_.end()) {
        ++unknown_;
        return {};
    }
    return msim::predict(it->second, cmd, page_size, &skipped_);
}

Accuracy accuracy(const PageSet& predicted, const PageSet& actual) {
    Accuracy a;
    if (actual.empty()) return a;
    a.f_neg = static_cast<double>(actual.difference(predicted).size()) / static_cast<double>(actual.size());
    if (!predicted.empty())
        a.f_pos = static_cast<double>(predicted.difference(actual).size()) / static_cast<double>(predicted.size());
    return a;
}

std::vector<KernelAccuracy> accuracy_table(const Task& task, const std::vector<KernelDescriptor>& descs,
                                           std::uint64_t page_size) {
    TemplatePredictor tp(descs);
    struct Sum {
        double fn = 0, fp = 0;
        std::size_t n = 0;
    };
    std::map<std::string, Sum> tmpl, alloc;
    for (const auto& c : task.commands) {
        if (c.kind != CommandKind::Kernel) continue;
        PageSet actual = pages_of(c.ground_truth_access, page_size);
        Accuracy t = accuracy(tp.predict(c, page_size), actual);
        Accuracy a = accuracy(predict_allocation(task.allocations, c, page_size), actual);
        auto& st = tmpl[c.kernel_name];
        st.fn += t.f_neg, st.fp += t.f_pos, ++st.n;
        auto& sa = alloc[c.kernel_name];
        sa.fn += a.f_neg, sa.fp += a.f_pos, ++sa.n;
    }
    std::vector<KernelAccuracy> out;
    Sum all_a, all_t;
    for (const auto& [name, st] : tmpl) {
        const Sum& sa = alloc[name];
        double n = static_cast<double>(st.n);
        out.push_back({name, "allocation", sa.fn / n, sa.fp / n, sa.n});
        out.push_back({name, "template", st.fn / n, st.fp / n, st.n});
        all_a.fn += sa.fn / n, all_a.fp += sa.fp / n, ++all_a.n;
        all_t.fn += st.fn / n, all_t.fp += st.fp / n, ++all_t.n;
    }
    if (all_t.n) {
        double k = static_cast<double>(all_t.n);
        out.push_back({"ALL", "allocation", all_a.fn / k, all_a.fp / k, all_a.n});
        out.push_back({"ALL", "template", all_t.fn / k, all_t.fp / k, all_t.n});
    }
    return out;
}

}  // namespace msim
