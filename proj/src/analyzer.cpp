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

#include "msim/analyzer.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

namespace msim {

using u128 = unsigned __int128;

Rational Rational::make(std::uint64_t num, std::uint64_t den) {
    if (den == 0) throw Error("rational with zero denominator");
    std::uint64_t g = std::gcd(num, den);
    if (g == 0) return {0, 1};
    return {num / g, den / g};
}

std::string Rational::to_string() const { return std::to_string(num) + "/" + std::to_string(den); }

std::vector<StructWindow> slice_struct_args(const std::vector<std::uint8_t>& raw) {
    std::vector<StructWindow> out;
    auto load = [&](std::size_t off, std::size_t bytes) {
        std::uint64_t v = 0;
        for (std::size_t i = 0; i < bytes; ++i) v |= static_cast<std::uint64_t>(raw[off + i]) << (8 * i);
        return v;
    };
    for (std::size_t off = 0; off + 8 <= raw.size(); off += 8)
        out.push_back({static_cast<std::uint32_t>(off), 64, load(off, 8)});
    for (std::size_t off = 0; off + 4 <= raw.size(); off += 4)
        out.push_back({static_cast<std::uint32_t>(off), 32, load(off, 4)});
    return out;
}

std::vector<Slot> launch_slots(const std::vector<LaunchArg>& args, const Dim3& grid, const Dim3& block) {
    std::vector<Slot> out;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& a = args[i];
        auto idx = static_cast<std::uint32_t>(i);
        if (a.width == LaunchArg::Width::W64) out.push_back({Slot::Source::Arg, idx, 0, 64, a.value});
        else if (a.width == LaunchArg::Width::W32) out.push_back({Slot::Source::Arg, idx, 0, 32, a.value});
        else
            for (const auto& w : slice_struct_args(a.bytes))
                out.push_back({Slot::Source::StructWindow, idx, w.offset, w.width, w.value});
    }
    for (std::uint32_t d = 0; d < 3; ++d) out.push_back({Slot::Source::Grid, d, 0, 32, grid[d]});
    for (std::uint32_t d = 0; d < 3; ++d) out.push_back({Slot::Source::Block, d, 0, 32, block[d]});
    return out;
}

std::string slot_layout(const std::vector<Slot>& slots) {
    std::string s;
    for (const auto& sl : slots) {
        if (!s.empty()) s += ',';
        switch (sl.source) {
            case Slot::Source::Arg: s += std::to_string(sl.width); break;
            case Slot::Source::StructWindow:
                s += "a" + std::to_string(sl.arg_index) + "s" + std::to_string(sl.width) + "@" +
                     std::to_string(sl.offset);
                break;
            case Slot::Source::Grid: s += 'g'; break;
            case Slot::Source::Block: s += 'b'; break;
        }
    }
    return s;
}

std::vector<ByteRange> coalesce(std::vector<ByteRange> ranges) {
    std::sort(ranges.begin(), ranges.end(),
              [](const ByteRange& a, const ByteRange& b) { return a.start < b.start; });
    std::vector<ByteRange> out;
    for (const auto& r : ranges) {
        if (r.length == 0) continue;
        if (!out.empty() && r.start <= out.back().end()) {
            Addr end = std::max(out.back().end(), r.end());
            out.back().length = end - out.back().start;
        } else {
            out.push_back(r);
        }
    }
    return out;
}

InvocationRecord make_record(const Command& cmd) {
    return {cmd.kernel_name, cmd.launch_args, cmd.grid, cmd.block, cmd.latency_s,
            coalesce(cmd.ground_truth_access)};
}

std::map<std::string, std::vector<InvocationRecord>> records_by_kernel(const Task& task) {
    std::map<std::string, std::vector<InvocationRecord>> out;
    for (const auto& c : task.commands)
        if (c.kind == CommandKind::Kernel) out[c.kernel_name].push_back(make_record(c));
    return out;
}

std::optional<std::uint64_t> LinearExpr::eval(const std::vector<Slot>& slots) const {
    u128 prod = 1;
    for (auto f : factors) {
        if (f >= slots.size()) return std::nullopt;
        prod *= slots[f].value;
        if (prod > UINT64_MAX) return std::nullopt;
    }
    u128 v = prod * coeff.num;
    // Round up: a fractional size still touches its last partial byte.
    v = (v + coeff.den - 1) / coeff.den;
    if (v > UINT64_MAX) return std::nullopt;
    return static_cast<std::uint64_t>(v);
}

std::string LinearExpr::to_string() const {
    std::string s = coeff.to_string();
    for (auto f : factors) s += "*s" + std::to_string(f);
    return s;
}

const char* to_string(RuleKind k) {
    switch (k) {
        case RuleKind::Fixed: return "FIXED";
        case RuleKind::Linear: return "LINEAR";
        case RuleKind::Strided: return "STRIDED";
        case RuleKind::Unpredictable: return "UNPREDICTABLE";
    }
    return "?";
}

const TemplateRule* KernelDescriptor::rule_for(std::uint32_t ptr_slot) const {
    for (const auto& r : rules)
        if (r.ptr_slot == ptr_slot) return &r;
    return nullptr;
}

namespace {

bool is_pointer_width(const Slot& s) { return s.width == 64; }

bool has_start(const std::vector<ByteRange>& regions, Addr a) {
    auto it = std::lower_bound(regions.begin(), regions.end(), a,
                               [](const ByteRange& r, Addr v) { return r.start < v; });
    return it != regions.end() && it->start == a;
}

bool same_layout(const std::vector<InvocationRecord>& records) {
    if (records.empty()) return true;
    std::string l = slot_layout(records[0].slots());
    for (const auto& r : records)
        if (slot_layout(r.slots()) != l) return false;
    return true;
}

// Regions claimed by one pointer in one record: equal-size chunks at one
// stride, starting at the pointer and stopping before the next pointer.
struct Group {
    bool found = false;
    std::size_t first = 0;
    std::uint64_t chunk = 0;
    std::uint64_t stride = 0;
    std::uint64_t count = 0;
};

Group group_for(const std::vector<ByteRange>& regions, Addr start, Addr bound) {
    Group g;
    auto it = std::lower_bound(regions.begin(), regions.end(), start,
                               [](const ByteRange& r, Addr v) { return r.start < v; });
    if (it == regions.end() || it->start != start) return g;
    g.found = true;
    g.first = static_cast<std::size_t>(it - regions.begin());
    g.chunk = it->length;
    g.count = 1;
    for (std::size_t j = g.first + 1; j < regions.size(); ++j) {
        const auto& r = regions[j];
        if (r.start >= bound || r.length != g.chunk) break;
        std::uint64_t step = r.start - regions[j - 1].start;
        if (g.count == 1) g.stride = step;
        else if (step != g.stride) break;
        ++g.count;
    }
    return g;
}

Addr bound_for(Addr start, const std::vector<Addr>& starts) {
    Addr bound = ~Addr{0};
    for (Addr s : starts)
        if (s > start) bound = std::min(bound, s);
    return bound;
}

std::vector<Addr> pointer_starts(const std::vector<Slot>& slots, const std::vector<PointerArg>& ptrs) {
    std::vector<Addr> out;
    for (const auto& p : ptrs) out.push_back(slots[p.slot].value + p.offset);
    return out;
}

// Exact fit of `values[r]` as coeff * product of candidate slot values.
class ExprFitter {
public:
    ExprFitter(const std::vector<std::vector<Slot>>& slots, const std::vector<std::uint32_t>& excluded,
               std::size_t max_terms)
        : slots_(slots), max_terms_(max_terms) {
        std::set<std::vector<std::uint64_t>> seen;
        if (slots.empty()) return;
        for (std::uint32_t s = 0; s < slots[0].size(); ++s) {
            if (std::find(excluded.begin(), excluded.end(), s) != excluded.end()) continue;
            std::vector<std::uint64_t> sig;
            bool zero = false;
            for (const auto& rec : slots) {
                sig.push_back(rec[s].value);
                zero = zero || rec[s].value == 0;
            }
            if (zero || !seen.insert(sig).second) continue;
            candidates_.push_back(s);
        }
    }

    /// `use[r]` selects which records constrain the fit.
    std::optional<LinearExpr> fit(const std::vector<std::uint64_t>& values,
                                  const std::vector<bool>& use) const {
        std::optional<std::uint64_t> first;
        bool constant = true;
        for (std::size_t r = 0; r < values.size(); ++r) {
            if (!use[r]) continue;
            if (!first) first = values[r];
            else if (values[r] != *first) constant = false;
        }
        if (!first) return std::nullopt;
        if (constant) return LinearExpr{Rational::make(*first, 1), {}};
        std::set<std::vector<std::uint64_t>> seen;
        std::vector<std::uint32_t> pick;
        std::optional<LinearExpr> found;
        for (std::size_t terms = 1; terms <= max_terms_ && !found; ++terms)
            search(values, use, terms, 0, pick, seen, found);
        return found;
    }

private:
    void search(const std::vector<std::uint64_t>& values, const std::vector<bool>& use, std::size_t terms,
                std::size_t from, std::vector<std::uint32_t>& pick, std::set<std::vector<std::uint64_t>>& seen,
                std::optional<LinearExpr>& found) const {
        if (found) return;
        if (pick.size() == terms) {
            try_product(values, use, pick, seen, found);
            return;
        }
        for (std::size_t c = from; c < candidates_.size() && !found; ++c) {
            pick.push_back(candidates_[c]);
            search(values, use, terms, c, pick, seen, found);
            pick.pop_back();
        }
    }

    void try_product(const std::vector<std::uint64_t>& values, const std::vector<bool>& use,
                     const std::vector<std::uint32_t>& pick, std::set<std::vector<std::uint64_t>>& seen,
                     std::optional<LinearExpr>& found) const {
        std::vector<std::uint64_t> sig;
        for (const auto& rec : slots_) {
            u128 p = 1;
            for (auto s : pick) {
                p *= rec[s].value;
                if (p > UINT64_MAX) return;
            }
            sig.push_back(static_cast<std::uint64_t>(p));
        }
        // A product with the same values as an earlier one adds nothing.
        if (!seen.insert(sig).second) return;
        std::optional<Rational> coeff;
        for (std::size_t r = 0; r < values.size(); ++r) {
            if (!use[r]) continue;
            Rational c = Rational::make(values[r], sig[r]);
            if (c.num == 0) return;
            if (!coeff) coeff = c;
            else if (!(c == *coeff)) return;
        }
        if (coeff) found = LinearExpr{*coeff, pick};
    }

    const std::vector<std::vector<Slot>>& slots_;
    std::size_t max_terms_;
    std::vector<std::uint32_t> candidates_;
};

}  // namespace

std::vector<PointerArg> identify_pointer_args(const std::vector<InvocationRecord>& records,
                                              const AnalyzerOptions& opts) {
    std::vector<PointerArg> out;
    if (records.empty() || !same_layout(records)) return out;
    std::vector<std::vector<Slot>> slots;
    for (const auto& r : records) slots.push_back(r.slots());
    for (std::uint32_t s = 0; s < slots[0].size(); ++s) {
        if (!is_pointer_width(slots[0][s])) continue;
        auto all_match = [&](std::uint64_t off) {
            for (std::size_t r = 0; r < records.size(); ++r) {
                std::uint64_t v = slots[r][s].value;
                if (v + off < v || !has_start(records[r].observed_regions, v + off)) return false;
            }
            return true;
        };
        if (all_match(0)) {
            out.push_back({s, 0});
            continue;
        }
        if (!opts.offset_pointers) continue;
        // Smallest positive offset that works for every record.
        std::uint64_t v0 = slots[0][s].value;
        std::optional<std::uint64_t> best;
        for (const auto& reg : records[0].observed_regions) {
            if (reg.start <= v0 || reg.start - v0 > opts.max_pointer_offset) continue;
            std::uint64_t off = reg.start - v0;
            if (all_match(off)) {
                best = off;
                break;
            }
        }
        if (best) out.push_back({s, *best});
    }
    return out;
}

std::vector<std::uint32_t> identify_pointer_slots(const std::vector<InvocationRecord>& records) {
    AnalyzerOptions o;
    o.offset_pointers = false;
    std::vector<std::uint32_t> out;
    for (const auto& p : identify_pointer_args(records, o)) out.push_back(p.slot);
    return out;
}

TemplateRule infer_rule(const std::vector<InvocationRecord>& records, const PointerArg& ptr,
                        const std::vector<PointerArg>& all_ptrs, const AnalyzerOptions& opts) {
    TemplateRule rule;
    rule.ptr_slot = ptr.slot;
    rule.ptr_offset = ptr.offset;
    rule.kind = RuleKind::Unpredictable;
    if (records.empty() || !same_layout(records)) return rule;
    std::vector<std::vector<Slot>> slots;
    for (const auto& r : records) slots.push_back(r.slots());
    if (ptr.slot >= slots[0].size()) return rule;

    std::size_t n = records.size();
    std::vector<std::uint64_t> chunk(n), stride(n), count(n);
    std::vector<bool> all(n, true), multi(n, false);
    bool any_multi = false;
    for (std::size_t r = 0; r < n; ++r) {
        auto starts = pointer_starts(slots[r], all_ptrs);
        Addr start = slots[r][ptr.slot].value + ptr.offset;
        Group g = group_for(records[r].observed_regions, start, bound_for(start, starts));
        if (!g.found) return rule;
        chunk[r] = g.chunk;
        stride[r] = g.stride;
        count[r] = g.count;
        multi[r] = g.count > 1;
        any_multi = any_multi || multi[r];
    }
    std::vector<std::uint32_t> excluded;
    for (const auto& p : all_ptrs) excluded.push_back(p.slot);
    // A single record cannot reveal any dependence on arguments.
    std::size_t terms = n >= std::max<std::size_t>(opts.min_records, 2) ? opts.max_product_terms : 0;
    ExprFitter fitter(slots, excluded, terms);

    // Single region per record: size identical (T1) or an argument product (T2).
    auto fit_single = [&]() {
        bool fixed = std::all_of(chunk.begin(), chunk.end(), [&](std::uint64_t c) { return c == chunk[0]; });
        if (fixed) {
            rule.kind = RuleKind::Fixed;
            rule.fixed_size = chunk[0];
            return;
        }
        if (auto lin = fitter.fit(chunk, all)) {
            rule.kind = RuleKind::Linear;
            rule.linear = *lin;
        }
    };
    if (!any_multi) {
        fit_single();
        return rule;
    }
    auto c = fitter.fit(chunk, all);
    auto k = fitter.fit(count, all);
    auto s = fitter.fit(stride, multi);
    if (c && k && s) {
        rule.kind = RuleKind::Strided;
        rule.chunk = *c;
        rule.count = *k;
        rule.stride = *s;
        return rule;
    }
    // No strided law: an unrelated region of the same size can sit right
    // after the buffer. Keep only the first region of each record.
    fit_single();
    return rule;
}

namespace {

// Per record: which regions the descriptor's predictable rules claim.
std::vector<bool> claimed_regions(const KernelDescriptor& d, const InvocationRecord& rec,
                                  std::vector<std::pair<RuleKind, bool>>* per_rule) {
    std::vector<bool> claimed(rec.observed_regions.size(), false);
    auto slots = rec.slots();
    std::vector<PointerArg> ptrs;
    for (const auto& r : d.rules) ptrs.push_back({r.ptr_slot, r.ptr_offset});
    for (const auto& r : d.rules) {
        if (r.ptr_slot >= slots.size()) {
            if (per_rule) per_rule->push_back({r.kind, false});
            continue;
        }
        bool ok = r.kind != RuleKind::Unpredictable;
        if (ok) {
            auto starts = pointer_starts(slots, ptrs);
            Addr start = slots[r.ptr_slot].value + r.ptr_offset;
            Group g = group_for(rec.observed_regions, start, bound_for(start, starts));
            std::uint64_t take = g.found ? (r.kind == RuleKind::Strided ? g.count : 1) : 0;
            for (std::uint64_t i = 0; i < take; ++i) claimed[g.first + i] = true;
            ok = g.found;
        }
        if (per_rule) per_rule->push_back({r.kind, ok});
    }
    return claimed;
}

}  // namespace

KernelDescriptor build_descriptor(const std::string& kernel_name, const std::vector<InvocationRecord>& records,
                                  const AnalyzerOptions& opts) {
    if (records.empty()) throw Error("build_descriptor: no records for kernel '" + kernel_name + "'");
    KernelDescriptor d;
    d.kernel_name = kernel_name;
    d.records = records.size();
    double lat = 0.0;
    for (const auto& r : records) lat += r.latency_s;
    d.profiled_latency_s = lat / static_cast<double>(records.size());
    d.layout = slot_layout(records[0].slots());
    if (!same_layout(records)) {
        d.layout = "mixed";
        d.unpredictable_fraction = 1.0;
        return d;
    }
    auto ptrs = identify_pointer_args(records, opts);
    for (const auto& p : ptrs) d.rules.push_back(infer_rule(records, p, ptrs, opts));
    std::uint64_t total = 0, unclaimed = 0;
    for (const auto& rec : records) {
        auto claimed = claimed_regions(d, rec, nullptr);
        for (std::size_t i = 0; i < claimed.size(); ++i) {
            total += rec.observed_regions[i].length;
            if (!claimed[i]) unclaimed += rec.observed_regions[i].length;
        }
    }
    d.unpredictable_fraction = total ? static_cast<double>(unclaimed) / static_cast<double>(total) : 0.0;
    return d;
}

std::vector<KernelDescriptor> analyze_task(const Task& task, const AnalyzerOptions& opts) {
    std::vector<KernelDescriptor> out;
    for (const auto& [name, recs] : records_by_kernel(task)) out.push_back(build_descriptor(name, recs, opts));
    return out;
}

double AccessDistribution::share(RuleKind k) const {
    std::uint64_t t = total();
    if (t == 0) return 0.0;
    std::uint64_t v = k == RuleKind::Fixed ? fixed : k == RuleKind::Linear ? linear
                      : k == RuleKind::Strided ? strided : others;
    return static_cast<double>(v) / static_cast<double>(t);
}

AccessDistribution access_distribution(const std::vector<KernelDescriptor>& descs,
                                       const std::map<std::string, std::vector<InvocationRecord>>& records) {
    AccessDistribution dist;
    for (const auto& [name, recs] : records) {
        const KernelDescriptor* d = nullptr;
        for (const auto& x : descs)
            if (x.kernel_name == name) d = &x;
        for (const auto& rec : recs) {
            if (d == nullptr) {
                dist.others += rec.observed_regions.size();
                continue;
            }
            std::vector<std::pair<RuleKind, bool>> per_rule;
            auto claimed = claimed_regions(*d, rec, &per_rule);
            for (const auto& [kind, ok] : per_rule) {
                if (!ok) continue;
                if (kind == RuleKind::Fixed) ++dist.fixed;
                else if (kind == RuleKind::Linear) ++dist.linear;
                else if (kind == RuleKind::Strided) ++dist.strided;
            }
            for (bool c : claimed)
                if (!c) ++dist.others;
        }
    }
    return dist;
}

std::vector<ByteRange> evaluate_rule(const TemplateRule& rule, const std::vector<Slot>& slots, bool* failed) {
    auto fail = [&]() {
        if (failed) *failed = true;
        return std::vector<ByteRange>{};
    };
    if (rule.kind == RuleKind::Unpredictable) return {};
    if (rule.ptr_slot >= slots.size() || slots[rule.ptr_slot].width != 64) return fail();
    Addr start = slots[rule.ptr_slot].value + rule.ptr_offset;
    // The pointed-to byte is always touched, so a rule never predicts nothing.
    auto at_least_one = [](std::uint64_t v) { return std::max<std::uint64_t>(v, 1); };
    switch (rule.kind) {
        case RuleKind::Fixed: return {{start, at_least_one(rule.fixed_size)}};
        case RuleKind::Linear: {
            auto size = rule.linear.eval(slots);
            if (!size) return fail();
            return {{start, at_least_one(*size)}};
        }
        case RuleKind::Strided: {
            auto c = rule.chunk.eval(slots), s = rule.stride.eval(slots), k = rule.count.eval(slots);
            if (!c || !s || !k) return fail();
            std::vector<ByteRange> out;
            std::uint64_t n = at_least_one(*k);
            for (std::uint64_t i = 0; i < n; ++i) out.push_back({start + i * *s, at_least_one(*c)});
            return out;
        }
        default: return {};
    }
}

namespace {

constexpr const char* kDescHeader = "MSIM-DESC v1";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::uint64_t to_u64(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
        auto v = std::stoull(s, &pos, 0);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad integer '" + s + "'", line);
    }
}

double to_double(const std::string& s, int line) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError("bad number '" + s + "'", line);
    }
}

LinearExpr parse_expr(const std::string& s, int line) {
    std::vector<std::string> parts;
    std::stringstream ss(s);
    std::string p;
    while (std::getline(ss, p, '*')) parts.push_back(p);
    if (parts.empty()) throw ParseError("empty expression", line);
    auto slash = parts[0].find('/');
    if (slash == std::string::npos) throw ParseError("coefficient must be p/q, got '" + parts[0] + "'", line);
    std::uint64_t den = to_u64(parts[0].substr(slash + 1), line);
    if (den == 0) throw ParseError("zero denominator", line);
    LinearExpr e{Rational::make(to_u64(parts[0].substr(0, slash), line), den), {}};
    for (std::size_t i = 1; i < parts.size(); ++i) {
        if (parts[i].size() < 2 || parts[i][0] != 's') throw ParseError("bad factor '" + parts[i] + "'", line);
        e.factors.push_back(static_cast<std::uint32_t>(to_u64(parts[i].substr(1), line)));
    }
    return e;
}

}  // namespace

void write_descriptors(const std::vector<KernelDescriptor>& descs, std::ostream& out) {
    out << kDescHeader << '\n';
    for (const auto& d : descs) {
        out << "KERNEL " << d.kernel_name << " latency=" << fmt_double(d.profiled_latency_s)
            << " unpredictable=" << fmt_double(d.unpredictable_fraction) << " records=" << d.records
            << " layout=" << d.layout << '\n';
        for (const auto& r : d.rules) {
            out << "RULE slot=" << r.ptr_slot << " off=" << r.ptr_offset << ' ' << to_string(r.kind);
            if (r.kind == RuleKind::Fixed) out << " size=" << r.fixed_size;
            if (r.kind == RuleKind::Linear) out << " size=" << r.linear.to_string();
            if (r.kind == RuleKind::Strided)
                out << " chunk=" << r.chunk.to_string() << " stride=" << r.stride.to_string()
                    << " count=" << r.count.to_string();
            out << '\n';
        }
        out << "END\n";
    }
}

std::vector<KernelDescriptor> parse_descriptors(std::istream& in) {
    std::vector<KernelDescriptor> out;
    std::string line;
    int lineno = 0;
    bool header = false;
    KernelDescriptor* cur = nullptr;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        std::istringstream ls(line);
        std::vector<std::string> toks;
        for (std::string t; ls >> t;) toks.push_back(t);
        if (toks.empty()) continue;
        if (!header) {
            if (toks.size() != 2 || toks[0] != "MSIM-DESC" || toks[1] != "v1")
                throw ParseError("missing 'MSIM-DESC v1' header", lineno);
            header = true;
            continue;
        }
        auto kv = [&](const std::string& t) {
            auto eq = t.find('=');
            if (eq == std::string::npos) throw ParseError("expected key=value, got '" + t + "'", lineno);
            return std::make_pair(t.substr(0, eq), t.substr(eq + 1));
        };
        if (toks[0] == "KERNEL") {
            if (cur) throw ParseError("KERNEL before END", lineno);
            if (toks.size() < 2) throw ParseError("KERNEL needs a name", lineno);
            out.emplace_back();
            cur = &out.back();
            cur->kernel_name = toks[1];
            for (std::size_t i = 2; i < toks.size(); ++i) {
                auto [k, v] = kv(toks[i]);
                if (k == "latency") cur->profiled_latency_s = to_double(v, lineno);
                else if (k == "unpredictable") cur->unpredictable_fraction = to_double(v, lineno);
                else if (k == "records") cur->records = to_u64(v, lineno);
                else if (k == "layout") cur->layout = v;
                else throw ParseError("unknown KERNEL field '" + k + "'", lineno);
            }
        } else if (toks[0] == "RULE") {
            if (!cur) throw ParseError("RULE outside KERNEL", lineno);
            if (toks.size() < 4) throw ParseError("RULE needs slot, off and a kind", lineno);
            TemplateRule r;
            auto [k1, v1] = kv(toks[1]);
            auto [k2, v2] = kv(toks[2]);
            if (k1 != "slot" || k2 != "off") throw ParseError("RULE must start with slot= off=", lineno);
            r.ptr_slot = static_cast<std::uint32_t>(to_u64(v1, lineno));
            r.ptr_offset = to_u64(v2, lineno);
            const std::string& kind = toks[3];
            std::map<std::string, std::string> f;
            for (std::size_t i = 4; i < toks.size(); ++i) f.insert(kv(toks[i]));
            auto need = [&](const char* key) {
                auto it = f.find(key);
                if (it == f.end()) throw ParseError(kind + " rule needs " + key + "=", lineno);
                return it->second;
            };
            if (kind == "FIXED") {
                r.kind = RuleKind::Fixed;
                r.fixed_size = to_u64(need("size"), lineno);
            } else if (kind == "LINEAR") {
                r.kind = RuleKind::Linear;
                r.linear = parse_expr(need("size"), lineno);
            } else if (kind == "STRIDED") {
                r.kind = RuleKind::Strided;
                r.chunk = parse_expr(need("chunk"), lineno);
                r.stride = parse_expr(need("stride"), lineno);
                r.count = parse_expr(need("count"), lineno);
            } else if (kind == "UNPREDICTABLE") {
                r.kind = RuleKind::Unpredictable;
            } else {
                throw ParseError("unknown rule kind '" + kind + "'", lineno);
            }
            if (cur->rule_for(r.ptr_slot)) throw ParseError("duplicate rule for slot", lineno);
            cur->rules.push_back(r);
        } else if (toks[0] == "END") {
            if (!cur) throw ParseError("END without KERNEL", lineno);
            cur = nullptr;
        } else {
            throw ParseError("unknown record '" + toks[0] + "'", lineno);
        }
    }
    if (!header) throw ParseError("missing 'MSIM-DESC v1' header", std::max(lineno, 1));
    if (cur) throw ParseError("missing END", lineno);
    return out;
}

void save_descriptors(const std::vector<KernelDescriptor>& descs, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write descriptor file '" + path + "'");
    write_descriptors(descs, f);
}

std::vector<KernelDescriptor> load_descriptors(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open descriptor file '" + path + "'");
    return parse_descriptors(f);
}

}  // namespace msim
