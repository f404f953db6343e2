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

#include "msim/config.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

#include <toml.hpp>

#include "msim/presets.hpp"

namespace msim {

const char* to_string(WorkloadSpec::Kind k) {
    switch (k) {
        case WorkloadSpec::Kind::Microbench: return "microbench";
        case WorkloadSpec::Kind::LlmMix: return "llm_mix";
        case WorkloadSpec::Kind::VectorAdd: return "vector_add";
        case WorkloadSpec::Kind::Trace: return "trace";
    }
    return "?";
}

Mode parse_mode(const std::string& name) {
    if (name == "ideal") return Mode::ideal();
    if (name == "um") return Mode::um();
    if (name.rfind("um:", 0) == 0) {
        std::size_t used = 0;
        int pf = 0;
        try {
            pf = std::stoi(name.substr(3), &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used == 0 || used != name.size() - 3 || pf < 1)
            throw ConfigError("mode '" + name + "': prefetch must be a positive integer");
        return Mode::um(pf);
    }
    std::istringstream parts(name);
    std::string tok;
    if (!std::getline(parts, tok, '-') || tok != "proactive")
        throw ConfigError("unknown mode '" + name + "'");
    Mode m = Mode::proactive();
    std::set<std::string> seen;
    while (std::getline(parts, tok, '-')) {
        if (!seen.insert(tok).second) throw ConfigError("mode '" + name + "': repeated '" + tok + "'");
        if (tok == "alloc" && !seen.count("exact")) m.predictor = Mode::Predictor::Allocation;
        else if (tok == "exact" && !seen.count("alloc")) m.predictor = Mode::Predictor::GroundTruth;
        else if (tok == "serial") m.pipelined = false;
        else if (tok == "nostart") m.early_start = false;
        else throw ConfigError("mode '" + name + "': bad qualifier '" + tok + "'");
    }
    return m;
}

namespace {

// Typed, strict access to one table. Every key must be consumed by the
// time finish() runs.
class Section {
public:
    Section(const toml::table& t, std::string name, std::string origin)
        : t_(t), name_(std::move(name)), origin_(std::move(origin)) {}

    [[noreturn]] void fail(const std::string& key, const std::string& msg) const {
        std::ostringstream os;
        os << origin_ << ": [" << name_ << "]";
        if (!key.empty()) os << " " << key;
        os << ": " << msg;
        if (const toml::node* n = key.empty() ? nullptr : t_.get(key)) {
            if (n->source().begin.line) os << " (line " << n->source().begin.line << ")";
        }
        throw ConfigError(os.str());
    }

    const toml::node* get(const std::string& key) {
        used_.insert(key);
        return t_.get(key);
    }

    std::optional<double> number(const std::string& key) {
        const toml::node* n = get(key);
        if (!n) return std::nullopt;
        if (auto v = n->as_floating_point()) return v->get();
        if (auto v = n->as_integer()) return static_cast<double>(v->get());
        fail(key, "expected a number");
    }

    std::optional<std::uint64_t> count(const std::string& key, std::uint64_t min = 0) {
        auto v = number(key);
        if (!v) return std::nullopt;
        if (!(*v >= static_cast<double>(min)) || std::floor(*v) != *v || *v > 9.0e18)
            fail(key, "expected an integer >= " + std::to_string(min));
        return static_cast<std::uint64_t>(*v);
    }

    std::optional<std::string> string(const std::string& key) {
        const toml::node* n = get(key);
        if (!n) return std::nullopt;
        if (auto v = n->as_string()) return v->get();
        fail(key, "expected a string");
    }

    template <class T, class F>
    std::optional<std::vector<T>> array(const std::string& key, F&& item) {
        const toml::node* n = get(key);
        if (!n) return std::nullopt;
        const toml::array* a = n->as_array();
        if (!a) fail(key, "expected an array");
        std::vector<T> out;
        for (const toml::node& e : *a) {
            std::optional<T> v = item(e);
            if (!v) fail(key, "array element has the wrong type");
            out.push_back(*v);
        }
        return out;
    }

    std::optional<std::vector<double>> numbers(const std::string& key) {
        return array<double>(key, [](const toml::node& e) -> std::optional<double> {
            if (auto f = e.as_floating_point()) return f->get();
            if (auto i = e.as_integer()) return static_cast<double>(i->get());
            return std::nullopt;
        });
    }

    std::optional<std::vector<std::string>> strings(const std::string& key) {
        return array<std::string>(key, [](const toml::node& e) { return e.value<std::string>(); });
    }

    template <class T>
    void set(const std::string& key, T& field) {
        if constexpr (std::is_same_v<T, double>) {
            if (auto v = number(key)) field = *v;
        } else if constexpr (std::is_same_v<T, std::string>) {
            if (auto v = string(key)) field = *v;
        } else {
            if (auto v = count(key)) {
                if (*v > static_cast<std::uint64_t>(std::numeric_limits<T>::max())) fail(key, "out of range");
                field = static_cast<T>(*v);
            }
        }
    }

    void finish() const {
        for (const auto& [k, v] : t_) {
            std::string key(k.str());
            if (!used_.count(key)) fail(key, "unknown key");
        }
    }

    const std::string& name() const { return name_; }

private:
    const toml::table& t_;
    std::string name_;
    std::string origin_;
    std::set<std::string> used_;
};

const toml::table& require_table(const toml::table& root, const std::string& key,
                                 const std::string& origin) {
    const toml::node* n = root.get(key);
    if (!n) throw ConfigError(origin + ": missing required section [" + key + "]");
    if (!n->is_table()) throw ConfigError(origin + ": [" + key + "] must be a table");
    return *n->as_table();
}

void read_hw(Section s, HwConfig& hw) {
    if (auto p = s.string("preset")) {
        try {
            hw = preset_by_name(*p);
        } catch (const ConfigError& e) {
            s.fail("preset", e.what());
        }
    }
    s.set("hbm_capacity_bytes", hw.hbm_capacity_bytes);
    s.set("dram_capacity_bytes", hw.dram_capacity_bytes);
    s.set("page_size_bytes", hw.page_size_bytes);
    s.set("bw_d2h_bytes_per_s", hw.bw_d2h_bytes_per_s);
    s.set("bw_h2d_bytes_per_s", hw.bw_h2d_bytes_per_s);
    s.set("fault_control_plane_s", hw.fault_control_plane_s);
    s.set("fault_transfer_s", hw.fault_transfer_s);
    s.set("per_page_unmap_s", hw.per_page_unmap_s);
    s.set("per_page_map_s", hw.per_page_map_s);
    s.set("per_page_madvise_s", hw.per_page_madvise_s);
    s.set("madvise_call_s", hw.madvise_call_s);
    s.set("copy_engines", hw.copy_engines);
    s.finish();
    try {
        hw.validate();
    } catch (const ConfigError& e) {
        s.fail("", e.what());
    }
}

void read_ratio(Section& s, WorkloadSpec& w) {
    if (auto r = s.number("ratio")) {
        if (!(*r > 0)) s.fail("ratio", "must be positive");
        w.ratio = *r;
    }
}

void require_positive(Section& s, const char* key, double v) {
    if (!(v > 0)) s.fail(key, "must be positive");
}

void require_fraction(Section& s, const char* key, double v) {
    if (!(v >= 0 && v <= 1)) s.fail(key, "must lie in [0, 1]");
}

void read_workload(const toml::table& root, const std::string& origin, WorkloadSpec& w) {
    const toml::table& wt = require_table(root, "workload", origin);
    std::vector<std::string> kinds;
    for (const auto& [k, v] : wt) kinds.emplace_back(k.str());
    if (kinds.size() != 1)
        throw ConfigError(origin + ": [workload] needs exactly one [workload.<kind>] table, found " +
                          std::to_string(kinds.size()));
    const std::string kind = kinds.front();
    const toml::table* body = wt.get(kind)->as_table();
    if (!body) throw ConfigError(origin + ": [workload." + kind + "] must be a table");
    Section s(*body, "workload." + kind, origin);
    read_ratio(s, w);
    if (kind == "microbench") {
        w.kind = WorkloadSpec::Kind::Microbench;
        auto& p = w.microbench;
        s.set("processes", p.processes);
        s.set("vecadd_bytes_per_s", p.vecadd_bytes_per_s);
        s.set("matmul_dim", p.matmul_dim);
        s.set("kernels_per_iteration", p.kernels_per_iteration);
        s.set("iterations", p.iterations);
        s.set("indirect_rate", p.indirect_rate);
        if (p.processes < 2) s.fail("processes", "needs at least 2 processes");
        require_positive(s, "vecadd_bytes_per_s", p.vecadd_bytes_per_s);
        require_positive(s, "matmul_dim", static_cast<double>(p.matmul_dim));
        require_positive(s, "kernels_per_iteration", p.kernels_per_iteration);
        require_positive(s, "iterations", p.iterations);
        require_fraction(s, "indirect_rate", p.indirect_rate);
    } else if (kind == "llm_mix") {
        w.kind = WorkloadSpec::Kind::LlmMix;
        auto& p = w.llm_mix;
        s.set("tasks", p.tasks);
        s.set("layers", p.layers);
        s.set("weight_fraction", p.weight_fraction);
        s.set("kv_start", p.kv_start);
        s.set("kv_end", p.kv_end);
        s.set("decode_steps", p.decode_steps);
        require_positive(s, "tasks", p.tasks);
        require_positive(s, "layers", p.layers);
        require_positive(s, "decode_steps", p.decode_steps);
        require_fraction(s, "kv_start", p.kv_start);
        require_fraction(s, "kv_end", p.kv_end);
        if (!(p.weight_fraction > 0 && p.weight_fraction < 1))
            s.fail("weight_fraction", "must lie in (0, 1)");
    } else if (kind == "vector_add") {
        w.kind = WorkloadSpec::Kind::VectorAdd;
        auto& p = w.vector_add;
        s.set("tasks", p.tasks);
        s.set("elems", p.elems);
        s.set("elem_bytes", p.elem_bytes);
        s.set("iterations", p.iterations);
        s.set("indirect_rate", p.indirect_rate);
        require_positive(s, "tasks", p.tasks);
        require_positive(s, "elems", static_cast<double>(p.elems));
        require_positive(s, "elem_bytes", static_cast<double>(p.elem_bytes));
        require_positive(s, "iterations", p.iterations);
        require_fraction(s, "indirect_rate", p.indirect_rate);
    } else if (kind == "trace") {
        w.kind = WorkloadSpec::Kind::Trace;
        auto paths = s.strings("paths");
        if (!paths || paths->empty()) s.fail("paths", "needs at least one trace file");
        w.trace_paths = *paths;
    } else {
        throw ConfigError(origin + ": unknown workload kind [workload." + kind +
                          "]; expected microbench, llm_mix, vector_add or trace");
    }
    s.finish();
}

void read_scheduler(Section s, ScenarioConfig& c) {
    Policy& p = c.policy;
    if (auto k = s.string("policy")) {
        if (*k == "round_robin") p.kind = Policy::Kind::RoundRobin;
        else if (*k == "priority") p.kind = Policy::Kind::Priority;
        else s.fail("policy", "expected \"round_robin\" or \"priority\"");
    }
    s.set("timeslice_s", p.timeslice_s);
    if (auto l = s.numbers("level_timeslice_s")) p.level_timeslice_s = *l;
    s.set("horizon_rounds", p.horizon_rounds);
    s.set("switch_cost_s", p.switch_cost_s);
    s.set("time_budget_s", c.time_budget_s);
    s.set("warmup_s", c.warmup_s);
    s.finish();
    try {
        p.validate();
    } catch (const ConfigError& e) {
        s.fail("", e.what());
    }
    if (c.time_budget_s < 0) s.fail("time_budget_s", "must be non-negative");
    if (c.warmup_s < 0) s.fail("warmup_s", "must be non-negative");
    if (c.warmup_s > 0 && !(c.time_budget_s > c.warmup_s))
        s.fail("warmup_s", "needs a time_budget_s beyond the warmup");
}

void read_modes(Section s, ScenarioConfig& c) {
    std::optional<std::uint64_t> prefetch = s.count("prefetch_pages", 1);
    if (auto names = s.strings("modes")) {
        if (names->empty()) s.fail("modes", "needs at least one mode");
        c.modes.clear();
        std::set<std::string> seen;
        for (const auto& n : *names) {
            Mode m;
            try {
                m = parse_mode(n);
            } catch (const ConfigError& e) {
                s.fail("modes", e.what());
            }
            // A bare "um" takes the section-wide prefetch.
            if (n == "um" && prefetch) m.prefetch_pages = static_cast<int>(*prefetch);
            std::string key = m.name() + (m.kind == Mode::Kind::UM ? ":" + std::to_string(m.prefetch_pages) : "");
            if (!seen.insert(key).second) s.fail("modes", "duplicate mode '" + n + "'");
            c.modes.push_back(m);
        }
    } else if (prefetch) {
        for (auto& m : c.modes)
            if (m.kind == Mode::Kind::UM) m.prefetch_pages = static_cast<int>(*prefetch);
    }
    s.finish();
}

void read_sweep(Section s, ScenarioConfig& c) {
    if (auto r = s.numbers("ratios")) {
        for (double x : *r)
            if (!(x > 0)) s.fail("ratios", "ratios must be positive");
        c.ratios = *r;
    }
    s.finish();
}

void read_root(const toml::table& root, const std::string& origin, ScenarioConfig& c) {
    static const std::set<std::string> kSections{"hw", "workload", "scheduler", "mode", "sweep"};
    for (const auto& [k, v] : root) {
        std::string key(k.str());
        if (key == "name") {
            if (!v.is_string()) throw ConfigError(origin + ": name must be a string");
            c.name = *v.value<std::string>();
        } else if (key == "seed") {
            auto s = v.value<std::int64_t>();
            if (!v.is_integer() || !s || *s < 0) throw ConfigError(origin + ": seed must be a non-negative integer");
            c.seed = static_cast<std::uint64_t>(*s);
        } else if (!kSections.count(key)) {
            throw ConfigError(origin + ": unknown top-level key or section '" + key + "'");
        }
    }
    if (root.get("name") && (c.name.empty() || c.name.find_first_of(",\"\n") != std::string::npos))
        throw ConfigError(origin + ": name must be non-empty without commas or quotes");
    read_hw(Section(require_table(root, "hw", origin), "hw", origin), c.hw);
    read_workload(root, origin, c.workload);
    static const toml::table kEmpty;
    auto optional = [&](const char* key) -> const toml::table& {
        return root.get(key) ? require_table(root, key, origin) : kEmpty;
    };
    read_scheduler(Section(optional("scheduler"), "scheduler", origin), c);
    read_modes(Section(optional("mode"), "mode", origin), c);
    read_sweep(Section(optional("sweep"), "sweep", origin), c);
}

ScenarioConfig parse_named(const std::string& text, const std::string& origin) {
    toml::table root;
    try {
        root = toml::parse(text, origin);
    } catch (const toml::parse_error& e) {
        std::ostringstream os;
        os << origin << ":" << e.source().begin.line << ":" << e.source().begin.column << ": "
           << e.description();
        throw ConfigError(os.str());
    }
    ScenarioConfig c;
    c.name.clear();
    read_root(root, origin, c);
    return c;
}

}  // namespace

ScenarioConfig parse_config(const std::string& text, const std::string& origin) {
    ScenarioConfig c = parse_named(text, origin);
    if (c.name.empty()) c.name = "scenario";
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config '" + path + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    ScenarioConfig c = parse_named(buf.str(), path);
    if (c.name.empty()) c.name = std::filesystem::path(path).stem().string();
    std::filesystem::path dir = std::filesystem::path(path).parent_path();
    for (auto& p : c.workload.trace_paths)
        if (std::filesystem::path(p).is_relative()) p = (dir / p).lexically_normal().string();
    return c;
}

}  // namespace msim
