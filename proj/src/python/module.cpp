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


// Python bindings: scenario loading, sweeps, trace analysis and the CLI.

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "msim/analyzer.hpp"
#include "msim/cli.hpp"
#include "msim/config.hpp"
#include "msim/experiment.hpp"
#include "msim/presets.hpp"
#include "msim/trace.hpp"

namespace py = pybind11;

namespace {

py::dict metrics_dict(const msim::Metrics& m) {
    py::dict d;
    d["sim_time_s"] = m.sim_time_s;
    d["work_s"] = m.work_s;
    d["commands"] = m.commands;
    d["completions"] = m.completions;
    d["faults"] = m.faults;
    d["fault_bytes"] = m.fault_bytes;
    d["populate_bytes"] = m.populate_bytes;
    d["mapped_bytes"] = m.mapped_bytes;
    d["migrated_bytes_h2d"] = m.migrated_bytes_h2d;
    d["migrated_bytes_d2h"] = m.migrated_bytes_d2h;
    d["madvise_calls"] = m.madvise_calls;
    d["madvise_overhead_s"] = m.madvise_overhead_s;
    d["switches"] = m.switches;
    d["plans"] = m.plans;
    d["plan_truncations"] = m.plan_truncations;
    d["skipped_rules"] = m.skipped_rules;
    d["fault_stall_s"] = m.fault_stall_s;
    d["migration_wait_s"] = m.migration_wait_s;
    d["max_resident_pages"] = m.max_resident_pages;
    return d;
}

py::dict point_dict(const msim::PointResult& p) {
    py::dict d;
    d["scenario"] = p.scenario;
    d["ratio"] = p.ratio;
    d["mode"] = p.mode;
    d["tasks"] = p.tasks;
    d["normalized_throughput"] = p.normalized_throughput;
    d["faults_per_task"] = p.faults_per_task();
    d["migrated_bytes_per_task"] = p.migrated_bytes_per_task();
    d["metrics"] = metrics_dict(p.metrics);
    return d;
}

py::list sweep(const msim::ScenarioConfig& cfg, std::optional<std::vector<double>> ratios, unsigned jobs) {
    std::vector<double> rs = ratios ? *ratios : cfg.ratios;
    if (rs.empty()) rs = {cfg.workload.ratio};
    std::vector<msim::PointResult> points;
    {
        py::gil_scoped_release release;
        points = msim::run_sweep(cfg, rs, jobs == 0 ? 1 : jobs);
    }
    py::list out;
    for (const auto& p : points) out.append(point_dict(p));
    return out;
}

py::dict analyze(const std::string& trace_path) {
    msim::Task task = msim::load_trace(trace_path);
    auto descs = msim::analyze_task(task);
    auto dist = msim::access_distribution(descs, msim::records_by_kernel(task));
    std::ostringstream text;
    msim::write_descriptors(descs, text);
    py::dict kernels;
    for (const auto& k : descs) {
        py::list rules;
        for (const auto& r : k.rules) rules.append(msim::to_string(r.kind));
        kernels[py::str(k.kernel_name)] = rules;
    }
    py::dict shares;
    shares["fixed"] = dist.share(msim::RuleKind::Fixed);
    shares["linear"] = dist.share(msim::RuleKind::Linear);
    shares["strided"] = dist.share(msim::RuleKind::Strided);
    shares["others"] = dist.share(msim::RuleKind::Unpredictable);
    py::dict d;
    d["descriptors"] = text.str();
    d["kernels"] = kernels;
    d["shares"] = shares;
    d["regions"] = dist.total();
    return d;
}

std::vector<std::string> mode_names(const msim::ScenarioConfig& c) {
    std::vector<std::string> names;
    for (const auto& m : c.modes) {
        std::string n = m.name();
        if (m.kind == msim::Mode::Kind::UM && m.prefetch_pages != msim::Mode{}.prefetch_pages)
            n += ":" + std::to_string(m.prefetch_pages);
        names.push_back(n);
    }
    return names;
}

}  // namespace

PYBIND11_MODULE(_msim, m) {
    m.doc() = "Trace-driven GPU memory oversubscription simulator";

    auto error = py::register_exception<msim::Error>(m, "Error", PyExc_RuntimeError);
    py::register_exception<msim::ConfigError>(m, "ConfigError", error.ptr());
    py::register_exception<msim::ParseError>(m, "ParseError", error.ptr());

    py::class_<msim::HwConfig>(m, "HwConfig")
        .def(py::init<>())
        .def_readwrite("name", &msim::HwConfig::name)
        .def_readwrite("hbm_capacity_bytes", &msim::HwConfig::hbm_capacity_bytes)
        .def_readwrite("dram_capacity_bytes", &msim::HwConfig::dram_capacity_bytes)
        .def_readwrite("page_size_bytes", &msim::HwConfig::page_size_bytes)
        .def_readwrite("bw_d2h_bytes_per_s", &msim::HwConfig::bw_d2h_bytes_per_s)
        .def_readwrite("bw_h2d_bytes_per_s", &msim::HwConfig::bw_h2d_bytes_per_s)
        .def_readwrite("fault_control_plane_s", &msim::HwConfig::fault_control_plane_s)
        .def_readwrite("fault_transfer_s", &msim::HwConfig::fault_transfer_s)
        .def_readwrite("copy_engines", &msim::HwConfig::copy_engines)
        .def("hbm_pages", &msim::HwConfig::hbm_pages)
        .def("validate", &msim::HwConfig::validate);

    m.def("preset", &msim::preset_by_name, py::arg("name"));
    m.def("preset_names", &msim::preset_names);

    py::class_<msim::ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("name", &msim::ScenarioConfig::name)
        .def_readwrite("seed", &msim::ScenarioConfig::seed)
        .def_readwrite("hw", &msim::ScenarioConfig::hw)
        .def_readwrite("time_budget_s", &msim::ScenarioConfig::time_budget_s)
        .def_readwrite("warmup_s", &msim::ScenarioConfig::warmup_s)
        .def_readwrite("ratios", &msim::ScenarioConfig::ratios)
        .def_property_readonly("workload", [](const msim::ScenarioConfig& c) {
            return std::string(msim::to_string(c.workload.kind));
        })
        .def_property_readonly("modes", &mode_names)
        .def("set_modes", [](msim::ScenarioConfig& c, const std::vector<std::string>& names) {
            std::vector<msim::Mode> modes;
            for (const auto& n : names) modes.push_back(msim::parse_mode(n));
            c.modes = std::move(modes);
        }, py::arg("names"));

    m.def("parse_config", &msim::parse_config, py::arg("text"), py::arg("origin") = "<config>");
    m.def("load_config", &msim::load_config, py::arg("path"));
    m.def("sweep", &sweep, py::arg("config"), py::arg("ratios") = py::none(), py::arg("jobs") = 1,
          "Runs every (ratio, mode) point; rows are sorted by ratio then mode order.");
    m.def("analyze", &analyze, py::arg("trace_path"));

    m.def("main", [](const std::vector<std::string>& args) {
        std::ostringstream out, err;
        int code;
        {
            py::gil_scoped_release release;
            code = msim::cli_main(args, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
    }, py::arg("args"), "Runs the msim command line; returns (exit_code, stdout, stderr).");
}
