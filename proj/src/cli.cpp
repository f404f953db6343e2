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

#include "msim/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "msim/analyzer.hpp"
#include "msim/config.hpp"
#include "msim/experiment.hpp"
#include "msim/predictor.hpp"
#include "msim/report.hpp"
#include "msim/trace.hpp"
#include "msim/workload.hpp"

namespace msim {

namespace {

namespace fs = std::filesystem;

ScenarioConfig load_with_overrides(const std::string& path, const CliOptions& opts) {
    ScenarioConfig cfg = load_config(path);
    if (opts.seed) cfg.seed = *opts.seed;
    return cfg;
}

class OutDir {
public:
    explicit OutDir(const std::string& dir) : dir_(dir) {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw Error("cannot create output directory '" + dir + "': " + ec.message());
    }

    template <class F>
    void write(const std::string& name, F&& body) {
        std::string path = (dir_ / name).string();
        std::ofstream f(path, std::ios::binary);
        if (!f) throw Error("cannot write '" + path + "'");
        body(f);
        f.close();
        if (!f) throw Error("write failed for '" + path + "'");
        written_.push_back(path);
    }

    std::vector<std::string> written() const { return written_; }

private:
    fs::path dir_;
    std::vector<std::string> written_;
};

Task load_trace_located(const std::string& path, std::uint64_t page_size) {
    try {
        return load_trace(path, page_size);
    } catch (const ParseError& e) {
        throw Error(path + ": " + e.what());
    }
}

void write_charts(OutDir& out, const std::vector<PointResult>& rows, const std::string& prefix) {
    for (const auto& [key, chart] : sweep_charts(rows))
        out.write(prefix + key + ".svg", [&](std::ostream& os) { os << svg_line_chart(chart); });
}

}  // namespace

std::vector<std::string> cmd_run(const std::string& config_path, const CliOptions& opts, std::ostream& log) {
    ScenarioConfig cfg = load_with_overrides(config_path, opts);
    std::vector<PointResult> rows = run_sweep(cfg, {cfg.workload.ratio}, opts.jobs);
    OutDir out(opts.out_dir);
    out.write("metrics.csv", [&](std::ostream& os) { write_metrics_csv(rows, os); });
    std::ostringstream summary;
    write_summary(rows, summary);
    out.write("summary.txt", [&](std::ostream& os) { os << summary.str(); });
    log << summary.str();
    return out.written();
}

std::vector<std::string> cmd_sweep(const std::string& config_path, const std::vector<double>& ratios,
                                   const CliOptions& opts, std::ostream& log) {
    ScenarioConfig cfg = load_with_overrides(config_path, opts);
    std::vector<double> points = ratios.empty() ? cfg.ratios : ratios;
    if (points.empty()) throw ConfigError(config_path + ": no sweep ratios; pass --ratios or set [sweep] ratios");
    for (double r : points)
        if (!(r > 0)) throw ConfigError("sweep ratios must be positive");
    std::vector<PointResult> rows = run_sweep(cfg, points, opts.jobs);
    OutDir out(opts.out_dir);
    out.write("sweep.csv", [&](std::ostream& os) { write_sweep_csv(rows, os); });
    out.write("metrics.csv", [&](std::ostream& os) { write_metrics_csv(rows, os); });
    if (opts.charts) write_charts(out, rows, "sweep_");
    write_summary(rows, log);
    return out.written();
}

std::vector<std::string> cmd_analyze(const std::string& trace_path, const CliOptions& opts, std::ostream& log) {
    Task task = load_trace_located(trace_path, 4096);
    std::vector<KernelDescriptor> descs = analyze_task(task);
    auto records = records_by_kernel(task);
    OutDir out(opts.out_dir);
    std::string stem = fs::path(trace_path).stem().string();
    out.write(stem + ".desc", [&](std::ostream& os) { write_descriptors(descs, os); });
    out.write("access_types.csv", [&](std::ostream& os) { write_distribution_csv(descs, records, os); });
    AccessDistribution all = access_distribution(descs, records);
    log << descs.size() << " kernels, " << all.total() << " regions: fixed "
        << format_number(100 * all.share(RuleKind::Fixed)) << "%, linear "
        << format_number(100 * all.share(RuleKind::Linear)) << "%, strided "
        << format_number(100 * all.share(RuleKind::Strided)) << "%, others "
        << format_number(100 * all.share(RuleKind::Unpredictable)) << "%\n";
    return out.written();
}

std::vector<std::string> cmd_predict_check(const std::string& trace_path, const std::string& desc_path,
                                           const CliOptions& opts, std::ostream& log) {
    Task task = load_trace_located(trace_path, 4096);
    std::vector<KernelDescriptor> descs;
    try {
        descs = load_descriptors(desc_path);
    } catch (const ParseError& e) {
        throw Error(desc_path + ": " + e.what());
    }
    TemplatePredictor known(descs);
    for (const auto& [name, recs] : records_by_kernel(task))
        if (!known.knows(name)) log << "warning: kernel '" << name << "' has no descriptor; treated as Unpredictable\n";
    std::vector<KernelAccuracy> rows = accuracy_table(task, descs, 4096);
    OutDir out(opts.out_dir);
    out.write("accuracy.csv", [&](std::ostream& os) { write_accuracy_csv(rows, os); });
    for (const auto& r : rows)
        if (r.kernel == "ALL")
            log << r.predictor << ": F- " << format_number(100 * r.f_neg) << "%, F+ "
                << format_number(100 * r.f_pos) << "%\n";
    return out.written();
}

std::vector<std::string> cmd_generate(const GenerateOptions& g, const CliOptions& opts, std::ostream& log) {
    std::uint64_t seed = opts.seed.value_or(1);
    Task task;
    if (g.kind == "planted") {
        task = gen_planted_corpus({g.kernels, g.invocations, seed, g.indirect_rate, 4096}).task;
    } else if (g.kind == "llm") {
        LlmParams p;
        p.layers = 4;
        p.weight_bytes_per_layer = 8 << 20;
        p.kv_max_bytes = 4 << 20;
        p.decode_steps = g.invocations;
        p.kv_used_fraction_schedule.clear();
        for (std::uint32_t i = 0; i < g.invocations; ++i)
            p.kv_used_fraction_schedule.push_back(0.1 + 0.8 * i / std::max(1u, g.invocations));
        WorkloadOptions o;
        o.seed = seed;
        o.indirect_rate = g.indirect_rate;
        task = gen_llm_like(p, o);
    } else {
        throw ConfigError("unknown corpus kind '" + g.kind + "'; expected planted or llm");
    }
    OutDir out(opts.out_dir);
    out.write(g.name, [&](std::ostream& os) { write_trace(task, os); });
    log << task.commands.size() << " commands, " << task.allocations.size() << " allocations\n";
    return out.written();
}

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Trace-driven simulator for proactive GPU memory scheduling", "msim"};
    app.require_subcommand(1);
    // Global options may follow the subcommand.
    app.fallthrough();
    CliOptions opts;
    std::uint64_t seed = 0;
    bool no_charts = false;
    app.add_option("--out-dir", opts.out_dir, "Directory for output files")->capture_default_str();
    auto* seed_opt = app.add_option("--seed", seed, "Override the config seed");
    app.add_flag("--no-charts", no_charts, "Write CSV files only");
    app.add_option("-j,--jobs", opts.jobs, "Worker threads for sweep points")
        ->check(CLI::Range(1u, 256u))
        ->capture_default_str();

    std::string config, trace, desc;
    std::vector<double> ratios;
    auto* run = app.add_subcommand("run", "Simulate every configured mode once");
    run->add_option("config", config, "Scenario config (TOML)")->required();
    auto* sweep = app.add_subcommand("sweep", "Simulate a range of subscription ratios");
    sweep->add_option("config", config, "Scenario config (TOML)")->required();
    sweep->add_option("--ratios", ratios, "Subscription ratios, e.g. 1.0 1.5 2.0")->delimiter(',');
    auto* analyze = app.add_subcommand("analyze", "Infer kernel descriptors from a trace");
    analyze->add_option("trace", trace, "Trace file (MSIM-TRACE v1)")->required();
    auto* check = app.add_subcommand("predict-check", "Measure predictor accuracy on a trace");
    check->add_option("trace", trace, "Trace file (MSIM-TRACE v1)")->required();
    check->add_option("descriptors", desc, "Descriptor file (MSIM-DESC v1)")->required();

    GenerateOptions gen;
    auto* generate = app.add_subcommand("generate", "Write a synthetic trace corpus");
    generate->add_option("kind", gen.kind, "planted or llm")->required();
    generate->add_option("name", gen.name, "Output file name inside --out-dir")->required();
    generate->add_option("--kernels", gen.kernels, "Planted kernels")->capture_default_str();
    generate->add_option("--invocations", gen.invocations, "Invocations per kernel")->capture_default_str();
    generate->add_option("--indirect-rate", gen.indirect_rate, "Share of launches with an indirect access")
        ->check(CLI::Range(0.0, 1.0))
        ->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        // --help and --version land here too and succeed.
        return app.exit(e, out, err) == 0 ? 0 : 2;
    }
    if (*seed_opt) opts.seed = seed;
    opts.charts = !no_charts;

    try {
        std::vector<std::string> files;
        if (*run) files = cmd_run(config, opts, out);
        else if (*sweep) files = cmd_sweep(config, ratios, opts, out);
        else if (*analyze) files = cmd_analyze(trace, opts, out);
        else if (*generate) files = cmd_generate(gen, opts, out);
        else files = cmd_predict_check(trace, desc, opts, out);
        for (const auto& f : files) out << "wrote " << f << '\n';
    } catch (const Error& e) {
        err << "msim: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

}  // namespace msim
