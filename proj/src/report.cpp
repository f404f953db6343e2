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

#include "msim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iomanip>
#include <limits>
#include <ostream>
#include <sstream>

namespace msim {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (v == 0.0) return "0";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

namespace {

std::string esc_xml(const std::string& s) {
    std::string out;
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

std::string pct(double fraction) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.4f", fraction * 100.0 + 0.0);
    return buf;
}

}  // namespace

void write_metrics_csv(const std::vector<PointResult>& rows, std::ostream& out) {
    out << "version,scenario,ratio,mode,tasks,sim_time_s,work_s,commands,completions,"
           "normalized_throughput,faults,fault_bytes,populate_bytes,mapped_bytes,"
           "migrated_bytes_h2d,migrated_bytes_d2h,madvise_calls,madvise_overhead_s,switches,plans,"
           "plan_truncations,skipped_rules,fault_stall_s,migration_wait_s,max_resident_pages\n";
    for (const auto& r : rows) {
        const Metrics& m = r.metrics;
        out << kCsvSchemaVersion << ',' << r.scenario << ',' << format_number(r.ratio) << ',' << r.mode
            << ',' << r.tasks << ',' << format_number(m.sim_time_s) << ',' << format_number(m.work_s)
            << ',' << m.commands << ',' << m.completions << ',' << format_number(r.normalized_throughput)
            << ',' << m.faults << ',' << m.fault_bytes << ',' << m.populate_bytes << ',' << m.mapped_bytes
            << ',' << m.migrated_bytes_h2d << ',' << m.migrated_bytes_d2h << ',' << m.madvise_calls << ','
            << format_number(m.madvise_overhead_s) << ',' << m.switches << ',' << m.plans << ','
            << m.plan_truncations << ',' << m.skipped_rules << ',' << format_number(m.fault_stall_s) << ','
            << format_number(m.migration_wait_s) << ',' << m.max_resident_pages << '\n';
    }
}

void write_sweep_csv(const std::vector<PointResult>& rows, std::ostream& out) {
    out << "version,scenario,ratio,mode,normalized_throughput,faults_per_task,migrated_bytes_per_task\n";
    for (const auto& r : rows) {
        out << kCsvSchemaVersion << ',' << r.scenario << ',' << format_number(r.ratio) << ',' << r.mode
            << ',' << format_number(r.normalized_throughput) << ',' << format_number(r.faults_per_task())
            << ',' << format_number(r.migrated_bytes_per_task()) << '\n';
    }
}

void write_accuracy_csv(const std::vector<KernelAccuracy>& rows, std::ostream& out) {
    out << "version,kernel,predictor,f_neg_pct,f_pos_pct,invocations\n";
    for (const auto& r : rows) {
        out << kCsvSchemaVersion << ',' << r.kernel << ',' << r.predictor << ',' << pct(r.f_neg) << ','
            << pct(r.f_pos) << ',' << r.invocations << '\n';
    }
}

void write_distribution_csv(const std::vector<KernelDescriptor>& descs,
                            const std::map<std::string, std::vector<InvocationRecord>>& records,
                            std::ostream& out) {
    out << "version,kernel,fixed_pct,linear_pct,strided_pct,others_pct,regions\n";
    auto row = [&](const std::string& name, const AccessDistribution& d) {
        out << kCsvSchemaVersion << ',' << name << ',' << pct(d.share(RuleKind::Fixed)) << ','
            << pct(d.share(RuleKind::Linear)) << ',' << pct(d.share(RuleKind::Strided)) << ','
            << pct(d.share(RuleKind::Unpredictable)) << ',' << d.total() << '\n';
    };
    for (const auto& d : descs) {
        auto it = records.find(d.kernel_name);
        if (it == records.end()) continue;
        std::map<std::string, std::vector<InvocationRecord>> one{{it->first, it->second}};
        row(d.kernel_name, access_distribution({d}, one));
    }
    row("ALL", access_distribution(descs, records));
}

void write_summary(const std::vector<PointResult>& rows, std::ostream& out) {
    out << std::left << std::setw(16) << "scenario" << std::setw(8) << "ratio" << std::setw(26) << "mode"
        << std::right << std::setw(12) << "norm_tput" << std::setw(14) << "faults/task" << std::setw(16)
        << "migrated/task" << '\n';
    for (const auto& r : rows) {
        out << std::left << std::setw(16) << r.scenario << std::setw(8) << format_number(r.ratio)
            << std::setw(26) << r.mode << std::right << std::fixed << std::setprecision(4) << std::setw(12)
            << r.normalized_throughput << std::setprecision(1) << std::setw(14) << r.faults_per_task()
            << std::setprecision(3) << std::scientific << std::setw(16) << r.migrated_bytes_per_task()
            << std::defaultfloat << '\n';
    }
}

namespace {

// Ticks at 1, 2 or 5 times a power of ten covering [lo, hi].
std::vector<double> nice_ticks(double lo, double hi, int target = 5) {
    if (!(hi > lo)) hi = lo + 1.0;
    double raw = (hi - lo) / target;
    double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double m : {1.0, 2.0, 5.0, 10.0}) {
        step = m * mag;
        if (step >= raw) break;
    }
    std::vector<double> ticks;
    for (double t = std::ceil(lo / step - 1e-9) * step; t <= hi + step * 1e-9; t += step)
        ticks.push_back(std::abs(t) < step * 1e-9 ? 0.0 : t);
    return ticks;
}

const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f"};

}  // namespace

std::string svg_line_chart(const ChartSpec& spec) {
    const double W = 720, H = 420, L = 80, R = 190, T = 40, B = 56;
    const double pw = W - L - R, ph = H - T - B;
    double xmin = std::numeric_limits<double>::infinity(), xmax = -xmin;
    double ymin = xmin, ymax = -xmin;
    auto ty = [&](double y) { return spec.log_y ? std::log10(y) : y; };
    for (const auto& s : spec.series) {
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (spec.log_y && !(s.y[i] > 0)) continue;
            xmin = std::min(xmin, s.x[i]);
            xmax = std::max(xmax, s.x[i]);
            ymin = std::min(ymin, ty(s.y[i]));
            ymax = std::max(ymax, ty(s.y[i]));
        }
    }
    if (!std::isfinite(xmin)) xmin = 0, xmax = 1, ymin = 0, ymax = 1;
    if (spec.log_y) {
        ymin = std::floor(ymin);
        ymax = std::max(std::ceil(ymax), ymin + 1);
    } else {
        ymin = std::min(0.0, ymin);
        ymax = ymax > ymin ? ymax * 1.05 : ymin + 1;
    }
    if (!(xmax > xmin)) xmin -= 0.5, xmax += 0.5;
    auto px = [&](double x) { return L + (x - xmin) / (xmax - xmin) * pw; };
    auto py = [&](double v) { return T + ph - (v - ymin) / (ymax - ymin) * ph; };
    auto n = [](double v) { return format_number(std::round(v * 100) / 100); };

    std::ostringstream os;
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
       << "\" viewBox=\"0 0 " << W << ' ' << H << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << n(L + pw / 2) << "\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">"
       << esc_xml(spec.title) << "</text>\n";
    // Grid and tick labels.
    std::vector<double> yt;
    if (spec.log_y) {
        for (double e = ymin; e <= ymax + 1e-9; e += 1) yt.push_back(e);
    } else {
        yt = nice_ticks(ymin, ymax);
    }
    for (double v : yt) {
        if (v > ymax + 1e-9) continue;
        os << "<line x1=\"" << n(L) << "\" x2=\"" << n(L + pw) << "\" y1=\"" << n(py(v)) << "\" y2=\""
           << n(py(v)) << "\" stroke=\"#e0e0e0\"/>\n";
        os << "<text x=\"" << n(L - 6) << "\" y=\"" << n(py(v) + 4) << "\" text-anchor=\"end\">"
           << format_number(spec.log_y ? std::pow(10.0, v) : v) << "</text>\n";
    }
    for (double v : nice_ticks(xmin, xmax)) {
        if (v < xmin - 1e-9 || v > xmax + 1e-9) continue;
        os << "<line x1=\"" << n(px(v)) << "\" x2=\"" << n(px(v)) << "\" y1=\"" << n(T + ph) << "\" y2=\""
           << n(T + ph + 5) << "\" stroke=\"black\"/>\n";
        os << "<text x=\"" << n(px(v)) << "\" y=\"" << n(T + ph + 18) << "\" text-anchor=\"middle\">"
           << format_number(v) << "</text>\n";
    }
    os << "<rect x=\"" << n(L) << "\" y=\"" << n(T) << "\" width=\"" << n(pw) << "\" height=\"" << n(ph)
       << "\" fill=\"none\" stroke=\"black\"/>\n";
    os << "<text x=\"" << n(L + pw / 2) << "\" y=\"" << n(H - 14) << "\" text-anchor=\"middle\">"
       << esc_xml(spec.x_label) << "</text>\n";
    os << "<text transform=\"translate(18," << n(T + ph / 2) << ") rotate(-90)\" text-anchor=\"middle\">"
       << esc_xml(spec.y_label) << (spec.log_y ? " (log)" : "") << "</text>\n";
    // Series and legend.
    for (std::size_t k = 0; k < spec.series.size(); ++k) {
        const ChartSeries& s = spec.series[k];
        const char* color = kPalette[k % (sizeof kPalette / sizeof kPalette[0])];
        std::ostringstream pts;
        std::ostringstream dots;
        for (std::size_t i = 0; i < std::min(s.x.size(), s.y.size()); ++i) {
            if (spec.log_y && !(s.y[i] > 0)) continue;
            double X = px(s.x[i]), Y = py(ty(s.y[i]));
            pts << (pts.tellp() > 0 ? " " : "") << n(X) << ',' << n(Y);
            dots << "<circle cx=\"" << n(X) << "\" cy=\"" << n(Y) << "\" r=\"3\" fill=\"" << color << "\"/>\n";
        }
        os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"" << pts.str()
           << "\"/>\n"
           << dots.str();
        double ly = T + 14 + 20 * static_cast<double>(k);
        os << "<line x1=\"" << n(L + pw + 14) << "\" x2=\"" << n(L + pw + 36) << "\" y1=\"" << n(ly - 4)
           << "\" y2=\"" << n(ly - 4) << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n";
        os << "<text x=\"" << n(L + pw + 42) << "\" y=\"" << n(ly) << "\">" << esc_xml(s.name) << "</text>\n";
    }
    os << "</svg>\n";
    return os.str();
}

std::map<std::string, ChartSpec> sweep_charts(const std::vector<PointResult>& rows) {
    std::map<std::string, ChartSpec> charts;
    charts["throughput"] = {"Normalized throughput", "subscription ratio", "throughput / in-HBM", false, {}};
    charts["faults"] = {"Page faults per task", "subscription ratio", "faults", false, {}};
    charts["migrated"] = {"Migrated bytes per task", "subscription ratio", "bytes", false, {}};
    // Series follow the first-seen mode order.
    std::vector<std::string> modes;
    for (const auto& r : rows)
        if (std::find(modes.begin(), modes.end(), r.mode) == modes.end()) modes.push_back(r.mode);
    for (auto& [key, chart] : charts) {
        for (const auto& m : modes) {
            ChartSeries s{m, {}, {}};
            for (const auto& r : rows) {
                if (r.mode != m) continue;
                s.x.push_back(r.ratio);
                s.y.push_back(key == "throughput" ? r.normalized_throughput
                              : key == "faults"   ? r.faults_per_task()
                                                  : r.migrated_bytes_per_task());
            }
            chart.series.push_back(std::move(s));
        }
    }
    return charts;
}

}  // namespace msim
