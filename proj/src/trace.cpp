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

#include "msim/trace.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace msim {

namespace {

constexpr const char* kHeader = "MSIM-TRACE v1";

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

// Splits on whitespace outside [] and (); whitespace inside is dropped.
std::vector<std::string> tokenize(const std::string& line, int lineno) {
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (char ch : line) {
        if (ch == '[' || ch == '(') ++depth;
        if (ch == ']' || ch == ')') {
            if (--depth < 0) throw ParseError("unbalanced bracket", lineno);
        }
        if (std::isspace(static_cast<unsigned char>(ch))) {
            if (depth == 0 && !cur.empty()) {
                out.push_back(cur);
                cur.clear();
            }
            continue;
        }
        cur += ch;
    }
    if (depth != 0) throw ParseError("unbalanced bracket", lineno);
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::uint64_t parse_u64(const std::string& s, int lineno, const char* what) {
    try {
        if (s.empty() || s[0] == '-') throw std::invalid_argument(s);
        std::size_t pos = 0;
        std::uint64_t v = std::stoull(s, &pos, 0);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", lineno);
    }
}

double parse_double(const std::string& s, int lineno, const char* what) {
    try {
        std::size_t pos = 0;
        double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::logic_error&) {
        throw ParseError(std::string("bad ") + what + " '" + s + "'", lineno);
    }
}

// "[a,b,c]" -> {"a","b","c"}; nested parentheses stay intact.
std::vector<std::string> split_list(const std::string& s, int lineno) {
    if (s.size() < 2 || s.front() != '[' || s.back() != ']')
        throw ParseError("expected a bracketed list, got '" + s + "'", lineno);
    std::vector<std::string> out;
    std::string cur;
    int depth = 0;
    for (std::size_t i = 1; i + 1 < s.size(); ++i) {
        char ch = s[i];
        if (ch == '(') ++depth;
        if (ch == ')') --depth;
        if (ch == ',' && depth == 0) {
            out.push_back(cur);
            cur.clear();
            continue;
        }
        cur += ch;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

std::vector<ByteRange> parse_ranges(const std::string& s, int lineno) {
    std::vector<ByteRange> out;
    for (const auto& item : split_list(s, lineno)) {
        if (item.size() < 5 || item.front() != '(' || item.back() != ')')
            throw ParseError("bad range '" + item + "'", lineno);
        auto comma = item.find(',');
        if (comma == std::string::npos) throw ParseError("bad range '" + item + "'", lineno);
        ByteRange r{parse_u64(item.substr(1, comma - 1), lineno, "range start"),
                    parse_u64(item.substr(comma + 1, item.size() - comma - 2), lineno, "range length")};
        if (r.length == 0) throw ParseError("zero-length range", lineno);
        out.push_back(r);
    }
    return out;
}

std::vector<std::uint8_t> parse_hex(const std::string& s, int lineno) {
    if (s.size() % 2 != 0) throw ParseError("odd-length hex payload", lineno);
    std::vector<std::uint8_t> out;
    for (std::size_t i = 0; i < s.size(); i += 2) {
        unsigned v = 0;
        for (std::size_t j = i; j < i + 2; ++j) {
            char c = static_cast<char>(std::tolower(static_cast<unsigned char>(s[j])));
            int d = (c >= '0' && c <= '9') ? c - '0' : (c >= 'a' && c <= 'f') ? c - 'a' + 10 : -1;
            if (d < 0) throw ParseError("bad hex digit in '" + s + "'", lineno);
            v = v * 16 + static_cast<unsigned>(d);
        }
        out.push_back(static_cast<std::uint8_t>(v));
    }
    return out;
}

std::vector<LaunchArg> parse_args(const std::string& s, int lineno) {
    std::vector<LaunchArg> out;
    for (const auto& item : split_list(s, lineno)) {
        auto colon = item.find(':');
        if (colon == std::string::npos) throw ParseError("arg without width '" + item + "'", lineno);
        std::string w = item.substr(0, colon), v = item.substr(colon + 1);
        if (w == "64") {
            out.push_back(LaunchArg::u64(parse_u64(v, lineno, "64-bit arg")));
        } else if (w == "32") {
            std::uint64_t x = parse_u64(v, lineno, "32-bit arg");
            if (x > 0xffffffffull) throw ParseError("32-bit arg out of range", lineno);
            out.push_back(LaunchArg::u32(static_cast<std::uint32_t>(x)));
        } else if (w == "b") {
            out.push_back(LaunchArg::raw(parse_hex(v, lineno)));
        } else {
            throw ParseError("unknown arg width '" + w + "'", lineno);
        }
    }
    return out;
}

Dim3 parse_dim3(const std::string& s, int lineno) {
    Dim3 d{};
    std::stringstream ss(s);
    std::string part;
    int i = 0;
    while (std::getline(ss, part, ',')) {
        if (i >= 3) throw ParseError("dim3 needs three values", lineno);
        std::uint64_t v = parse_u64(part, lineno, "dimension");
        if (v == 0 || v > 0xffffffffull) throw ParseError("dimension out of range", lineno);
        d[static_cast<std::size_t>(i++)] = static_cast<std::uint32_t>(v);
    }
    if (i != 3) throw ParseError("dim3 needs three values", lineno);
    return d;
}

std::pair<std::string, std::string> key_value(const std::string& tok, int lineno) {
    auto eq = tok.find('=');
    if (eq == std::string::npos) throw ParseError("expected key=value, got '" + tok + "'", lineno);
    return {tok.substr(0, eq), tok.substr(eq + 1)};
}

bool parse_flag(const std::string& v, int lineno) {
    if (v == "1" || v == "true") return true;
    if (v == "0" || v == "false") return false;
    throw ParseError("bad flag value '" + v + "'", lineno);
}

}  // namespace

Task parse_trace(std::istream& in, std::uint64_t page_size) {
    Task task;
    std::string line;
    int lineno = 0;
    bool header = false;
    bool any_record = false;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line.resize(hash);
        auto toks = tokenize(line, lineno);
        if (toks.empty()) continue;
        if (!header) {
            if (toks.size() != 2 || toks[0] != "MSIM-TRACE" || toks[1] != "v1")
                throw ParseError("missing 'MSIM-TRACE v1' header", lineno);
            header = true;
            continue;
        }
        const std::string& kind = toks[0];
        if (kind == "TASK") {
            if (any_record) throw ParseError("TASK must precede other records", lineno);
            for (std::size_t i = 1; i < toks.size(); ++i) {
                auto [k, v] = key_value(toks[i], lineno);
                if (k == "id") task.id = static_cast<TaskId>(parse_u64(v, lineno, "task id"));
                else if (k == "priority") task.priority = static_cast<int>(parse_u64(v, lineno, "priority"));
                else throw ParseError("unknown TASK field '" + k + "'", lineno);
            }
        } else if (kind == "ALLOC") {
            if (toks.size() != 4) throw ParseError("ALLOC needs id base size", lineno);
            Allocation a{static_cast<std::uint32_t>(parse_u64(toks[1], lineno, "allocation id")),
                         parse_u64(toks[2], lineno, "base"), parse_u64(toks[3], lineno, "size"), task.id};
            task.allocations.push_back(a);
        } else if (kind == "KERNEL") {
            if (toks.size() < 5) throw ParseError("KERNEL needs name latency args access", lineno);
            Command c;
            c.kind = CommandKind::Kernel;
            c.kernel_name = toks[1];
            c.latency_s = parse_double(toks[2], lineno, "latency");
            bool have_args = false, have_access = false;
            for (std::size_t i = 3; i < toks.size(); ++i) {
                auto [k, v] = key_value(toks[i], lineno);
                if (k == "args") c.launch_args = parse_args(v, lineno), have_args = true;
                else if (k == "access") c.ground_truth_access = parse_ranges(v, lineno), have_access = true;
                else if (k == "indirect") c.indirect_access = parse_ranges(v, lineno);
                else if (k == "grid") c.grid = parse_dim3(v, lineno);
                else if (k == "block") c.block = parse_dim3(v, lineno);
                else if (k == "job_end") c.job_end = parse_flag(v, lineno);
                else throw ParseError("unknown KERNEL field '" + k + "'", lineno);
            }
            if (!have_args || !have_access) throw ParseError("KERNEL needs args= and access=", lineno);
            task.commands.push_back(std::move(c));
        } else if (kind == "MEMCPY") {
            if (toks.size() < 6 || toks.size() > 7) throw ParseError("MEMCPY needs dir src dst size latency", lineno);
            Command c;
            if (toks[1] == "H2D") c.kind = CommandKind::MemcpyH2D;
            else if (toks[1] == "D2H") c.kind = CommandKind::MemcpyD2H;
            else throw ParseError("MEMCPY direction must be H2D or D2H", lineno);
            c.launch_args = {LaunchArg::u64(parse_u64(toks[2], lineno, "src")),
                             LaunchArg::u64(parse_u64(toks[3], lineno, "dst")),
                             LaunchArg::u64(parse_u64(toks[4], lineno, "size"))};
            if (c.memcpy_size() == 0) throw ParseError("MEMCPY of zero bytes", lineno);
            c.latency_s = parse_double(toks[5], lineno, "latency");
            if (toks.size() == 7) {
                auto [k, v] = key_value(toks[6], lineno);
                if (k != "job_end") throw ParseError("unknown MEMCPY field '" + k + "'", lineno);
                c.job_end = parse_flag(v, lineno);
            }
            c.ground_truth_access = {c.memcpy_device_range()};
            task.commands.push_back(std::move(c));
        } else {
            throw ParseError("unknown record '" + kind + "'", lineno);
        }
        any_record = true;
    }
    if (!header) throw ParseError("missing 'MSIM-TRACE v1' header", lineno == 0 ? 1 : lineno);
    for (auto& a : task.allocations) a.owner = task.id;
    task.validate(page_size);
    return task;
}

Task load_trace(const std::string& path, std::uint64_t page_size) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open trace '" + path + "'");
    return parse_trace(f, page_size);
}

namespace {

void write_ranges(std::ostream& out, const std::vector<ByteRange>& rs) {
    out << '[';
    for (std::size_t i = 0; i < rs.size(); ++i)
        out << (i ? "," : "") << '(' << rs[i].start << ',' << rs[i].length << ')';
    out << ']';
}

}  // namespace

void write_trace(const Task& task, std::ostream& out) {
    out << kHeader << '\n';
    out << "TASK id=" << task.id << " priority=" << task.priority << '\n';
    for (const auto& a : task.allocations) out << "ALLOC " << a.id << ' ' << a.base << ' ' << a.size << '\n';
    for (const auto& c : task.commands) {
        if (c.kind == CommandKind::Kernel) {
            out << "KERNEL " << c.kernel_name << ' ' << fmt_double(c.latency_s) << " args=[";
            for (std::size_t i = 0; i < c.launch_args.size(); ++i) {
                const auto& a = c.launch_args[i];
                out << (i ? "," : "");
                if (a.width == LaunchArg::Width::W64) out << "64:" << a.value;
                else if (a.width == LaunchArg::Width::W32) out << "32:" << a.value;
                else {
                    out << "b:";
                    static const char* hex = "0123456789abcdef";
                    for (auto b : a.bytes) out << hex[b >> 4] << hex[b & 15];
                }
            }
            out << "] access=";
            write_ranges(out, c.ground_truth_access);
            if (!c.indirect_access.empty()) {
                out << " indirect=";
                write_ranges(out, c.indirect_access);
            }
            out << " grid=" << c.grid[0] << ',' << c.grid[1] << ',' << c.grid[2] << " block=" << c.block[0]
                << ',' << c.block[1] << ',' << c.block[2];
        } else {
            out << "MEMCPY " << to_string(c.kind) << ' ' << c.memcpy_src() << ' ' << c.memcpy_dst() << ' '
                << c.memcpy_size() << ' ' << fmt_double(c.latency_s);
        }
        if (c.job_end) out << " job_end=1";
        out << '\n';
    }
}

void save_trace(const Task& task, const std::string& path) {
    std::ofstream f(path);
    if (!f) throw Error("cannot write trace '" + path + "'");
    write_trace(task, f);
}

std::string trace_to_string(const Task& task) {
    std::ostringstream os;
    write_trace(task, os);
    return os.str();
}

}  // namespace msim
