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
#include <optional>
#include <string>
#include <vector>

namespace msim {

struct CliOptions {
    std::string out_dir = ".";
    std::optional<std::uint64_t> seed;
    bool charts = true;
    unsigned jobs = 1;
};

/// Each command writes its artifacts under out_dir and returns their
/// paths in write order. Errors surface as msim::Error.
std::vector<std::string> cmd_run(const std::string& config_path, const CliOptions& opts, std::ostream& log);
/// Empty `ratios` falls back to the config's [sweep] ratios.
std::vector<std::string> cmd_sweep(const std::string& config_path, const std::vector<double>& ratios,
                                   const CliOptions& opts, std::ostream& log);
std::vector<std::string> cmd_analyze(const std::string& trace_path, const CliOptions& opts, std::ostream& log);
std::vector<std::string> cmd_predict_check(const std::string& trace_path, const std::string& desc_path,
                                           const CliOptions& opts, std::ostream& log);

struct GenerateOptions {
    /// "planted" (Fixed, Linear and Strided kernels) or "llm".
    std::string kind = "planted";
    std::string name = "corpus.trace";
    std::uint32_t kernels = 60;
    std::uint32_t invocations = 4;
    double indirect_rate = 0.0;
};

/// Synthetic trace for analyze and predict-check; the seed defaults to 1.
std::vector<std::string> cmd_generate(const GenerateOptions& gen, const CliOptions& opts, std::ostream& log);

/// Full command line without the program name. Returns the exit code:
/// 0 on success, 1 on a simulation or input error, 2 on bad usage.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msim
