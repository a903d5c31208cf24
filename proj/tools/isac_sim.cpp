// SPDX-License-Identifier: Apache-2.0
//
// isac-waveforms: range-Doppler simulation of ISAC candidate radar waveforms
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
// http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.
// ------------------------------------------------------------------------

// isac_sim run <config-file> [--out DIR] [--preset table1|ci] [--waveforms LIST] [--bench] [--oracle]
//
// Exit codes: 0 success, 2 config error, 3 scenario error, 4 partial failure.
// Worker threads: ISAC_THREADS.

#include "isac/isac.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace
{

std::string read_file(const std::string &path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw isac::ConfigError(0, "", "cannot open " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void print_summary(const isac::RunSummary &s, const std::string &out_dir)
{
    std::printf("%-16s %10s %10s %10s  %s\n", "waveform", "range_m", "vel_mps", "pslr_db", "note");
    for (const auto &w : s.waveforms)
    {
        const std::string name(isac::to_string(w.kind));
        if (w.detection)
            std::printf("%-16s %10.4f %10.3f %10.2f  %s\n", name.c_str(), w.detection->range_m,
                        w.detection->velocity_mps, w.pslr_db, "");
        else
            std::printf("%-16s %10s %10s %10s  %s\n", name.c_str(), "-", "-", "-", w.error.c_str());
        for (const auto &row : w.fixed_point)
            std::printf("    <%s> sqnr %.1f dB, peak %s, pslr delta %.3f dB\n", row.format.to_string().c_str(),
                        row.sqnr_db, row.peak_agree ? "agrees" : "differs", row.pslr_delta_db);
    }
    if (s.benchmarks)
    {
        for (const auto &row : s.benchmarks->rows)
            std::printf("bench %-22s median %.6f s\n", row.name.c_str(), row.timing.median_s);
        for (const auto &[name, ratio] : s.benchmarks->ratios)
            std::printf("ratio %-22s %.2f\n", name.c_str(), ratio);
        for (const auto &n : s.benchmarks->notices)
            std::printf("notice: %s\n", n.c_str());
    }
    for (const auto &w : s.warnings)
        std::fprintf(stderr, "warning: %s\n", w.c_str());
    std::printf("artifacts written to %s\n", out_dir.c_str());
}

} // namespace

int main(int argc, char **argv)
{
    CLI::App app{"Range-Doppler comparison of FMCW, PMCW and Golay ISAC waveforms"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::string preset;
    std::string waveforms;
    bool bench = false;
    bool oracle = false;

    CLI::App *run = app.add_subcommand("run", "Run a scenario configuration");
    run->add_option("config", config_path, "Scenario configuration file")->required();
    run->add_option("--out", out_dir, "Output directory (overrides [output] directory)");
    run->add_option("--preset", preset, "Radar profile: table1 (P = 2000) or ci (P = 64)")
        ->check(CLI::IsMember({"table1", "ci"}));
    run->add_option("--waveforms", waveforms, "Comma-separated list: fmcw,pmcw,golay_standard,golay_dr");
    run->add_flag("--bench", bench, "Run the timing benchmarks");
    run->add_flag("--oracle", oracle, "Cross-check every map against the time-domain oracle");

    CLI11_PARSE(app, argc, argv);

    isac::ScenarioConfig config;
    try
    {
        config = isac::parse_config(read_file(config_path));
        if (!preset.empty())
            isac::apply_preset(config, preset == "table1" ? isac::Preset::table1 : isac::Preset::ci);
        if (!waveforms.empty())
            config.waveforms = isac::parse_waveform_list(waveforms);
        if (bench)
            config.benchmark_enabled = true;
        if (oracle)
            config.run_oracle = true;
        if (!out_dir.empty())
            config.output_directory = out_dir;
        config.radar.validate();
    }
    catch (const isac::Error &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return isac::exit_config_error;
    }

    try
    {
        const isac::RunSummary summary = isac::run_comparison(config, config.output_directory);
        print_summary(summary, config.output_directory);
        if (summary.exit_code == isac::exit_partial_failure)
            for (const auto &w : summary.waveforms)
                if (!w.error.empty())
                    std::cerr << "error: " << isac::to_string(w.kind) << ": " << w.error << '\n';
        return summary.exit_code;
    }
    catch (const isac::ScenarioError &e)
    {
        std::cerr << "scenario error: " << e.what() << '\n';
        return isac::exit_scenario_error;
    }
    catch (const std::exception &e)
    {
        std::cerr << "error: " << e.what() << '\n';
        return isac::exit_failure;
    }
}
