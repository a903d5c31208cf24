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

#pragma once

// Experiment driver behind the isac_sim CLI: one pass per waveform
// (schedule -> echo -> range-Doppler map -> detection + PSLR), CSV
// artifacts, a JSON run summary and optional timing benchmarks.

#include "isac/bench.hpp"
#include "isac/config.hpp"
#include "isac/fxp.hpp"
#include "isac/rsp.hpp"
#include "isac/scene.hpp"
#include "isac/waveform.hpp"

#include <json.hpp>

#include <filesystem>
#include <fstream>
#include <string>

namespace isac
{

inline constexpr const char *tool_version = "0.3.0";

enum ExitCode : int
{
    exit_success = 0,
    exit_failure = 1,
    exit_config_error = 2,
    exit_scenario_error = 3,
    exit_partial_failure = 4,
};

// ----- Reference-radar derivations -------------------------------------------------

/// Quantities derived from the radar parameters next to the values listed
/// for the 60 GHz reference radar, with the known mismatches spelled out.
struct RadarDerivations
{
    double range_resolution_m = 0.0;
    double max_unambiguous_velocity_mps = 0.0;
    double velocity_resolution_mps = 0.0;
    double listening_window_range_m = 0.0;
    double pri_range_m = 0.0;
    std::size_t samples_per_pri = 0;
    std::size_t packets_per_cpi = 0;

    static constexpr double listed_range_resolution_m = 0.085;
    static constexpr double listed_max_velocity_mps = 625.0;
    static constexpr double listed_velocity_resolution_mps = 0.3;
    static constexpr double listed_max_range_m = 44.0;

    std::vector<std::string> discrepancies;
};

inline std::string format_sig(double v, int digits)
{
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

inline RadarDerivations derive_radar_quantities(const WaveformParams &params)
{
    RadarDerivations d;
    d.range_resolution_m = params.range_resolution_m();
    d.max_unambiguous_velocity_mps = params.max_unambiguous_velocity_mps();
    d.velocity_resolution_mps = params.velocity_resolution_mps();
    d.listening_window_range_m = params.listening_window_range_m();
    d.pri_range_m = params.pri_range_m();
    d.samples_per_pri = params.samples_per_pri();
    d.packets_per_cpi = params.packets_per_cpi();

    const WaveformParams ref = WaveformParams::table1();
    d.discrepancies.push_back("velocity resolution: listed " + format_sig(RadarDerivations::listed_velocity_resolution_mps, 3) +
                              " m/s, but lambda/(2 T_CPI) = " + format_sig(ref.velocity_resolution_mps(), 3) +
                              " m/s at lambda = " + format_sig(ref.wavelength_m() * 1e3, 3) + " mm, T_CPI = " +
                              format_sig(ref.cpi_s * 1e3, 3) + " ms; this run uses " +
                              format_sig(d.velocity_resolution_mps, 3) + " m/s (not reconciled)");
    d.discrepancies.push_back("max unambiguous range: listed " + format_sig(RadarDerivations::listed_max_range_m, 3) +
                              " m matches c N T_s / 2 = " + format_sig(ref.listening_window_range_m(), 3) +
                              " m (512-sample listening window), not c T_pri / 2 = " +
                              format_sig(ref.pri_range_m(), 4) + " m; this run: listening window " +
                              format_sig(d.listening_window_range_m, 3) + " m, full PRI " +
                              format_sig(d.pri_range_m, 4) + " m");
    return d;
}

// ----- Run summary -----------------------------------------------------------------

struct WaveformResult
{
    ScheduleKind kind{};
    std::optional<Detection> detection;
    double pslr_db = std::numeric_limits<double>::quiet_NaN();
    std::string error;
    double synthesis_s = 0.0;
    double rsp_s = 0.0;
    std::optional<double> oracle_s;
    std::optional<double> oracle_deviation;
    std::vector<fxp::SweepRow> fixed_point;
    std::vector<std::string> artifacts;
};

struct BenchmarkRow
{
    std::string name;
    TimingStats timing;
};

struct BenchmarkTable
{
    std::string waveform;
    std::vector<BenchmarkRow> rows;
    std::vector<std::pair<std::string, double>> ratios;
    std::vector<std::string> notices;
};

struct RunSummary
{
    std::vector<WaveformResult> waveforms;
    RadarDerivations radar;
    std::vector<std::string> warnings;
    std::string config_echo;
    std::string version = tool_version;
    std::optional<BenchmarkTable> benchmarks;
    std::vector<std::string> artifacts;
    int exit_code = exit_success;
};

// ----- CSV ---------------------------------------------------------------------------------

inline std::string csv_number(double v)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.9g", v);
    return buf;
}

/// Two header lines (range axis, Doppler-velocity axis) then J rows of Q magnitudes.
inline void write_rd_csv(const std::filesystem::path &path, const RangeDopplerMap &map)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "# range_m";
    for (double r : map.range_axis_m)
        out << ',' << csv_number(r);
    out << "\n# velocity_mps";
    for (double v : map.doppler_axis_mps)
        out << ',' << csv_number(v);
    out << '\n';
    std::string line;
    for (std::size_t j = 0; j < map.doppler_bins; ++j)
    {
        line.clear();
        for (std::size_t q = 0; q < map.range_bins; ++q)
        {
            if (q)
                line += ',';
            line += csv_number(map.at(j, q));
        }
        out << line << '\n';
    }
}

inline void write_profile_csv(const std::filesystem::path &path, const RangeDopplerMap &map, std::size_t doppler_bin)
{
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw Error("cannot write " + path.string());
    out << "# velocity_mps," << csv_number(map.doppler_axis_mps[doppler_bin]) << "\nrange_m,magnitude\n";
    for (std::size_t q = 0; q < map.range_bins; ++q)
        out << csv_number(map.range_axis_m[q]) << ',' << csv_number(map.at(doppler_bin, q)) << '\n';
}

// ----- JSON ---------------------------------------------------------------------------------

namespace detail
{

inline nlohmann::json json_number(double v)
{
    if (std::isnan(v))
        return nullptr;
    if (std::isinf(v))
        return v > 0 ? "inf" : "-inf";
    return v;
}

inline nlohmann::json to_json(const Detection &d)
{
    return {{"range_m", d.range_m},           {"velocity_mps", d.velocity_mps}, {"peak_magnitude", d.peak_magnitude},
            {"range_bin", d.range_bin},       {"doppler_bin", d.doppler_bin}};
}

inline nlohmann::json to_json(const fxp::SweepRow &row)
{
    nlohmann::json stages = nlohmann::json::array();
    for (const auto &s : row.report.stages)
        stages.push_back({{"stage", s.stage}, {"components", s.components}, {"saturated", s.saturated}});
    return {{"format", row.format.to_string()},
            {"word_bits", row.format.word_bits},
            {"integer_bits", row.format.integer_bits},
            {"mode", fxp::to_string(row.report.mode)},
            {"sqnr_db", json_number(row.sqnr_db)},
            {"peak_agree", row.peak_agree},
            {"pslr_double_db", json_number(row.report.pslr_double_db)},
            {"pslr_fixed_db", json_number(row.report.pslr_fixed_db)},
            {"pslr_delta_db", json_number(row.pslr_delta_db)},
            {"runtime_s", row.runtime_s},
            {"stages", stages},
            {"twiddle_saturations", row.report.twiddle_saturations},
            {"saturation_warning", row.report.saturation_warning},
            {"warnings", row.report.warnings}};
}

inline nlohmann::json to_json(const TimingStats &t)
{
    return {{"median_s", t.median_s}, {"min_s", t.min_s}, {"max_s", t.max_s}, {"samples_s", t.samples_s}};
}

} // namespace detail

inline nlohmann::json summary_to_json(const RunSummary &s)
{
    using detail::json_number;
    nlohmann::json j;
    j["tool_version"] = s.version;
    j["exit_code"] = s.exit_code;
    j["warnings"] = s.warnings;
    const RadarDerivations &d = s.radar;
    j["radar"] = {{"range_resolution_m", d.range_resolution_m},
                  {"max_unambiguous_velocity_mps", d.max_unambiguous_velocity_mps},
                  {"velocity_resolution_mps", d.velocity_resolution_mps},
                  {"listening_window_range_m", d.listening_window_range_m},
                  {"pri_range_m", d.pri_range_m},
                  {"samples_per_pri", d.samples_per_pri},
                  {"packets_per_cpi", d.packets_per_cpi},
                  {"listed", {{"range_resolution_m", RadarDerivations::listed_range_resolution_m},
                              {"max_unambiguous_velocity_mps", RadarDerivations::listed_max_velocity_mps},
                              {"velocity_resolution_mps", RadarDerivations::listed_velocity_resolution_mps},
                              {"max_unambiguous_range_m", RadarDerivations::listed_max_range_m}}},
                  {"discrepancies", d.discrepancies}};
    nlohmann::json waves = nlohmann::json::array();
    for (const WaveformResult &w : s.waveforms)
    {
        nlohmann::json e;
        e["waveform"] = std::string(to_string(w.kind));
        e["detection"] = w.detection ? detail::to_json(*w.detection) : nlohmann::json(nullptr);
        e["pslr_db"] = json_number(w.pslr_db);
        e["error"] = w.error.empty() ? nlohmann::json(nullptr) : nlohmann::json(w.error);
        e["timing"] = {{"synthesis_s", w.synthesis_s}, {"rsp_s", w.rsp_s},
                       {"oracle_s", w.oracle_s ? nlohmann::json(*w.oracle_s) : nlohmann::json(nullptr)}};
        e["oracle_max_relative_deviation"] =
            w.oracle_deviation ? nlohmann::json(*w.oracle_deviation) : nlohmann::json(nullptr);
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : w.fixed_point)
            rows.push_back(detail::to_json(r));
        e["fixed_point"] = rows;
        e["artifacts"] = w.artifacts;
        waves.push_back(e);
    }
    j["waveforms"] = waves;
    if (s.benchmarks)
    {
        nlohmann::json b;
        b["waveform"] = s.benchmarks->waveform;
        nlohmann::json rows = nlohmann::json::array();
        for (const auto &r : s.benchmarks->rows)
            rows.push_back({{"name", r.name}, {"timing", detail::to_json(r.timing)}});
        b["rows"] = rows;
        nlohmann::json ratios = nlohmann::json::object();
        for (const auto &[name, v] : s.benchmarks->ratios)
            ratios[name] = v;
        b["ratios"] = ratios;
        b["notices"] = s.benchmarks->notices;
        j["benchmarks"] = b;
    }
    j["artifacts"] = s.artifacts;
    j["config"] = s.config_echo;
    return j;
}

// ----- Benchmarks ------------------------------------------------------------------------

/// Median-of-k timings of the FFT path, the time-domain oracle (when under
/// its guard) and the fixed-point chain per configured format. Ratios are
/// oracle/FFT and fixed/double.
inline BenchmarkTable run_benchmarks(const ScenarioConfig &config)
{
    BenchmarkTable table;
    if (!config.benchmark_enabled)
        return table;

    const ScheduleKind kind = config.waveforms.front();
    table.waveform = std::string(to_string(kind));
    const FrameSchedule schedule = build_schedule(kind, config.radar, config.code_seed);
    const std::vector<TargetModel> targets = config.build_targets();
    EchoOptions echo;
    echo.path_loss = config.path_loss;
    echo.range_guard = config.range_guard;
    echo.snr_db = config.snr_db;
    echo.noise_seed = config.noise_seed;
    if (targets.empty())
        echo.snr_db.reset();
    const DataCube cube = synthesize_echo(schedule, targets, config.radar, echo);
    const ReferenceBank bank = build_reference_bank(schedule);
    const DopplerGrid grid = config.doppler_grid();
    const auto repeats = config.benchmark_repeats;
    const auto warmup = config.benchmark_warmup;

    const TimingStats fft_path =
        time_median([&] { (void)matched_filter_rd(cube, bank, grid, config.steering); }, repeats, warmup);
    table.rows.push_back({"fft_path", fft_path});

    const std::size_t work = cube.fast_time * cube.slow_time * grid.size();
    if (work <= config.oracle_limit)
    {
        const TimingStats oracle =
            time_median([&] { (void)time_domain_oracle(cube, schedule, grid, config.oracle_limit); }, repeats, warmup);
        table.rows.push_back({"time_domain_oracle", oracle});
        table.ratios.emplace_back("oracle_over_fft", oracle.median_s / fft_path.median_s);
    }
    else
    {
        table.notices.push_back("oracle guard exceeded (Q*P*J = " + std::to_string(work) + " > " +
                                std::to_string(config.oracle_limit) + "); benchmark restricted to FFT paths");
    }

    if (targets.empty())
    {
        table.notices.push_back("scene has no targets; fixed-point timings skipped");
        return table;
    }
    for (const auto &format : config.formats)
    {
        const TimingStats fixed = time_median(
            [&] {
                (void)fxp::quantized_matched_filter(cube, bank, grid, format, config.fixed_point_mode,
                                                    config.mainlobe_halfwidth, config.steering);
            },
            repeats, warmup);
        table.rows.push_back({"fixed_" + format.to_string(), fixed});
        table.ratios.emplace_back("fixed_" + format.to_string() + "_over_fft", fixed.median_s / fft_path.median_s);
    }
    return table;
}

// ----- Comparison run -------------------------------------------------------------------

/// Runs every configured waveform and writes rd_<kind>.csv, profile_<kind>.csv
/// and summary.json into `out_dir`. Scenario errors propagate; a waveform
/// without detection is recorded and turns the exit code into partial failure.
inline RunSummary run_comparison(const ScenarioConfig &config, const std::filesystem::path &out_dir)
{
    RunSummary summary;
    summary.config_echo = serialize_config(config);
    summary.warnings = config.warnings;
    summary.radar = derive_radar_quantities(config.radar);
    std::filesystem::create_directories(out_dir);

    const std::vector<TargetModel> targets = config.build_targets();
    const DopplerGrid grid = config.doppler_grid();
    EchoOptions echo;
    echo.path_loss = config.path_loss;
    echo.range_guard = config.range_guard;
    echo.snr_db = config.snr_db;
    echo.noise_seed = config.noise_seed;
    if (targets.empty() && echo.snr_db)
    {
        summary.warnings.push_back("snr_db ignored: the scene has no targets to reference it to");
        echo.snr_db.reset();
    }

    for (ScheduleKind kind : config.waveforms)
    {
        WaveformResult result;
        result.kind = kind;
        const FrameSchedule schedule = build_schedule(kind, config.radar, config.code_seed);
        DataCube cube;
        result.synthesis_s = time_once([&] { cube = synthesize_echo(schedule, targets, config.radar, echo); });
        const ReferenceBank bank = build_reference_bank(schedule);
        RangeDopplerMap map;
        result.rsp_s = time_once([&] { map = matched_filter_rd(cube, bank, grid, config.steering); });

        const std::string name(to_string(kind));
        const auto rd_path = out_dir / ("rd_" + name + ".csv");
        write_rd_csv(rd_path, map);
        result.artifacts.push_back(rd_path.filename().string());

        if (config.run_oracle)
        {
            try
            {
                RangeDopplerMap oracle;
                result.oracle_s =
                    time_once([&] { oracle = time_domain_oracle(cube, schedule, grid, config.oracle_limit); });
                result.oracle_deviation = max_relative_deviation(map, oracle);
            }
            catch (const RefusalError &e)
            {
                summary.warnings.push_back(name + ": " + e.what());
            }
        }

        try
        {
            const Detection det = detect_peak(map);
            result.detection = det;
            const auto profile = map.row(det.doppler_bin);
            try
            {
                result.pslr_db = pslr_db(profile, config.mainlobe_halfwidth);
            }
            catch (const ParameterError &e)
            {
                summary.warnings.push_back(name + ": PSLR not measurable: " + e.what());
            }
            const auto profile_path = out_dir / ("profile_" + name + ".csv");
            write_profile_csv(profile_path, map, det.doppler_bin);
            result.artifacts.push_back(profile_path.filename().string());

            if (config.fixed_point_enabled)
                result.fixed_point = fxp::precision_sweep(cube, bank, grid, config.formats, config.fixed_point_mode,
                                                          config.mainlobe_halfwidth);
        }
        catch (const NoDetectionError &e)
        {
            result.error = e.what();
            summary.exit_code = exit_partial_failure;
        }
        for (const auto &a : result.artifacts)
            summary.artifacts.push_back(a);
        summary.waveforms.push_back(std::move(result));
    }

    if (config.benchmark_enabled)
        summary.benchmarks = run_benchmarks(config);

    summary.artifacts.push_back("summary.json");
    std::ofstream out(out_dir / "summary.json", std::ios::binary);
    if (!out)
        throw Error("cannot write summary.json");
    out << summary_to_json(summary).dump(2) << '\n';
    return summary;
}

} // namespace isac
