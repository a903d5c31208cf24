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

// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include "isac/isac.hpp"
#include "support/oracles.hpp"

#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#ifndef ISAC_SOURCE_DIR
#define ISAC_SOURCE_DIR "."
#endif

namespace fs = std::filesystem;

namespace
{

struct Outcome
{
    bool pass = false;
    std::string detail;
};

std::string fmt(const char *format, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

std::string slurp(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const isac::Vec3 scene_position{12.0, 9.0, 0.0};
const isac::Vec3 scene_velocity{1.6, 1.2, 0.0}; // 2 m/s radial

struct Run
{
    isac::RangeDopplerMap map;
    isac::Detection detection;
    double pslr_db = 0.0;
};

Run run_point_scene(isac::ScheduleKind kind, const isac::WaveformParams &params, const isac::Vec3 &velocity)
{
    const auto schedule = isac::build_schedule(kind, params, 7);
    const auto cube = isac::synthesize_echo(schedule, {isac::make_point_target(scene_position, velocity)}, params);
    const auto bank = isac::build_reference_bank(schedule);
    Run r;
    r.map = isac::matched_filter_rd(cube, bank, isac::DopplerGrid::for_params(params));
    r.detection = isac::detect_peak(r.map);
    r.pslr_db = isac::pslr_db(r.map.row(r.detection.doppler_bin));
    return r;
}

// ----- criteria -------------------------------------------------------------------

Outcome golay_identity()
{
    bool ok = true;
    const double seconds = isac::time_once([&] {
        for (int n = 1; n <= 9; ++n)
        {
            const auto pair = isac::golay_pair(n);
            const auto ra = oracle::autocorrelation(pair.a);
            const auto rb = oracle::autocorrelation(pair.b);
            const long long len = static_cast<long long>(pair.a.size());
            for (std::size_t k = 0; k < ra.size(); ++k)
                ok = ok && ra[k] + rb[k] == (k == 0 ? 2 * len : 0);
        }
    });
    return {ok && seconds < 1.0, fmt("N = 2..512 exact: %s, %.3f s (< 1 s)", ok ? "yes" : "no", seconds)};
}

Outcome oracle_equivalence()
{
    auto engine = isac::make_engine(2024, 0xAC2);
    auto uniform = [&](double lo, double hi) { return lo + (hi - lo) * isac::uniform01(engine); };
    auto pick = [&](std::size_t lo, std::size_t hi) {
        return lo + static_cast<std::size_t>(isac::uniform01(engine) * static_cast<double>(hi - lo + 1));
    };

    double worst = 0.0;
    const double seconds = isac::time_once([&] {
        for (int trial = 0; trial < 20; ++trial)
        {
            isac::WaveformParams p;
            const std::size_t q = pick(64, 512);
            p.pri_s = 2e-6;
            p.bandwidth_hz = static_cast<double>(q) / p.pri_s;
            const std::size_t packets = pick(1, 64);
            p.cpi_s = static_cast<double>(packets) * p.pri_s;
            std::size_t n = 1;
            while (2 * n <= q && n < 256)
                n *= 2;
            p.code_length = n;
            const auto kind = isac::all_schedule_kinds[pick(0, 3)];
            const auto schedule = isac::build_schedule(kind, p, static_cast<std::uint64_t>(trial));

            const double r_max = p.listening_window_range_m();
            const double v_max = p.max_unambiguous_velocity_mps();
            std::vector<isac::TargetModel> scene;
            const std::size_t count = pick(1, 4);
            for (std::size_t s = 0; s < count; ++s)
            {
                const double r = uniform(0.05, 0.95) * r_max;
                const double az = uniform(-1.2, 1.2);
                const isac::Vec3 pos{r * std::cos(az), r * std::sin(az), 0.0};
                const bool moving = isac::uniform01(engine) < 0.6;
                const isac::Vec3 vel = moving ? isac::Vec3{uniform(-0.6, 0.6) * v_max, uniform(-0.3, 0.3) * v_max, 0.0}
                                              : isac::Vec3{};
                scene.push_back(isac::make_point_target(pos, vel, uniform(-10.0, 10.0)));
            }
            isac::EchoOptions echo;
            if (isac::uniform01(engine) < 0.5)
                echo.snr_db = uniform(-10.0, 20.0);
            echo.noise_seed = static_cast<std::uint64_t>(trial);
            const auto cube = isac::synthesize_echo(schedule, scene, p, echo);
            const auto bank = isac::build_reference_bank(schedule);
            const bool aligned = isac::uniform01(engine) < 0.5 && packets <= 65;
            const auto grid =
                aligned ? isac::DopplerGrid::for_params(p) : isac::DopplerGrid::uniform(pick(1, 65), p.pri_s);
            const auto fast = isac::matched_filter_rd(cube, bank, grid);
            const auto slow = isac::time_domain_oracle(cube, schedule, grid);
            worst = std::max(worst, isac::max_relative_deviation(fast, slow));
        }
    });
    return {worst < 1e-6 && seconds < 60.0,
            fmt("20 scenes, max relative deviation %.2e (< 1e-6), %.2f s (< 60 s)", worst, seconds)};
}

Outcome localization()
{
    const auto p = isac::WaveformParams::ci();
    const auto grid = isac::DopplerGrid::for_params(p);
    // Doppler bin nearest to the 2 m/s mover
    const double f_d = isac::doppler_hz(p, 2.0);
    std::size_t expected_j = 0;
    for (std::size_t j = 1; j < grid.size(); ++j)
        if (std::abs(grid.frequencies_hz[j] - f_d) < std::abs(grid.frequencies_hz[expected_j] - f_d))
            expected_j = j;

    bool ok = true;
    std::string detail;
    const double seconds = isac::time_once([&] {
        for (auto kind : isac::all_schedule_kinds)
        {
            const Run r = run_point_scene(kind, p, scene_velocity);
            const auto dq = static_cast<long>(r.detection.range_bin) - 176;
            const auto dj = static_cast<long>(r.detection.doppler_bin) - static_cast<long>(expected_j);
            ok = ok && std::labs(dq) <= 1 && std::labs(dj) <= 1;
            detail += fmt("%s (%zu,%zu) ", std::string(isac::to_string(kind)).c_str(), r.detection.range_bin,
                          r.detection.doppler_bin);
        }
    });
    return {ok && seconds < 30.0,
            detail + fmt("vs (176,%zu) +/-1, f_D = %.1f Hz, %.2f s (< 30 s)", expected_j, f_d, seconds)};
}

Outcome pslr_values()
{
    auto check = [](const isac::WaveformParams &p, std::string &detail) {
        double v[4];
        for (int i = 0; i < 4; ++i)
            v[i] = run_point_scene(isac::all_schedule_kinds[i], p, scene_velocity).pslr_db;
        const bool values = std::abs(v[0] - 8.0) <= 3.0 && std::abs(v[1] - 13.0) <= 3.0 &&
                            std::abs(v[2] - 43.0) <= 5.0 && v[3] >= v[2];
        const bool order = v[0] < v[1] && v[1] < v[2] && v[2] <= v[3];
        detail += fmt("P=%zu: fmcw %.2f (8+/-3), pmcw %.2f (13+/-3), golay_standard %.2f (43+/-5), golay_dr %.2f dB, "
                      "ordering %s; ",
                      p.packets_per_cpi(), v[0], v[1], v[2], v[3], order ? "holds" : "violated");
        return values && order;
    };
    std::string detail;
    const bool table1 = check(isac::WaveformParams::table1(), detail);
    const bool ci = check(isac::WaveformParams::ci(), detail);
    return {table1 && ci, detail};
}

Outcome doppler_resilience()
{
    const auto p = isac::WaveformParams::ci();
    const double dr = run_point_scene(isac::ScheduleKind::golay_doppler_resilient, p, scene_velocity).pslr_db;
    const double st = run_point_scene(isac::ScheduleKind::golay_standard, p, scene_velocity).pslr_db;
    return {dr >= 60.0 && dr - st >= 5.0,
            fmt("golay_dr sidelobes -%.2f dB (<= -60), golay_standard -%.2f dB, gap %.2f dB (>= 5)", dr, st, dr - st)};
}

Outcome static_complementarity()
{
    const auto p = isac::WaveformParams::ci();
    const double dr = run_point_scene(isac::ScheduleKind::golay_doppler_resilient, p, {}).pslr_db;
    const double st = run_point_scene(isac::ScheduleKind::golay_standard, p, {}).pslr_db;
    return {dr >= 250.0 && st >= 250.0,
            fmt("static sidelobes: golay_standard -%.2f dB, golay_dr -%.2f dB (<= -250)", st, dr)};
}

Outcome fixed_point()
{
    // PSLR above the format's dynamic range 20 log10(2^(W-1)) is the double
    // chain's roundoff floor; there the fixed PSLR must clear that range too.
    const auto p = isac::WaveformParams::ci();
    const auto grid = isac::DopplerGrid::for_params(p);
    const std::vector<isac::fxp::FixedPointFormat> formats{{16, 1}, {24, 1}, {32, 1}};
    bool ok = true;
    std::string detail;
    for (auto kind : isac::all_schedule_kinds)
    {
        const auto schedule = isac::build_schedule(kind, p, 7);
        const auto cube =
            isac::synthesize_echo(schedule, {isac::make_point_target(scene_position, scene_velocity)}, p);
        const auto bank = isac::build_reference_bank(schedule);
        const auto rows = isac::fxp::precision_sweep(cube, bank, grid, formats);
        const auto &r24 = rows[1].report;
        const double range_db = 20.0 * std::log10(std::ldexp(1.0, r24.format.word_bits - 1));
        const bool same_bin = r24.fixed_peak.range_bin == r24.double_peak.range_bin;
        const bool pslr_ok = r24.pslr_double_db <= range_db ? std::abs(r24.pslr_delta_db) <= 0.5
                                                            : r24.pslr_fixed_db >= range_db;
        const bool sweep_ok = isac::fxp::sqnr_non_decreasing(rows, 0.0);
        ok = ok && same_bin && pslr_ok && sweep_ok;
        detail += fmt("%s: bin %s, pslr %.2f/%.2f dB, sqnr %.1f/%.1f/%.1f dB; ",
                      std::string(isac::to_string(kind)).c_str(), same_bin ? "same" : "differs", r24.pslr_double_db,
                      r24.pslr_fixed_db, rows[0].sqnr_db, rows[1].sqnr_db, rows[2].sqnr_db);
    }
    return {ok, detail};
}

Outcome table_derivations()
{
    const auto d = isac::derive_radar_quantities(isac::WaveformParams::table1());
    const std::string res = isac::format_sig(d.range_resolution_m, 3);
    const std::string vmax = isac::format_sig(d.max_unambiguous_velocity_mps, 3);

    // the discrepancies must reach the run summary
    auto cfg = isac::parse_config("[radar]\ncpi_s = 128e-6\n[waveforms]\nkinds = fmcw\n[target]\ntype = point\n");
    const fs::path out = fs::temp_directory_path() / "isac_acceptance_ac8";
    fs::remove_all(out);
    (void)isac::run_comparison(cfg, out);
    const auto json = nlohmann::json::parse(slurp(out / "summary.json"));
    const auto expected = isac::derive_radar_quantities(cfg.radar).discrepancies;
    const auto &listed = json["radar"]["discrepancies"];
    bool reported = listed.size() == expected.size();
    for (std::size_t i = 0; reported && i < expected.size(); ++i)
        reported = listed[i] == expected[i] && listed[i].get<std::string>().find("listed") != std::string::npos;
    const bool mentions = d.discrepancies.size() == 2 &&
                          d.discrepancies[0].find("listed 0.3 m/s") != std::string::npos &&
                          d.discrepancies[0].find("0.625 m/s") != std::string::npos &&
                          d.discrepancies[1].find("listed 44 m") != std::string::npos &&
                          d.discrepancies[1].find("43.6 m") != std::string::npos;
    return {res == "0.0852" && vmax == "625" && reported && mentions,
            fmt("range resolution %s m (0.0852), max velocity %s m/s (625), discrepancies in summary: %s", res.c_str(),
                vmax.c_str(), reported && mentions ? "yes" : "no")};
}

Outcome determinism()
{
    bool identical = true;
    std::size_t files = 0;
    for (const char *name : {"point_target.ini", "pedestrian.ini", "car.ini"})
    {
        auto cfg = isac::parse_config(slurp(fs::path(ISAC_SOURCE_DIR) / "configs" / name));
        cfg.benchmark_enabled = false;
        cfg.fixed_point_enabled = false;
        const fs::path a = fs::temp_directory_path() / "isac_acceptance_ac9a";
        const fs::path b = fs::temp_directory_path() / "isac_acceptance_ac9b";
        fs::remove_all(a);
        fs::remove_all(b);
        (void)isac::run_comparison(cfg, a);
        (void)isac::run_comparison(cfg, b);
        for (const auto &entry : fs::directory_iterator(a))
        {
            if (entry.path().extension() != ".csv")
                continue;
            ++files;
            identical = identical && slurp(entry.path()) == slurp(b / entry.path().filename());
        }
    }
    return {identical && files > 0, fmt("%zu CSV files compared across repeated runs: %s", files,
                                        identical ? "byte-identical" : "differ")};
}

} // namespace

int main()
{
    const std::vector<std::pair<const char *, std::function<Outcome()>>> criteria{
        {"AC1 golay identity", golay_identity},
        {"AC2 oracle equivalence", oracle_equivalence},
        {"AC3 localization", localization},
        {"AC4 pslr values", pslr_values},
        {"AC5 doppler resilience", doppler_resilience},
        {"AC6 static complementarity", static_complementarity},
        {"AC7 fixed point", fixed_point},
        {"AC8 table derivations", table_derivations},
        {"AC9 determinism", determinism},
    };
    int failures = 0;
    for (const auto &[name, check] : criteria)
    {
        Outcome o;
        try
        {
            o = check();
        }
        catch (const std::exception &e)
        {
            o = {false, std::string("exception: ") + e.what()};
        }
        failures += o.pass ? 0 : 1;
        std::printf("%s %s: %s\n", o.pass ? "PASS" : "FAIL", name, o.detail.c_str());
        std::fflush(stdout);
    }
    std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
    return failures == 0 ? 0 : 1;
}
