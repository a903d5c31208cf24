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

#include <catch2/catch_amalgamated.hpp>

#include "isac/harness.hpp"

#include <cstdlib>
#include <sstream>

namespace fs = std::filesystem;

namespace
{

fs::path scratch(const std::string &name)
{
    const fs::path dir = fs::temp_directory_path() / ("isac_harness_" + name);
    fs::remove_all(dir);
    return dir;
}

std::string slurp(const fs::path &path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

isac::ScenarioConfig point_scene()
{
    return isac::parse_config(R"([radar]
cpi_s = 128e-6
path_loss = off
[target]
type = point
position = 12, 9, 0
speed = 2
)");
}

struct ThreadsGuard
{
    explicit ThreadsGuard(const char *value) { ::setenv("ISAC_THREADS", value, 1); }
    ~ThreadsGuard() { ::unsetenv("ISAC_THREADS"); }
};

} // namespace

TEST_CASE("derived radar quantities", "[harness]")
{
    const auto d = isac::derive_radar_quantities(isac::WaveformParams::table1());
    const double c = 299792458.0;
    const double lambda = c / 60e9;
    CHECK(d.range_resolution_m == Catch::Approx(c / (2 * 1.76e9)));
    CHECK(d.max_unambiguous_velocity_mps == Catch::Approx(lambda / (4 * 2e-6)));
    CHECK(d.velocity_resolution_mps == Catch::Approx(lambda / (2 * 4e-3)));
    CHECK(d.listening_window_range_m == Catch::Approx(c * 512 / 1.76e9 / 2));
    CHECK(d.pri_range_m == Catch::Approx(c * 2e-6 / 2));
    CHECK(d.samples_per_pri == 3520);
    CHECK(d.packets_per_cpi == 2000);
    REQUIRE(d.discrepancies.size() == 2);
    CHECK_THAT(d.discrepancies[0], Catch::Matchers::ContainsSubstring("0.625"));
    CHECK(isac::format_sig(624.6, 3) == "625");
}

TEST_CASE("comparison run writes every artifact", "[harness]")
{
    const auto out = scratch("artifacts");
    const auto summary = isac::run_comparison(point_scene(), out);
    CHECK(summary.exit_code == isac::exit_success);
    REQUIRE(summary.waveforms.size() == 4);
    for (const auto &w : summary.waveforms)
    {
        INFO(isac::to_string(w.kind));
        REQUIRE(w.detection);
        CHECK(w.detection->range_bin == 176);
        CHECK(w.detection->doppler_bin == 32);
        CHECK(w.pslr_db > 15.0);
        const std::string name(isac::to_string(w.kind));
        CHECK(fs::exists(out / ("rd_" + name + ".csv")));
        CHECK(fs::exists(out / ("profile_" + name + ".csv")));
    }

    const auto json = nlohmann::json::parse(slurp(out / "summary.json"));
    CHECK(json["tool_version"] == isac::tool_version);
    CHECK(json["waveforms"].size() == 4);
    CHECK(json["radar"]["samples_per_pri"] == 3520);
    CHECK(json["waveforms"][3]["waveform"] == "golay_dr");

    // rd CSV shape: two header lines then J rows of Q values
    std::istringstream rd(slurp(out / "rd_fmcw.csv"));
    std::string line;
    std::size_t rows = 0;
    std::getline(rd, line);
    CHECK(line.rfind("# range_m,0,", 0) == 0);
    std::getline(rd, line);
    CHECK(line.rfind("# velocity_mps,", 0) == 0);
    while (std::getline(rd, line))
    {
        ++rows;
        REQUIRE(static_cast<std::size_t>(std::count(line.begin(), line.end(), ',')) == 3519);
    }
    CHECK(rows == 64);
}

TEST_CASE("artifacts are reproducible across runs and thread counts", "[harness]")
{
    auto cfg = point_scene();
    cfg.snr_db = 0.0;
    const auto a = scratch("repro_a");
    const auto b = scratch("repro_b");
    {
        ThreadsGuard g("1");
        (void)isac::run_comparison(cfg, a);
    }
    {
        ThreadsGuard g("3");
        (void)isac::run_comparison(cfg, b);
    }
    for (const auto *kind : {"fmcw", "pmcw", "golay_standard", "golay_dr"})
    {
        INFO(kind);
        CHECK(slurp(a / (std::string("rd_") + kind + ".csv")) == slurp(b / (std::string("rd_") + kind + ".csv")));
        CHECK(slurp(a / (std::string("profile_") + kind + ".csv")) ==
              slurp(b / (std::string("profile_") + kind + ".csv")));
    }
}

TEST_CASE("a scene without targets is a partial failure", "[harness]")
{
    auto cfg = isac::parse_config("[radar]\ncpi_s = 128e-6\n[noise]\nsnr_db = 10\n");
    const auto summary = isac::run_comparison(cfg, scratch("empty"));
    CHECK(summary.exit_code == isac::exit_partial_failure);
    for (const auto &w : summary.waveforms)
    {
        CHECK_FALSE(w.detection);
        CHECK_FALSE(w.error.empty());
    }
    CHECK_FALSE(summary.warnings.empty());
}

TEST_CASE("scenario errors propagate", "[harness]")
{
    auto cfg = point_scene();
    std::get<isac::PointTargetSpec>(cfg.targets[0]).position_m = {60.0, 0.0, 0.0};
    CHECK_THROWS_AS(isac::run_comparison(cfg, scratch("far")), isac::ScenarioError);
}

TEST_CASE("fixed-point sweep and oracle feed the summary", "[harness]")
{
    auto cfg = point_scene();
    cfg.waveforms = {isac::ScheduleKind::golay_doppler_resilient};
    cfg.fixed_point_enabled = true;
    cfg.run_oracle = true;
    const auto summary = isac::run_comparison(cfg, scratch("fxp"));
    REQUIRE(summary.waveforms.size() == 1);
    const auto &w = summary.waveforms[0];
    REQUIRE(w.fixed_point.size() == 3);
    CHECK(w.fixed_point[0].sqnr_db < w.fixed_point[1].sqnr_db);
    for (const auto &row : w.fixed_point)
        CHECK(row.peak_agree);
    REQUIRE(w.oracle_deviation);
    CHECK(*w.oracle_deviation < 1e-9);
}

TEST_CASE("benchmarks", "[harness][bench]")
{
    auto cfg = point_scene();
    CHECK(isac::run_benchmarks(cfg).rows.empty());

    cfg.benchmark_enabled = true;
    cfg.benchmark_repeats = 1;
    cfg.benchmark_warmup = 0;
    cfg.formats = {{24, 1}};
    const auto table = isac::run_benchmarks(cfg);
    REQUIRE(table.rows.size() == 3);
    CHECK(table.rows[0].name == "fft_path");
    CHECK(table.rows[1].name == "time_domain_oracle");
    CHECK(table.rows[2].name == "fixed_24:1");
    REQUIRE(table.ratios.size() == 2);
    CHECK(table.ratios[0].first == "oracle_over_fft");
    CHECK(table.ratios[0].second > 1.0);

    cfg.oracle_limit = 1000;
    const auto guarded = isac::run_benchmarks(cfg);
    REQUIRE(guarded.notices.size() == 1);
    CHECK_THAT(guarded.notices[0], Catch::Matchers::ContainsSubstring("oracle guard"));
}
