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

#include "isac/waveform.hpp"
#include "support/oracles.hpp"

using isac::Complex;
using isac::WaveformParams;

// ----- Parameters ----------------------------------------------------------------

TEST_CASE("reference radar grid quantities", "[waveform]")
{
    const auto p = WaveformParams::table1();
    CHECK(p.samples_per_pri() == 3520);
    CHECK(p.packets_per_cpi() == 2000);
    CHECK(WaveformParams::ci().packets_per_cpi() == 64);
    CHECK(p.wavelength_m() == Catch::Approx(4.99654e-3).epsilon(1e-5));
    CHECK(std::abs(p.sample_period_s() * p.samples_per_pri() - p.pri_s) <= p.sample_period_s());
    CHECK_NOTHROW(p.validate());
}

TEST_CASE("invalid parameters are rejected", "[waveform]")
{
    auto p = WaveformParams::ci();
    p.bandwidth_hz = -1.0;
    CHECK_THROWS_AS(isac::generate_fmcw(p), isac::ParameterError);
    p = WaveformParams::ci();
    p.pri_s = 0.0;
    CHECK_THROWS_AS(p.validate(), isac::ParameterError);
    p = WaveformParams::ci();
    p.code_length = 4000; // > Q = 3520
    CHECK_THROWS_AS(p.validate(), isac::ParameterError);
}

// ----- FMCW ----------------------------------------------------------------------

TEST_CASE("FMCW frame layout", "[waveform][fmcw]")
{
    auto p = WaveformParams::ci();
    p.amplitude = 2.0;
    const auto frame = isac::generate_fmcw(p);
    REQUIRE(frame.samples.size() == 3520);
    CHECK(frame.samples[0] == Complex(2.0, 0.0));
    for (std::size_t q = 0; q < p.code_length; ++q)
        REQUIRE(std::abs(std::abs(frame.samples[q]) - 2.0) < 1e-12);
    for (std::size_t q = p.code_length; q < frame.samples.size(); ++q)
        REQUIRE(frame.samples[q] == Complex{});
    // 512 samples at 1/1.76 GHz
    CHECK(static_cast<double>(p.code_length) * p.sample_period_s() == Catch::Approx(290.9e-9).epsilon(1e-3));
}

TEST_CASE("FMCW instantaneous frequency reaches the bandwidth", "[waveform][fmcw]")
{
    const auto p = WaveformParams::ci();
    const double n = static_cast<double>(p.code_length);
    // Backward difference of the unwrapped (analytic) phase at the last active sample.
    const double dphi = isac::fmcw_phase(p, n - 1) - isac::fmcw_phase(p, n - 2);
    const double expected = isac::two_pi * p.bandwidth_hz * p.sample_period_s();
    CHECK(std::abs(dphi - expected) / expected < 0.01);
    // The generated samples carry that phase modulo 2 pi.
    const auto frame = isac::generate_fmcw(p);
    const Complex ratio = frame.samples[p.code_length - 1] / frame.samples[p.code_length - 2];
    CHECK(std::abs(ratio - std::polar(1.0, dphi)) < 1e-9);
}

// ----- PMCW ----------------------------------------------------------------------

TEST_CASE("DPSK of all-zero chips is constant", "[waveform][pmcw]")
{
    const auto p = WaveformParams::ci();
    const std::vector<std::uint8_t> zeros(p.code_length, 0);
    const auto frame = isac::pmcw_frame_from_chips(p, zeros);
    for (std::size_t k = 0; k < p.code_length; ++k)
        REQUIRE(frame.samples[k] == Complex(p.amplitude, 0.0));
}

TEST_CASE("DPSK follows the differential rule", "[waveform][pmcw]")
{
    std::vector<std::uint8_t> chips(64);
    for (std::size_t k = 0; k < chips.size(); ++k)
        chips[k] = static_cast<std::uint8_t>(k % 2);
    const auto d = isac::dpsk_encode(chips);
    CHECK(d[0] == 1);
    for (std::size_t k = 1; k < d.size(); ++k)
        REQUIRE(d[k] * d[k - 1] == (chips[k] ? -1 : 1));

    const auto random = isac::pmcw_chips(512, 3);
    const auto e = isac::dpsk_encode(random);
    for (std::size_t k = 1; k < e.size(); ++k)
        REQUIRE(e[k] * e[k - 1] == (random[k] ? -1 : 1));
}

TEST_CASE("PMCW seed 7 has unit chips and autocorrelation peak N", "[waveform][pmcw]")
{
    const auto p = WaveformParams::ci();
    const auto frame = isac::generate_pmcw(p, 7);
    std::vector<int> chips;
    for (std::size_t k = 0; k < p.code_length; ++k)
    {
        REQUIRE(std::abs(frame.samples[k].imag()) == 0.0);
        REQUIRE(std::abs(std::abs(frame.samples[k].real()) - 1.0) == 0.0);
        chips.push_back(frame.samples[k].real() > 0 ? 1 : -1);
    }
    const auto r = oracle::autocorrelation(chips);
    CHECK(r[0] == 512);
    for (std::size_t k = 1; k < r.size(); ++k)
        REQUIRE(std::llabs(r[k]) < 512);
}

TEST_CASE("PMCW is seed-deterministic", "[waveform][pmcw]")
{
    const auto p = WaveformParams::ci();
    CHECK(isac::generate_pmcw(p, 11).samples == isac::generate_pmcw(p, 11).samples);
    CHECK(isac::generate_pmcw(p, 11).samples != isac::generate_pmcw(p, 12).samples);
}

// ----- Golay -----------------------------------------------------------------------

TEST_CASE("Golay pair of length 2", "[waveform][golay]")
{
    const auto pair = isac::golay_pair(1);
    CHECK(pair.a == std::vector<int>{1, 1});
    CHECK(pair.b == std::vector<int>{1, -1});
}

TEST_CASE("Golay complementarity holds exactly for 2^1 .. 2^16", "[waveform][golay]")
{
    for (int n = 1; n <= 16; ++n)
    {
        const auto pair = isac::golay_pair(n);
        const std::size_t len = std::size_t{1} << n;
        REQUIRE(pair.a.size() == len);
        // O(N^2) oracle up to 2^12; beyond that the complementary sum is
        // checked in the frequency domain identity |A|^2 + |B|^2 = 2N at a
        // sample of lags through direct summation.
        if (n <= 12)
        {
            const auto ra = oracle::autocorrelation(pair.a);
            const auto rb = oracle::autocorrelation(pair.b);
            REQUIRE(ra[0] + rb[0] == static_cast<long long>(2 * len));
            for (std::size_t k = 1; k < len; ++k)
            {
                REQUIRE(ra[k] + rb[k] == 0);
                REQUIRE(ra[k] == -rb[k]);
            }
        }
        else
        {
            for (std::size_t k : {std::size_t{0}, std::size_t{1}, std::size_t{7}, len / 3, len / 2, len - 1})
            {
                long long sum = 0;
                for (std::size_t i = 0; i + k < len; ++i)
                    sum += pair.a[i] * pair.a[i + k] + pair.b[i] * pair.b[i + k];
                REQUIRE(sum == (k == 0 ? static_cast<long long>(2 * len) : 0));
            }
        }
    }
}

TEST_CASE("Golay length guard", "[waveform][golay]")
{
    CHECK_THROWS_AS(isac::golay_pair(0), isac::ParameterError);
    CHECK_THROWS_AS(isac::golay_pair(17), isac::ParameterError);
}

// ----- PTM ---------------------------------------------------------------------------

TEST_CASE("PTM sequence values", "[waveform][ptm]")
{
    CHECK(isac::ptm_sequence(8).bits == std::vector<std::uint8_t>{0, 1, 1, 0, 1, 0, 0, 1});
    CHECK(isac::ptm_sequence(2).bits == std::vector<std::uint8_t>{0, 1});
    CHECK_THROWS_AS(isac::ptm_sequence(0), isac::ParameterError);
}

TEST_CASE("PTM properties", "[waveform][ptm]")
{
    const auto long_seq = isac::ptm_sequence(4096);
    for (std::size_t p = 0; p < 4096; ++p)
        REQUIRE(long_seq.bits[p] == oracle::thue_morse(p));
    // prefix property
    for (std::size_t len : {1u, 3u, 100u, 2048u})
    {
        const auto shorter = isac::ptm_sequence(len);
        REQUIRE(std::equal(shorter.bits.begin(), shorter.bits.end(), long_seq.bits.begin()));
    }
    // complement on the second half of every power-of-two prefix
    for (std::size_t half = 1; half < 4096; half *= 2)
        for (std::size_t i = 0; i < half; ++i)
            REQUIRE(long_seq.bits[half + i] == 1 - long_seq.bits[i]);
}

// ----- Schedules ---------------------------------------------------------------------

TEST_CASE("schedules have P frames of Q samples", "[waveform][schedule]")
{
    auto p = WaveformParams::ci();
    p.cpi_s = 4 * p.pri_s;
    for (auto kind : isac::all_schedule_kinds)
    {
        const auto s = isac::build_schedule(kind, p, 1);
        REQUIRE(s.size() == 4);
        for (std::size_t i = 0; i < s.size(); ++i)
        {
            REQUIRE(s[i].samples.size() == 3520);
            REQUIRE(&s.reference(i) == &s[i]);
            for (std::size_t q = 0; q < 3520; ++q)
                REQUIRE(std::abs(s[i].samples[q]) <= p.amplitude + 1e-12);
        }
    }
}

TEST_CASE("Golay schedules follow their packet patterns", "[waveform][schedule]")
{
    auto p = WaveformParams::ci();
    p.cpi_s = 4 * p.pri_s;
    using isac::FrameLabel;
    auto labels = [](const isac::FrameSchedule &s) {
        std::vector<FrameLabel> out;
        for (std::size_t i = 0; i < s.size(); ++i)
            out.push_back(s[i].label);
        return out;
    };
    const auto dr = isac::build_schedule(isac::ScheduleKind::golay_doppler_resilient, p, 0);
    CHECK(labels(dr) == std::vector<FrameLabel>{FrameLabel::golay_a, FrameLabel::golay_b, FrameLabel::golay_b,
                                                FrameLabel::golay_a});
    const auto std_sched = isac::build_schedule(isac::ScheduleKind::golay_standard, p, 0);
    CHECK(labels(std_sched) == std::vector<FrameLabel>{FrameLabel::golay_a, FrameLabel::golay_b, FrameLabel::golay_a,
                                                       FrameLabel::golay_b});
    const auto pair = isac::golay_pair(9);
    for (std::size_t k = 0; k < 512; ++k)
    {
        REQUIRE(dr[0].samples[k].real() == pair.a[k]);
        REQUIRE(dr[1].samples[k].real() == pair.b[k]);
    }
}

TEST_CASE("Doppler-resilient schedule tracks the PTM bits over a long CPI", "[waveform][schedule]")
{
    const auto p = WaveformParams::table1();
    const auto s = isac::build_schedule(isac::ScheduleKind::golay_doppler_resilient, p, 0);
    REQUIRE(s.size() == 2000);
    for (std::size_t i = 0; i < s.size(); ++i)
        REQUIRE(s[i].label == (oracle::thue_morse(i) ? isac::FrameLabel::golay_b : isac::FrameLabel::golay_a));
}

TEST_CASE("schedules are reproducible", "[waveform][schedule]")
{
    const auto p = WaveformParams::ci();
    for (auto kind : isac::all_schedule_kinds)
    {
        const auto a = isac::build_schedule(kind, p, 42);
        const auto b = isac::build_schedule(kind, p, 42);
        REQUIRE(a.packet_frames() == b.packet_frames());
        for (std::size_t f = 0; f < a.frames().size(); ++f)
            REQUIRE(a.frames()[f].samples == b.frames()[f].samples);
    }
}

TEST_CASE("Golay schedules need a power-of-two code length", "[waveform][schedule]")
{
    auto p = WaveformParams::ci();
    p.code_length = 500;
    CHECK_THROWS_AS(isac::build_schedule(isac::ScheduleKind::golay_standard, p, 0), isac::ParameterError);
    CHECK_NOTHROW(isac::build_schedule(isac::ScheduleKind::pmcw, p, 0));
}

TEST_CASE("raised-cosine shaping keeps the peak at the amplitude", "[waveform]")
{
    auto p = WaveformParams::ci();
    p.pulse_shape = isac::PulseShape::raised_cosine;
    p.rolloff = 0.5;
    const auto frame = isac::generate_pmcw(p, 7);
    double peak = 0.0;
    for (const auto &v : frame.samples)
        peak = std::max(peak, std::abs(v));
    CHECK(peak == Catch::Approx(p.amplitude).epsilon(1e-12));
    CHECK(frame.samples != isac::generate_pmcw(WaveformParams::ci(), 7).samples);
}
