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

// Discrete complex-baseband transmit frames for the four candidate
// waveforms and their per-packet schedules over one coherent processing
// interval. All signals are sampled at T_s = 1/BW; the carrier only enters
// through the wavelength.

#include "isac/common.hpp"
#include "isac/fft.hpp"

#include <bit>
#include <optional>
#include <string_view>

namespace isac
{

enum class PulseShape
{
    identity,
    raised_cosine,
};

struct WaveformParams
{
    double carrier_freq_hz = 60e9;
    double bandwidth_hz = 1.76e9;
    double pri_s = 2e-6;
    double cpi_s = 4e-3;
    std::size_t code_length = 512;
    double amplitude = 1.0;
    PulseShape pulse_shape = PulseShape::identity;
    double rolloff = 0.25;

    /// Radar parameters of the reference 60 GHz scenario (P = 2000).
    static WaveformParams table1() { return {}; }

    /// Same radar with a 64-packet CPI (128 us) for quick runs.
    static WaveformParams ci()
    {
        WaveformParams p;
        p.cpi_s = 64 * p.pri_s;
        return p;
    }

    double sample_period_s() const { return 1.0 / bandwidth_hz; }
    std::size_t samples_per_pri() const { return static_cast<std::size_t>(std::llround(pri_s * bandwidth_hz)); }
    std::size_t packets_per_cpi() const { return static_cast<std::size_t>(std::llround(cpi_s / pri_s)); }
    double wavelength_m() const { return speed_of_light / carrier_freq_hz; }

    double range_resolution_m() const { return speed_of_light / (2.0 * bandwidth_hz); }
    double max_unambiguous_velocity_mps() const { return wavelength_m() / (4.0 * pri_s); }
    double velocity_resolution_mps() const
    {
        return wavelength_m() / (2.0 * static_cast<double>(packets_per_cpi()) * pri_s);
    }
    /// Range covered by the active code window, c * N * T_s / 2.
    double listening_window_range_m() const
    {
        return speed_of_light * static_cast<double>(code_length) * sample_period_s() / 2.0;
    }
    /// Range covered by the whole PRI, c * Q * T_s / 2.
    double pri_range_m() const
    {
        return speed_of_light * static_cast<double>(samples_per_pri()) * sample_period_s() / 2.0;
    }

    void validate() const
    {
        auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
        if (!positive(carrier_freq_hz))
            throw ParameterError("carrier_freq_hz must be positive");
        if (!positive(bandwidth_hz))
            throw ParameterError("bandwidth_hz must be positive");
        if (!positive(pri_s))
            throw ParameterError("pri_s must be positive");
        if (!positive(cpi_s))
            throw ParameterError("cpi_s must be positive");
        if (!positive(amplitude))
            throw ParameterError("amplitude must be positive");
        const std::size_t q = samples_per_pri();
        if (q == 0)
            throw ParameterError("PRI shorter than one sample period");
        if (std::abs(static_cast<double>(q) * sample_period_s() - pri_s) > sample_period_s())
            throw ParameterError("PRI is not a whole number of sample periods");
        if (packets_per_cpi() == 0)
            throw ParameterError("CPI shorter than one PRI");
        if (code_length == 0 || code_length > q)
            throw ParameterError("code_length must be in [1, samples_per_pri]");
        if (pulse_shape == PulseShape::raised_cosine && !(rolloff > 0.0 && rolloff <= 1.0))
            throw ParameterError("rolloff must be in (0, 1]");
    }
};

enum class FrameLabel
{
    fmcw,
    pmcw,
    golay_a,
    golay_b,
};

struct Frame
{
    std::vector<Complex> samples;
    FrameLabel label{};
};

enum class ScheduleKind
{
    fmcw,
    pmcw,
    golay_standard,
    golay_doppler_resilient,
};

inline constexpr ScheduleKind all_schedule_kinds[] = {ScheduleKind::fmcw, ScheduleKind::pmcw,
                                                      ScheduleKind::golay_standard,
                                                      ScheduleKind::golay_doppler_resilient};

inline std::string_view to_string(ScheduleKind kind)
{
    switch (kind)
    {
    case ScheduleKind::fmcw: return "fmcw";
    case ScheduleKind::pmcw: return "pmcw";
    case ScheduleKind::golay_standard: return "golay_standard";
    case ScheduleKind::golay_doppler_resilient: return "golay_dr";
    }
    return "?";
}

inline std::optional<ScheduleKind> parse_schedule_kind(std::string_view name)
{
    for (ScheduleKind kind : all_schedule_kinds)
        if (to_string(kind) == name)
            return kind;
    return std::nullopt;
}

struct GolayPair
{
    std::vector<int> a;
    std::vector<int> b;
};

struct PtmSequence
{
    std::vector<std::uint8_t> bits;
};

/// Golay complementary pair of length 2^n_log2 by recursive doubling
/// (a' = a|b, b' = a|-b) from a = b = [+1].
inline GolayPair golay_pair(int n_log2)
{
    if (n_log2 < 1 || n_log2 > 16)
        throw ParameterError("golay_pair: n_log2 must be in [1, 16]");
    GolayPair pair{{1}, {1}};
    for (int step = 0; step < n_log2; ++step)
    {
        std::vector<int> a = pair.a;
        std::vector<int> b = pair.a;
        a.insert(a.end(), pair.b.begin(), pair.b.end());
        for (int v : pair.b)
            b.push_back(-v);
        pair = {std::move(a), std::move(b)};
    }
    return pair;
}

/// Prouhet-Thue-Morse bits: parity of popcount(p).
inline PtmSequence ptm_sequence(std::size_t length)
{
    if (length == 0)
        throw ParameterError("ptm_sequence: length must be >= 1");
    PtmSequence seq;
    seq.bits.resize(length);
    for (std::size_t p = 0; p < length; ++p)
        seq.bits[p] = static_cast<std::uint8_t>(std::popcount(p) & 1u);
    return seq;
}

namespace detail
{

inline Frame make_frame(const WaveformParams &params, FrameLabel label)
{
    return {std::vector<Complex>(params.samples_per_pri()), label};
}

// Spectral raised-cosine band limit over the active chips: flat up to
// (1 - rolloff) * fs/2, cosine taper to zero at fs/2. The result is
// rescaled so the largest sample magnitude equals the amplitude.
inline void apply_pulse_shape(const WaveformParams &params, Frame &frame)
{
    if (params.pulse_shape == PulseShape::identity)
        return;
    const std::size_t q = frame.samples.size();
    const Fft fft(q);
    std::vector<Complex> spectrum = fft.forward(frame.samples);
    const double edge = 1.0 - params.rolloff;
    for (std::size_t k = 0; k < q; ++k)
    {
        const double signed_k = k <= q / 2 ? static_cast<double>(k) : static_cast<double>(k) - static_cast<double>(q);
        const double f = 2.0 * std::abs(signed_k) / static_cast<double>(q); // 1 at Nyquist
        double gain = 1.0;
        if (f > edge)
            gain = 0.5 * (1.0 + std::cos(std::numbers::pi * (f - edge) / params.rolloff));
        spectrum[k] *= gain;
    }
    frame.samples = fft.inverse(spectrum);
    double peak = 0.0;
    for (const Complex &v : frame.samples)
        peak = std::max(peak, std::abs(v));
    if (peak > 0.0)
        for (Complex &v : frame.samples)
            v *= params.amplitude / peak;
}

inline Frame frame_from_chips(const WaveformParams &params, std::span<const int> chips, FrameLabel label)
{
    Frame frame = make_frame(params, label);
    for (std::size_t k = 0; k < chips.size() && k < frame.samples.size(); ++k)
        frame.samples[k] = params.amplitude * static_cast<double>(chips[k]);
    apply_pulse_shape(params, frame);
    return frame;
}

inline int code_log2(const WaveformParams &params)
{
    if (!std::has_single_bit(params.code_length) || params.code_length < 2)
        throw ParameterError("Golay waveforms need a power-of-two code_length >= 2");
    return std::countr_zero(params.code_length);
}

} // namespace detail

/// Phase of the linear chirp at sample q: pi * (BW / T_chirp) * (q T_s)^2,
/// T_chirp = N * T_s, so the sweep covers BW over the active window.
inline double fmcw_phase(const WaveformParams &params, double q)
{
    const double ts = params.sample_period_s();
    const double chirp_s = static_cast<double>(params.code_length) * ts;
    const double t = q * ts;
    return std::numbers::pi * (params.bandwidth_hz / chirp_s) * t * t;
}

inline Frame generate_fmcw(const WaveformParams &params)
{
    params.validate();
    Frame frame = detail::make_frame(params, FrameLabel::fmcw);
    for (std::size_t q = 0; q < params.code_length; ++q)
        frame.samples[q] = std::polar(params.amplitude, fmcw_phase(params, static_cast<double>(q)));
    detail::apply_pulse_shape(params, frame);
    return frame;
}

/// Differential encoding d[0] = +1, d[k] = d[k-1] * (-1)^chips[k].
inline std::vector<int> dpsk_encode(std::span<const std::uint8_t> chips)
{
    std::vector<int> d(chips.size());
    for (std::size_t k = 0; k < chips.size(); ++k)
        d[k] = k == 0 ? 1 : (chips[k] ? -d[k - 1] : d[k - 1]);
    return d;
}

/// Seeded uniform binary chips, one bit per engine draw (top bit).
inline std::vector<std::uint8_t> pmcw_chips(std::size_t length, std::uint64_t seed)
{
    auto engine = make_engine(seed);
    std::vector<std::uint8_t> chips(length);
    for (auto &c : chips)
        c = static_cast<std::uint8_t>(engine() >> 63);
    return chips;
}

inline Frame pmcw_frame_from_chips(const WaveformParams &params, std::span<const std::uint8_t> chips)
{
    params.validate();
    if (chips.size() != params.code_length)
        throw ParameterError("PMCW chip count must equal code_length");
    const std::vector<int> symbols = dpsk_encode(chips);
    return detail::frame_from_chips(params, symbols, FrameLabel::pmcw);
}

inline Frame generate_pmcw(const WaveformParams &params, std::uint64_t seed)
{
    params.validate();
    return pmcw_frame_from_chips(params, pmcw_chips(params.code_length, seed));
}

/// Per-packet transmit frames over one CPI. Distinct frames are stored once;
/// packet p refers to frames()[index(p)]. The receiver correlates packet p
/// against exactly the frame that was transmitted in it.
class FrameSchedule
{
  public:
    FrameSchedule(ScheduleKind kind, std::vector<Frame> frames, std::vector<std::size_t> packet_frame)
        : kind_(kind), frames_(std::move(frames)), packet_frame_(std::move(packet_frame))
    {
    }

    ScheduleKind kind() const { return kind_; }
    std::size_t size() const { return packet_frame_.size(); }
    const Frame &operator[](std::size_t p) const { return frames_[packet_frame_[p]]; }
    const Frame &reference(std::size_t p) const { return (*this)[p]; }
    std::size_t index(std::size_t p) const { return packet_frame_[p]; }
    const std::vector<Frame> &frames() const { return frames_; }
    const std::vector<std::size_t> &packet_frames() const { return packet_frame_; }
    std::size_t samples_per_frame() const { return frames_.empty() ? 0 : frames_.front().samples.size(); }

  private:
    ScheduleKind kind_;
    std::vector<Frame> frames_;
    std::vector<std::size_t> packet_frame_;
};

/// FMCW/PMCW repeat one frame. Standard Golay alternates a, b, a, b, ...
/// Doppler-resilient Golay sends a where the PTM bit is 0 and b where it is 1.
inline FrameSchedule build_schedule(ScheduleKind kind, const WaveformParams &params, std::uint64_t seed)
{
    params.validate();
    const std::size_t packets = params.packets_per_cpi();
    switch (kind)
    {
    case ScheduleKind::fmcw:
        return {kind, {generate_fmcw(params)}, std::vector<std::size_t>(packets, 0)};
    case ScheduleKind::pmcw:
        return {kind, {generate_pmcw(params, seed)}, std::vector<std::size_t>(packets, 0)};
    case ScheduleKind::golay_standard:
    case ScheduleKind::golay_doppler_resilient: {
        const GolayPair pair = golay_pair(detail::code_log2(params));
        std::vector<Frame> frames{detail::frame_from_chips(params, pair.a, FrameLabel::golay_a),
                                  detail::frame_from_chips(params, pair.b, FrameLabel::golay_b)};
        std::vector<std::size_t> index(packets);
        if (kind == ScheduleKind::golay_standard)
        {
            for (std::size_t p = 0; p < packets; ++p)
                index[p] = p % 2;
        }
        else
        {
            const PtmSequence ptm = ptm_sequence(packets);
            for (std::size_t p = 0; p < packets; ++p)
                index[p] = ptm.bits[p];
        }
        return {kind, std::move(frames), std::move(index)};
    }
    }
    throw ParameterError("unknown schedule kind");
}

} // namespace isac
