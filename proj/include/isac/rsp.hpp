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

// Range-Doppler processing: per-packet fast-time FFT, frequency-domain
// matched filter against the packet's own reference, coherent Doppler
// steering across packets, IFFT back to range, then peak picking and PSLR.
//
// chi[j][k] = IFFT_q{ sum_p exp(+j 2 pi f_j p T_pri) S~[q,p] conj(s~_p[q]) }[k]
//
// The matched filter is a circular correlation over the Q-sample PRI. The
// brute-force time-domain oracle computes the same correlation directly.

#include "isac/common.hpp"
#include "isac/fft.hpp"
#include "isac/scene.hpp"
#include "isac/waveform.hpp"

#include <limits>
#include <span>

namespace isac
{

// ----- Reference bank --------------------------------------------------------

/// Conjugated spectra of the distinct transmit frames, stored contiguously
/// (frame f occupies [f*Q, (f+1)*Q)), and the frame used by each packet.
struct ReferenceBank
{
    ScheduleKind kind{};
    std::size_t fast_time = 0;
    std::vector<Complex> spectra;
    std::vector<std::size_t> packet_frame;

    std::size_t distinct() const { return fast_time == 0 ? 0 : spectra.size() / fast_time; }
    std::size_t packets() const { return packet_frame.size(); }
    std::span<const Complex> spectrum(std::size_t p) const
    {
        return {spectra.data() + packet_frame[p] * fast_time, fast_time};
    }
};

inline ReferenceBank build_reference_bank(const FrameSchedule &schedule)
{
    ReferenceBank bank;
    bank.kind = schedule.kind();
    bank.fast_time = schedule.samples_per_frame();
    bank.packet_frame = schedule.packet_frames();
    const Fft fft(bank.fast_time);
    for (const Frame &f : schedule.frames())
    {
        const std::vector<Complex> spectrum = fft.forward(f.samples);
        for (const Complex &v : spectrum)
            bank.spectra.push_back(std::conj(v));
    }
    return bank;
}

// ----- Doppler grid ------------------------------------------------------------

struct DopplerGrid
{
    std::vector<double> frequencies_hz;
    double spacing_hz = 0.0;
    double pri_s = 0.0;
    /// True when f_j = (j - J/2) / (J T_pri), i.e. the grid is the slow-time FFT grid.
    bool fft_aligned = false;

    std::size_t size() const { return frequencies_hz.size(); }
    double max_doppler_hz() const { return 1.0 / (2.0 * pri_s); }

    /// J = P bins at spacing 1/(P T_pri); bin P/2 is zero Doppler.
    static DopplerGrid aligned(std::size_t packets, double pri_s)
    {
        if (packets == 0 || !(pri_s > 0.0))
            throw ParameterError("Doppler grid needs packets >= 1 and a positive PRI");
        DopplerGrid grid;
        grid.pri_s = pri_s;
        grid.spacing_hz = 1.0 / (static_cast<double>(packets) * pri_s);
        grid.fft_aligned = true;
        const auto center = static_cast<double>(packets / 2);
        for (std::size_t j = 0; j < packets; ++j)
            grid.frequencies_hz.push_back((static_cast<double>(j) - center) * grid.spacing_hz);
        return grid;
    }

    /// J bins covering [-f_max, +f_max] inclusive of both ends.
    static DopplerGrid uniform(std::size_t bins, double pri_s)
    {
        if (bins == 0 || !(pri_s > 0.0))
            throw ParameterError("Doppler grid needs bins >= 1 and a positive PRI");
        DopplerGrid grid;
        grid.pri_s = pri_s;
        const double f_max = grid.max_doppler_hz();
        if (bins == 1)
        {
            grid.spacing_hz = 2.0 * f_max;
            grid.frequencies_hz = {0.0};
            return grid;
        }
        grid.spacing_hz = 2.0 * f_max / static_cast<double>(bins - 1);
        for (std::size_t j = 0; j < bins; ++j)
            grid.frequencies_hz.push_back(-f_max + static_cast<double>(j) * grid.spacing_hz);
        if (bins % 2 == 1)
            grid.frequencies_hz[bins / 2] = 0.0;
        return grid;
    }

    static DopplerGrid for_params(const WaveformParams &params)
    {
        return aligned(params.packets_per_cpi(), params.pri_s);
    }
};

// ----- Maps and detections ------------------------------------------------------

/// |chi| as J rows (Doppler) by Q columns (range), row-major.
struct RangeDopplerMap
{
    std::size_t doppler_bins = 0;
    std::size_t range_bins = 0;
    std::vector<double> values;
    std::vector<double> range_axis_m;
    std::vector<double> doppler_axis_hz;
    std::vector<double> doppler_axis_mps;

    double at(std::size_t j, std::size_t q) const { return values[j * range_bins + q]; }
    std::span<const double> row(std::size_t j) const { return {values.data() + j * range_bins, range_bins}; }
};

struct Detection
{
    double range_m = 0.0;
    double velocity_mps = 0.0;
    double peak_magnitude = 0.0;
    std::size_t range_bin = 0;
    std::size_t doppler_bin = 0;
};

inline RangeDopplerMap make_map(const WaveformParams &params, const DopplerGrid &grid,
                                std::span<const Complex> chi)
{
    RangeDopplerMap map;
    map.doppler_bins = grid.size();
    map.range_bins = params.samples_per_pri();
    map.values.resize(chi.size());
    for (std::size_t i = 0; i < chi.size(); ++i)
        map.values[i] = std::abs(chi[i]);
    const double bin_m = speed_of_light * params.sample_period_s() / 2.0;
    for (std::size_t q = 0; q < map.range_bins; ++q)
        map.range_axis_m.push_back(static_cast<double>(q) * bin_m);
    map.doppler_axis_hz = grid.frequencies_hz;
    for (double f : grid.frequencies_hz)
        map.doppler_axis_mps.push_back(f * params.wavelength_m() / 2.0);
    return map;
}

// ----- Processing chain -------------------------------------------------------------

/// Column-wise Q-point FFT of every packet.
inline DataCube fast_time_fft(const DataCube &cube)
{
    DataCube out = cube;
    const Fft fft(cube.fast_time);
    parallel_for(cube.slow_time, [&](std::size_t p) { fft.forward(cube.packet(p), out.packet(p)); });
    return out;
}

enum class SteeringMethod
{
    automatic,     // slow-time FFT when the grid is FFT-aligned, direct otherwise
    direct,        // explicit steering-vector accumulation per Doppler bin
    slow_time_fft, // requires an aligned grid
};

namespace detail
{

/// Identity stage hooks; the fixed-point path substitutes quantizers.
struct FloatStages
{
    static constexpr bool quantizes_input = false;
    void input(std::span<Complex>) {}
    void reference(std::span<Complex>) {}
    void post_fft(std::span<Complex>) {}
    void post_steering(std::size_t, std::span<Complex>) {}
    void post_ifft(std::size_t, std::span<Complex>) {}
};

inline void check_compatible(const DataCube &cube, const ReferenceBank &bank, const DopplerGrid &grid)
{
    if (bank.fast_time != cube.fast_time || bank.packets() != cube.slow_time)
        throw ProcessingError("reference bank dimensions do not match the data cube");
    if (grid.size() == 0)
        throw ProcessingError("empty Doppler grid");
    if (std::abs(grid.pri_s - cube.params.pri_s) > 1e-12 * cube.params.pri_s)
        throw ProcessingError("Doppler grid PRI does not match the data cube");
}

/// Returns complex chi, J x Q row-major. `fast` is a Q-point plan and
/// `slow` a P-point plan (used only for slow-time FFT steering).
template <typename Stages>
std::vector<Complex> run_chain(const DataCube &cube, const ReferenceBank &bank, const DopplerGrid &grid,
                               SteeringMethod method, const Fft &fast, const Fft &slow, Stages &stages)
{
    check_compatible(cube, bank, grid);
    const std::size_t q_len = cube.fast_time;
    const std::size_t p_len = cube.slow_time;
    const std::size_t j_len = grid.size();
    const bool aligned = grid.fft_aligned && j_len == p_len;
    if (method == SteeringMethod::slow_time_fft && !aligned)
        throw ProcessingError("slow-time FFT steering needs an FFT-aligned grid with J = P");
    const bool use_fft = method == SteeringMethod::slow_time_fft || (method == SteeringMethod::automatic && aligned);

    std::vector<Complex> reference = bank.spectra;
    stages.reference(reference);

    // Fast-time FFT, then the matched-filter product in place.
    std::vector<Complex> spectrum(q_len * p_len);
    if constexpr (Stages::quantizes_input)
    {
        std::vector<Complex> input = cube.samples;
        stages.input(input);
        parallel_for(p_len, [&](std::size_t p) {
            fast.forward(std::span<const Complex>(input.data() + p * q_len, q_len),
                         std::span<Complex>(spectrum.data() + p * q_len, q_len));
        });
    }
    else
    {
        parallel_for(p_len, [&](std::size_t p) {
            fast.forward(cube.packet(p), std::span<Complex>(spectrum.data() + p * q_len, q_len));
        });
    }
    stages.post_fft(spectrum);
    parallel_for(p_len, [&](std::size_t p) {
        const Complex *ref = reference.data() + bank.packet_frame[p] * q_len;
        Complex *col = spectrum.data() + p * q_len;
        for (std::size_t q = 0; q < q_len; ++q)
            col[q] *= ref[q];
    });

    // Doppler steering: acc_j[q] = sum_p exp(+j 2 pi f_j p T) M[q,p], in packet order.
    std::vector<Complex> chi(j_len * q_len);
    if (use_fft)
    {
        if (slow.size() != p_len)
            throw ProcessingError("slow-time FFT plan length does not match P");
        const double center = static_cast<double>(p_len / 2);
        std::vector<Complex> derotate(p_len);
        for (std::size_t p = 0; p < p_len; ++p)
            derotate[p] = std::polar(1.0, two_pi * center * static_cast<double>(p) / static_cast<double>(p_len));
        parallel_for(q_len, [&](std::size_t q) {
            // sum_p x[p] e^{+j 2 pi j p / P} = conj(FFT(conj(x)))[j]
            std::vector<Complex> x(p_len);
            for (std::size_t p = 0; p < p_len; ++p)
                x[p] = std::conj(spectrum[p * q_len + q]) * derotate[p];
            std::vector<Complex> y = slow.forward(x);
            for (std::size_t j = 0; j < j_len; ++j)
                chi[j * q_len + q] = std::conj(y[j]);
        });
    }
    else
    {
        parallel_for(j_len, [&](std::size_t j) {
            Complex *acc = chi.data() + j * q_len;
            const double step = two_pi * grid.frequencies_hz[j] * grid.pri_s;
            for (std::size_t p = 0; p < p_len; ++p)
            {
                const Complex w = std::polar(1.0, step * static_cast<double>(p));
                const Complex *col = spectrum.data() + p * q_len;
                for (std::size_t q = 0; q < q_len; ++q)
                    acc[q] += col[q] * w;
            }
        });
    }

    parallel_for(j_len, [&](std::size_t j) {
        std::span<Complex> row(chi.data() + j * q_len, q_len);
        stages.post_steering(j, row);
        fast.inverse(row, row);
        stages.post_ifft(j, row);
    });
    return chi;
}

} // namespace detail

/// Complex chi (J x Q, row-major) from the floating-point chain.
inline std::vector<Complex> matched_filter_chi(const DataCube &cube, const ReferenceBank &bank,
                                               const DopplerGrid &grid,
                                               SteeringMethod method = SteeringMethod::automatic)
{
    detail::FloatStages stages;
    const Fft fast(cube.fast_time);
    const Fft slow(std::max<std::size_t>(cube.slow_time, 1));
    return detail::run_chain(cube, bank, grid, method, fast, slow, stages);
}

inline RangeDopplerMap matched_filter_rd(const DataCube &cube, const ReferenceBank &bank, const DopplerGrid &grid,
                                         SteeringMethod method = SteeringMethod::automatic)
{
    return make_map(cube.params, grid, matched_filter_chi(cube, bank, grid, method));
}

// ----- Brute-force oracle ------------------------------------------------------------

inline constexpr std::size_t default_oracle_limit = std::size_t{1} << 26;

/// Direct circular cross-correlation of every packet with its reference,
/// followed by the Doppler-steered coherent sum. O(P Q L + J P Q) with L
/// the reference support. Refuses instances with Q*P*J above `limit`.
inline RangeDopplerMap time_domain_oracle(const DataCube &cube, const FrameSchedule &schedule,
                                          const DopplerGrid &grid, std::size_t limit = default_oracle_limit)
{
    const std::size_t q_len = cube.fast_time;
    const std::size_t p_len = cube.slow_time;
    const std::size_t j_len = grid.size();
    if (schedule.size() != p_len || schedule.samples_per_frame() != q_len)
        throw ProcessingError("schedule dimensions do not match the data cube");
    if (j_len == 0)
        throw ProcessingError("empty Doppler grid");
    if (q_len * p_len * j_len > limit)
        throw RefusalError("time-domain oracle refuses Q*P*J = " + std::to_string(q_len * p_len * j_len) +
                           " above the guard of " + std::to_string(limit));

    std::vector<Complex> corr(p_len * q_len);
    parallel_for(p_len, [&](std::size_t p) {
        const std::vector<Complex> &ref = schedule[p].samples;
        std::size_t support = ref.size();
        while (support > 0 && ref[support - 1] == Complex{})
            --support;
        const std::span<const Complex> rx = cube.packet(p);
        Complex *out = corr.data() + p * q_len;
        for (std::size_t k = 0; k < q_len; ++k)
        {
            Complex acc{};
            for (std::size_t q = 0; q < support; ++q)
                acc += rx[(q + k) % q_len] * std::conj(ref[q]);
            out[k] = acc;
        }
    });

    std::vector<Complex> chi(j_len * q_len);
    parallel_for(j_len, [&](std::size_t j) {
        Complex *acc = chi.data() + j * q_len;
        const double step = two_pi * grid.frequencies_hz[j] * grid.pri_s;
        for (std::size_t p = 0; p < p_len; ++p)
        {
            const Complex w = std::polar(1.0, step * static_cast<double>(p));
            const Complex *col = corr.data() + p * q_len;
            for (std::size_t k = 0; k < q_len; ++k)
                acc[k] += col[k] * w;
        }
    });
    return make_map(cube.params, grid, chi);
}

/// max |a - b| / max |b| over all cells.
inline double max_relative_deviation(const RangeDopplerMap &a, const RangeDopplerMap &b)
{
    if (a.values.size() != b.values.size())
        throw ProcessingError("maps have different dimensions");
    double diff = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < a.values.size(); ++i)
    {
        diff = std::max(diff, std::abs(a.values[i] - b.values[i]));
        scale = std::max(scale, std::abs(b.values[i]));
    }
    return scale > 0.0 ? diff / scale : diff;
}

// ----- Detection and PSLR ------------------------------------------------------------

/// Global maximum; ties go to the smallest range bin, then the smallest Doppler bin.
inline Detection detect_peak(const RangeDopplerMap &map)
{
    if (map.values.empty())
        throw NoDetectionError("empty range-Doppler map");
    Detection best;
    bool found = false;
    for (std::size_t j = 0; j < map.doppler_bins; ++j)
    {
        for (std::size_t q = 0; q < map.range_bins; ++q)
        {
            const double v = map.at(j, q);
            const bool better = v > best.peak_magnitude ||
                                (found && v == best.peak_magnitude &&
                                 (q < best.range_bin || (q == best.range_bin && j < best.doppler_bin)));
            if (v > 0.0 && better)
            {
                best.peak_magnitude = v;
                best.range_bin = q;
                best.doppler_bin = j;
                found = true;
            }
        }
    }
    if (!found)
        throw NoDetectionError("range-Doppler map has no energy");
    best.range_m = map.range_axis_m[best.range_bin];
    best.velocity_mps = map.doppler_axis_mps[best.doppler_bin];
    return best;
}

inline std::vector<double> range_profile(const RangeDopplerMap &map, std::size_t doppler_bin)
{
    const auto row = map.row(doppler_bin);
    return {row.begin(), row.end()};
}

inline constexpr std::size_t default_mainlobe_halfwidth = 2;

/// Peak-to-sidelobe ratio in dB, sidelobes taken outside +/- halfwidth bins
/// around the peak. Returns +infinity when every sidelobe is exactly zero.
inline double pslr_db(std::span<const double> profile, std::size_t mainlobe_halfwidth = default_mainlobe_halfwidth)
{
    if (profile.size() < 2 * mainlobe_halfwidth + 1)
        throw ParameterError("profile shorter than the mainlobe exclusion window");
    const auto peak_it = std::max_element(profile.begin(), profile.end());
    const double peak = *peak_it;
    if (!(peak > 0.0) || std::count(profile.begin(), profile.end(), peak) != 1)
        throw ParameterError("profile has no strict global maximum");
    const auto k = static_cast<std::size_t>(peak_it - profile.begin());
    const std::size_t lo = k >= mainlobe_halfwidth ? k - mainlobe_halfwidth : 0;
    const std::size_t hi = std::min(profile.size() - 1, k + mainlobe_halfwidth);
    double sidelobe = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i)
        if (i < lo || i > hi)
            sidelobe = std::max(sidelobe, profile[i]);
    if (sidelobe == 0.0)
        return std::numeric_limits<double>::infinity();
    return 20.0 * std::log10(peak / sidelobe);
}

} // namespace isac
