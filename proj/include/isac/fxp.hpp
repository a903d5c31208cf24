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

// Fixed-point emulation of the matched-filter chain.
//
// A <W,I> format is two's complement with W bits, I of them integer bits
// (sign included) and F = W - I fraction bits: step 2^-F, range
// [-2^(I-1), 2^(I-1) - 2^-F]. Rounding is round-half-to-even, overflow
// saturates.
//
// Block scaling: with max-abs normalization each block (cube, bank, one
// Doppler row) is divided by a power of two so its largest component fits
// the format, which is what a block-floating-point datapath does with a
// shift. Power-of-two scales keep the normalization itself exact.

#include "isac/bench.hpp"
#include "isac/common.hpp"
#include "isac/fft.hpp"
#include "isac/rsp.hpp"

#include <cfenv>
#include <limits>
#include <span>
#include <string>

namespace isac::fxp
{

struct FixedPointFormat
{
    int word_bits = 24;
    int integer_bits = 1;

    int fraction_bits() const { return word_bits - integer_bits; }
    double step() const { return std::ldexp(1.0, -fraction_bits()); }
    double max_value() const { return std::ldexp(1.0, integer_bits - 1) - step(); }
    double min_value() const { return -std::ldexp(1.0, integer_bits - 1); }
    std::int64_t max_mantissa() const
    {
        return word_bits == 64 ? std::numeric_limits<std::int64_t>::max()
                               : (std::int64_t{1} << (word_bits - 1)) - 1;
    }
    std::int64_t min_mantissa() const
    {
        return word_bits == 64 ? std::numeric_limits<std::int64_t>::min() : -(std::int64_t{1} << (word_bits - 1));
    }

    void validate() const
    {
        if (word_bits < 2 || word_bits > 64)
            throw ParameterError("fixed-point word length must be in [2, 64]");
        if (integer_bits < 1 || integer_bits > word_bits)
            throw ParameterError("fixed-point integer bits must be in [1, word length]");
    }

    std::string to_string() const { return std::to_string(word_bits) + ":" + std::to_string(integer_bits); }
    friend bool operator==(const FixedPointFormat &, const FixedPointFormat &) = default;
};

struct Scaling
{
    enum class Mode
    {
        max_abs,
        fixed,
    };
    Mode mode = Mode::max_abs;
    double scale = 1.0; // used in fixed mode: value = mantissa * step * scale

    static Scaling max_abs() { return {Mode::max_abs, 1.0}; }
    static Scaling fixed(double scale = 1.0) { return {Mode::fixed, scale}; }
};

/// Mantissas of a Q x P complex block (packet-major like DataCube).
struct QuantizedCube
{
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::int64_t> re;
    std::vector<std::int64_t> im;
    FixedPointFormat format;
    double scale = 1.0;
    std::size_t saturation_count = 0;

    Complex value(std::size_t i) const
    {
        const double unit = format.step() * scale;
        return {static_cast<double>(re[i]) * unit, static_cast<double>(im[i]) * unit};
    }

    std::vector<Complex> dequantize() const
    {
        std::vector<Complex> out(re.size());
        for (std::size_t i = 0; i < out.size(); ++i)
            out[i] = value(i);
        return out;
    }
};

/// Round-half-even of a normalized value onto the mantissa grid, saturating.
inline std::int64_t quantize_component(double normalized, const FixedPointFormat &format, std::size_t &saturations)
{
    // std::nearbyint honours the current rounding mode; the default is to-nearest-even.
    const double r = std::nearbyint(std::ldexp(normalized, format.fraction_bits()));
    const double limit = std::ldexp(1.0, format.word_bits - 1);
    if (r >= limit || static_cast<std::int64_t>(r) > format.max_mantissa())
    {
        ++saturations;
        return format.max_mantissa();
    }
    if (r < -limit)
    {
        ++saturations;
        return format.min_mantissa();
    }
    return static_cast<std::int64_t>(r);
}

/// Power-of-two scale so that max_abs / scale <= max_value with the smallest such exponent.
inline double block_scale(double max_abs, const FixedPointFormat &format)
{
    if (!(max_abs > 0.0))
        return 1.0;
    const double top = format.max_value();
    int e = static_cast<int>(std::ceil(std::log2(max_abs / top)));
    while (std::ldexp(max_abs, -e) > top)
        ++e;
    while (std::ldexp(max_abs, -(e - 1)) <= top)
        --e;
    return std::ldexp(1.0, e);
}

inline double max_component(std::span<const Complex> signal)
{
    double m = 0.0;
    for (const Complex &v : signal)
        m = std::max({m, std::abs(v.real()), std::abs(v.imag())});
    return m;
}

inline QuantizedCube quantize(std::span<const Complex> signal, const FixedPointFormat &format, Scaling scaling,
                              std::size_t rows = 0, std::size_t cols = 1)
{
    format.validate();
    for (const Complex &v : signal)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DataError("cannot quantize non-finite samples");
    if (rows == 0)
    {
        rows = signal.size();
        cols = 1;
    }
    if (rows * cols != signal.size())
        throw ParameterError("quantize: shape does not match the signal length");
    if (scaling.mode == Scaling::Mode::fixed && !(scaling.scale > 0.0))
        throw ParameterError("quantize: fixed scale must be positive");

    QuantizedCube out;
    out.rows = rows;
    out.cols = cols;
    out.format = format;
    out.scale = scaling.mode == Scaling::Mode::max_abs ? block_scale(max_component(signal), format) : scaling.scale;
    out.re.resize(signal.size());
    out.im.resize(signal.size());
    const double inv = 1.0 / out.scale;
    for (std::size_t i = 0; i < signal.size(); ++i)
    {
        out.re[i] = quantize_component(signal[i].real() * inv, format, out.saturation_count);
        out.im[i] = quantize_component(signal[i].imag() * inv, format, out.saturation_count);
    }
    return out;
}

inline QuantizedCube quantize(const DataCube &cube, const FixedPointFormat &format, Scaling scaling)
{
    return quantize(cube.samples, format, scaling, cube.fast_time, cube.slow_time);
}

/// Replaces the block by its quantized values; returns the saturation count.
inline std::size_t quantize_in_place(std::span<Complex> block, const FixedPointFormat &format,
                                     Scaling scaling = Scaling::max_abs())
{
    const QuantizedCube q = quantize(block, format, scaling);
    for (std::size_t i = 0; i < block.size(); ++i)
        block[i] = q.value(i);
    return q.saturation_count;
}

// ----- Quantized matched filter ---------------------------------------------------

enum class Mode
{
    full_chain, // input, twiddles, reference, post-FFT, post-steering, post-IFFT
    core_only,  // reference, post-FFT and post-steering only (the multiply/accumulate core)
};

inline std::string_view to_string(Mode mode) { return mode == Mode::full_chain ? "full_chain" : "core_only"; }

struct StageCount
{
    std::string stage;
    std::size_t components = 0;
    std::size_t saturated = 0;
};

struct FxpReport
{
    FixedPointFormat format;
    Mode mode = Mode::full_chain;
    double sqnr_db = 0.0;
    bool peak_agree = false;
    Detection double_peak;
    Detection fixed_peak;
    double pslr_double_db = 0.0;
    double pslr_fixed_db = 0.0;
    double pslr_delta_db = 0.0;
    std::vector<StageCount> stages;
    std::size_t twiddle_saturations = 0;
    bool saturation_warning = false;
    std::vector<std::string> warnings;
};

struct FxpResult
{
    RangeDopplerMap map;
    FxpReport report;
};

namespace detail
{

struct QuantizingStages
{
    static constexpr bool quantizes_input = true;

    QuantizingStages(const FixedPointFormat &f, Mode m, std::size_t rows, std::size_t row_length)
        : format(f), mode(m), steering_saturated(rows, 0), ifft_saturated(rows, 0), row_components(2 * row_length)
    {
    }

    void input(std::span<Complex> block)
    {
        if (mode != Mode::full_chain)
            return;
        input_count = {"input", block.size() * 2, quantize_in_place(block, format)};
    }
    void reference(std::span<Complex> block)
    {
        reference_count = {"reference", block.size() * 2, quantize_in_place(block, format)};
    }
    void post_fft(std::span<Complex> block)
    {
        post_fft_count = {"post_fft", block.size() * 2, quantize_in_place(block, format)};
    }
    void post_steering(std::size_t row, std::span<Complex> block)
    {
        steering_saturated[row] = quantize_in_place(block, format);
    }
    void post_ifft(std::size_t row, std::span<Complex> block)
    {
        if (mode != Mode::full_chain)
            return;
        ifft_saturated[row] = quantize_in_place(block, format);
    }

    std::vector<StageCount> counts() const
    {
        std::vector<StageCount> out;
        if (mode == Mode::full_chain)
            out.push_back(input_count);
        out.push_back(reference_count);
        out.push_back(post_fft_count);
        auto rows = [&](const char *name, const std::vector<std::size_t> &sat) {
            StageCount c{name, row_components * sat.size(), 0};
            for (std::size_t s : sat)
                c.saturated += s;
            return c;
        };
        out.push_back(rows("post_steering", steering_saturated));
        if (mode == Mode::full_chain)
            out.push_back(rows("post_ifft", ifft_saturated));
        return out;
    }

    FixedPointFormat format;
    Mode mode;
    StageCount input_count{"input", 0, 0};
    StageCount reference_count{"reference", 0, 0};
    StageCount post_fft_count{"post_fft", 0, 0};
    std::vector<std::size_t> steering_saturated;
    std::vector<std::size_t> ifft_saturated;
    std::size_t row_components = 0;
};

inline double sqnr_db(std::span<const Complex> reference, std::span<const Complex> test)
{
    double signal = 0.0;
    double noise = 0.0;
    for (std::size_t i = 0; i < reference.size(); ++i)
    {
        signal += std::norm(reference[i]);
        noise += std::norm(reference[i] - test[i]);
    }
    if (noise == 0.0)
        return std::numeric_limits<double>::infinity();
    return 10.0 * std::log10(signal / noise);
}

inline double pslr_or_nan(const RangeDopplerMap &map, const Detection &peak, std::size_t halfwidth)
{
    try
    {
        return pslr_db(map.row(peak.doppler_bin), halfwidth);
    }
    catch (const ParameterError &)
    {
        return std::numeric_limits<double>::quiet_NaN();
    }
}

} // namespace detail

/// Runs the chain at `format` and compares it with the double-precision chain.
inline FxpResult quantized_matched_filter(const DataCube &cube, const ReferenceBank &bank, const DopplerGrid &grid,
                                          const FixedPointFormat &format, Mode mode = Mode::full_chain,
                                          std::size_t mainlobe_halfwidth = default_mainlobe_halfwidth,
                                          SteeringMethod method = SteeringMethod::automatic)
{
    format.validate();
    for (const Complex &v : cube.samples)
        if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
            throw DataError("cannot quantize non-finite samples");

    const std::vector<Complex> chi_double = matched_filter_chi(cube, bank, grid, method);

    std::size_t twiddle_saturations = 0;
    Fft::TwiddleTransform twiddle_quantizer;
    if (mode == Mode::full_chain)
    {
        twiddle_quantizer = [&](Complex w) {
            const std::size_t before = twiddle_saturations;
            std::size_t sat = 0;
            const Complex q{static_cast<double>(quantize_component(w.real(), format, sat)) * format.step(),
                            static_cast<double>(quantize_component(w.imag(), format, sat)) * format.step()};
            twiddle_saturations = before + sat;
            return q;
        };
    }
    const Fft fast(cube.fast_time, twiddle_quantizer);
    const Fft slow(std::max<std::size_t>(cube.slow_time, 1), twiddle_quantizer);

    detail::QuantizingStages stages(format, mode, grid.size(), cube.fast_time);
    const std::vector<Complex> chi_fixed = isac::detail::run_chain(cube, bank, grid, method, fast, slow, stages);

    FxpResult result;
    result.map = make_map(cube.params, grid, chi_fixed);
    const RangeDopplerMap double_map = make_map(cube.params, grid, chi_double);

    FxpReport &report = result.report;
    report.format = format;
    report.mode = mode;
    report.sqnr_db = detail::sqnr_db(chi_double, chi_fixed);
    report.stages = stages.counts();
    report.twiddle_saturations = twiddle_saturations;
    for (const StageCount &c : report.stages)
    {
        if (c.components > 0 && static_cast<double>(c.saturated) > 0.01 * static_cast<double>(c.components))
        {
            report.saturation_warning = true;
            report.warnings.push_back("more than 1% of components saturated at stage " + c.stage);
        }
    }

    report.double_peak = detect_peak(double_map);
    try
    {
        report.fixed_peak = detect_peak(result.map);
        report.peak_agree = report.fixed_peak.range_bin == report.double_peak.range_bin &&
                            report.fixed_peak.doppler_bin == report.double_peak.doppler_bin;
        report.pslr_fixed_db = detail::pslr_or_nan(result.map, report.fixed_peak, mainlobe_halfwidth);
    }
    catch (const NoDetectionError &)
    {
        report.peak_agree = false;
        report.pslr_fixed_db = std::numeric_limits<double>::quiet_NaN();
        report.warnings.push_back("quantized map has no energy");
    }
    report.pslr_double_db = detail::pslr_or_nan(double_map, report.double_peak, mainlobe_halfwidth);
    if (std::isinf(report.pslr_double_db) && std::isinf(report.pslr_fixed_db))
        report.pslr_delta_db = 0.0;
    else
        report.pslr_delta_db = report.pslr_fixed_db - report.pslr_double_db;
    return result;
}

struct SweepRow
{
    FixedPointFormat format;
    double sqnr_db = 0.0;
    bool peak_agree = false;
    double pslr_delta_db = 0.0;
    double runtime_s = 0.0;
    FxpReport report;
};

/// One row per format; runtime is the median of `repeats` timed runs.
inline std::vector<SweepRow> precision_sweep(const DataCube &cube, const ReferenceBank &bank, const DopplerGrid &grid,
                                             std::span<const FixedPointFormat> formats, Mode mode = Mode::full_chain,
                                             std::size_t mainlobe_halfwidth = default_mainlobe_halfwidth,
                                             std::size_t repeats = 1)
{
    if (formats.empty())
        throw ParameterError("precision_sweep needs at least one format");
    std::vector<SweepRow> rows;
    for (const FixedPointFormat &format : formats)
    {
        FxpResult result;
        const TimingStats timing = time_median(
            [&] { result = quantized_matched_filter(cube, bank, grid, format, mode, mainlobe_halfwidth); }, repeats,
            0);
        rows.push_back({format, result.report.sqnr_db, result.report.peak_agree, result.report.pslr_delta_db,
                        timing.median_s, result.report});
    }
    return rows;
}

/// SQNR must not drop by more than `tolerance_db` between consecutive rows
/// of increasing word length with equal integer bits.
inline bool sqnr_non_decreasing(std::span<const SweepRow> rows, double tolerance_db = 3.0)
{
    for (std::size_t i = 1; i < rows.size(); ++i)
    {
        const auto &prev = rows[i - 1];
        const auto &cur = rows[i];
        if (cur.format.integer_bits != prev.format.integer_bits || cur.format.word_bits < prev.format.word_bits)
            continue;
        if (cur.sqnr_db + tolerance_db < prev.sqnr_db)
            return false;
    }
    return true;
}

} // namespace isac::fxp
