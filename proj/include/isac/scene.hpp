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

// Point-scatterer scenes and the received fast-time x slow-time data cube.
// The access point sits at the origin. Delays are rounded to whole samples
// and held at their CPI-start value (stop-and-hop); motion enters only as
// the per-packet Doppler phase.

#include "isac/common.hpp"
#include "isac/waveform.hpp"

#include <span>
#include <string>

namespace isac
{

struct PointScatterer
{
    Vec3 position_m;
    Vec3 velocity_mps;
    Complex reflectivity{1.0, 0.0};

    double range_m() const { return norm(position_m); }
    /// Positive when receding.
    double radial_velocity_mps() const { return dot(position_m, velocity_mps) / range_m(); }
};

enum class TargetKind
{
    single_point,
    cluster,
};

struct TargetModel
{
    TargetKind kind = TargetKind::single_point;
    std::vector<PointScatterer> scatterers;
    double bulk_rcs_dbsm = 0.0;
    Vec3 bulk_velocity_mps;
    std::string descriptor;
};

inline double dbsm_to_power(double dbsm) { return std::pow(10.0, dbsm / 10.0); }

inline TargetModel make_point_target(const Vec3 &position, const Vec3 &velocity, double rcs_dbsm = 0.0)
{
    TargetModel model;
    model.kind = TargetKind::single_point;
    model.bulk_rcs_dbsm = rcs_dbsm;
    model.bulk_velocity_mps = velocity;
    model.descriptor = "point";
    model.scatterers.push_back({position, velocity, Complex(std::sqrt(dbsm_to_power(rcs_dbsm)), 0.0)});
    return model;
}

// ----- Extended targets ----------------------------------------------------

struct PedestrianSpec
{
    Vec3 center_m{10.0, 0.0, 0.0};
    double speed_mps = 2.0;          // radial, positive = receding
    double rcs_dbsm = 0.0;
    double micro_motion_mps = 1.0;   // per-scatterer radial perturbation bound
    std::uint64_t seed = 1;
};

struct CarSpec
{
    Vec3 center_m{20.0, 0.0, 0.0};
    double speed_mps = 10.0;
    double rcs_dbsm = 10.0;
    std::size_t scatterer_count = 64;
    double length_m = 4.4;
    double width_m = 1.7;
};

namespace detail
{

// Orthonormal frame with depth along the line of sight, lateral in the
// horizontal plane and vertical completing it.
struct BodyFrame
{
    Vec3 depth;
    Vec3 lateral;
    Vec3 vertical;
};

inline BodyFrame body_frame(const Vec3 &center)
{
    const double r = norm(center);
    if (!(r > 0.0))
        throw ScenarioError("target center must not coincide with the radar");
    const Vec3 depth = (1.0 / r) * center;
    Vec3 lateral{-depth.y, depth.x, 0.0};
    if (norm(lateral) < 1e-12)
        lateral = {1.0, 0.0, 0.0};
    lateral = (1.0 / norm(lateral)) * lateral;
    const Vec3 vertical{depth.y * lateral.z - depth.z * lateral.y, depth.z * lateral.x - depth.x * lateral.z,
                        depth.x * lateral.y - depth.y * lateral.x};
    return {depth, lateral, vertical};
}

inline void split_rcs_uniformly(TargetModel &model)
{
    const double amplitude =
        std::sqrt(dbsm_to_power(model.bulk_rcs_dbsm) / static_cast<double>(model.scatterers.size()));
    for (auto &s : model.scatterers)
        s.reflectivity = Complex(amplitude, 0.0);
}

} // namespace detail

/// 27-scatterer walker inside a 0.5 m (lateral) x 1.8 m (height) x 0.3 m
/// (depth) box: head, torso, two arms and two legs.
inline TargetModel make_pedestrian(const PedestrianSpec &spec = {})
{
    // {lateral, height above the box bottom, depth}
    static constexpr double layout[27][3] = {
        // head
        {0.00, 1.70, 0.00},
        // torso 2 x 4
        {-0.12, 1.45, 0.05}, {0.12, 1.45, 0.05}, {-0.12, 1.25, 0.10}, {0.12, 1.25, 0.10},
        {-0.12, 1.05, 0.05}, {0.12, 1.05, 0.05}, {-0.10, 0.90, 0.00}, {0.10, 0.90, 0.00},
        // arms, shoulder to hand
        {-0.25, 1.40, 0.00}, {-0.25, 1.20, -0.05}, {-0.25, 1.00, -0.10}, {-0.25, 0.80, -0.15},
        {0.25, 1.40, 0.00}, {0.25, 1.20, 0.05}, {0.25, 1.00, 0.10}, {0.25, 0.80, 0.15},
        // legs, hip to foot
        {-0.10, 0.80, 0.00}, {-0.10, 0.60, 0.05}, {-0.10, 0.40, 0.10}, {-0.10, 0.20, 0.12}, {-0.10, 0.00, 0.15},
        {0.10, 0.80, 0.00}, {0.10, 0.60, -0.05}, {0.10, 0.40, -0.10}, {0.10, 0.20, -0.12}, {0.10, 0.00, -0.15},
    };
    const detail::BodyFrame frame = detail::body_frame(spec.center_m);
    auto engine = make_engine(spec.seed, 0x5045444553ull);

    TargetModel model;
    model.kind = TargetKind::cluster;
    model.bulk_rcs_dbsm = spec.rcs_dbsm;
    model.bulk_velocity_mps = spec.speed_mps * frame.depth;
    model.descriptor = "pedestrian";
    for (const auto &p : layout)
    {
        const Vec3 offset = p[0] * frame.lateral + (p[1] - 0.9) * frame.vertical + p[2] * frame.depth;
        const double jitter = spec.micro_motion_mps * (2.0 * uniform01(engine) - 1.0);
        model.scatterers.push_back(
            {spec.center_m + offset, model.bulk_velocity_mps + jitter * frame.depth, Complex(1.0, 0.0)});
    }
    detail::split_rcs_uniformly(model);
    return model;
}

/// Rigid lattice of scatterers over a length x width footprint, length
/// along the line of sight.
inline TargetModel make_car(const CarSpec &spec = {})
{
    if (spec.scatterer_count == 0)
        throw ParameterError("car scatterer_count must be >= 1");
    const detail::BodyFrame frame = detail::body_frame(spec.center_m);
    const auto count = spec.scatterer_count;
    std::size_t across = static_cast<std::size_t>(
        std::llround(std::sqrt(static_cast<double>(count) * spec.width_m / spec.length_m)));
    across = std::clamp<std::size_t>(across, 1, count);
    const std::size_t along = (count + across - 1) / across;

    TargetModel model;
    model.kind = TargetKind::cluster;
    model.bulk_rcs_dbsm = spec.rcs_dbsm;
    model.bulk_velocity_mps = spec.speed_mps * frame.depth;
    model.descriptor = "car";
    for (std::size_t i = 0; i < along && model.scatterers.size() < count; ++i)
    {
        const double u = along == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(along - 1) - 0.5;
        for (std::size_t k = 0; k < across && model.scatterers.size() < count; ++k)
        {
            const double w = across == 1 ? 0.0 : static_cast<double>(k) / static_cast<double>(across - 1) - 0.5;
            const Vec3 pos = spec.center_m + (u * spec.length_m) * frame.depth + (w * spec.width_m) * frame.lateral;
            model.scatterers.push_back({pos, model.bulk_velocity_mps, Complex(1.0, 0.0)});
        }
    }
    detail::split_rcs_uniformly(model);
    return model;
}

// ----- Echo synthesis ----------------------------------------------------

enum class PathLoss
{
    off,
    inverse_square, // sigma / r^2 amplitude
};

enum class RangeGuard
{
    listening_window, // c * N * T_s / 2
    full_pri,         // c * Q * T_s / 2
};

struct EchoOptions
{
    PathLoss path_loss = PathLoss::inverse_square;
    RangeGuard range_guard = RangeGuard::listening_window;
    std::optional<double> snr_db;     // per-sample SNR of the strongest echo
    std::optional<double> noise_power; // absolute noise power, overrides snr_db
    std::uint64_t noise_seed = 0;
};

/// Received samples, packet-major: packet p occupies [p*Q, (p+1)*Q).
struct DataCube
{
    std::size_t fast_time = 0; // Q
    std::size_t slow_time = 0; // P
    std::vector<Complex> samples;
    WaveformParams params;
    std::uint64_t noise_seed = 0;
    std::optional<double> snr_db;
    double noise_power = 0.0;

    DataCube() = default;
    DataCube(std::size_t q, std::size_t p) : fast_time(q), slow_time(p), samples(q * p) {}

    std::span<Complex> packet(std::size_t p) { return {samples.data() + p * fast_time, fast_time}; }
    std::span<const Complex> packet(std::size_t p) const { return {samples.data() + p * fast_time, fast_time}; }
    Complex &at(std::size_t q, std::size_t p) { return samples[p * fast_time + q]; }
    const Complex &at(std::size_t q, std::size_t p) const { return samples[p * fast_time + q]; }
};

inline std::size_t delay_samples(const WaveformParams &params, double range_m)
{
    return static_cast<std::size_t>(std::llround(2.0 * range_m / (speed_of_light * params.sample_period_s())));
}

inline double doppler_hz(const WaveformParams &params, double radial_velocity_mps)
{
    return 2.0 * radial_velocity_mps / params.wavelength_m();
}

inline double max_scene_range_m(const WaveformParams &params, RangeGuard guard)
{
    return guard == RangeGuard::listening_window ? params.listening_window_range_m() : params.pri_range_m();
}

namespace detail
{

struct PreparedScatterer
{
    const PointScatterer *source = nullptr;
    std::size_t delay = 0;
    double range0 = 0.0;
    Complex gain;
};

inline double active_power(const FrameSchedule &schedule, std::size_t code_length)
{
    double power = 0.0;
    for (const Frame &f : schedule.frames())
    {
        double sum = 0.0;
        for (std::size_t q = 0; q < code_length && q < f.samples.size(); ++q)
            sum += std::norm(f.samples[q]);
        power = std::max(power, sum / static_cast<double>(code_length));
    }
    return power;
}

} // namespace detail

/// s_p[q] = sum_b sigma_b' s_tx,p[q - q_b] exp(-j 4 pi (r_b(p) - r_b(0)) / lambda) + noise.
/// For radial motion the phase term equals exp(-j 2 pi f_D p T_pri).
inline DataCube synthesize_echo(const FrameSchedule &schedule, std::span<const TargetModel> targets,
                                const WaveformParams &params, const EchoOptions &options = {})
{
    params.validate();
    const std::size_t q_len = params.samples_per_pri();
    const std::size_t p_len = params.packets_per_cpi();
    if (schedule.size() != p_len || schedule.samples_per_frame() != q_len)
        throw ProcessingError("schedule dimensions do not match the waveform parameters");

    const double r_max = max_scene_range_m(params, options.range_guard);
    const double v_max = params.max_unambiguous_velocity_mps();
    std::vector<detail::PreparedScatterer> prepared;
    for (const TargetModel &t : targets)
    {
        for (const PointScatterer &s : t.scatterers)
        {
            const double r = s.range_m();
            if (!(r > 0.0))
                throw ScenarioError("scatterer at the radar position");
            if (r >= r_max)
                throw ScenarioError("scatterer at " + std::to_string(r) + " m is beyond the unambiguous range of " +
                                    std::to_string(r_max) + " m");
            if (std::abs(s.radial_velocity_mps()) > v_max)
                throw ScenarioError("scatterer radial velocity exceeds the unambiguous velocity");
            const std::size_t delay = delay_samples(params, r);
            if (delay >= q_len)
                throw ScenarioError("scatterer delay exceeds the PRI");
            Complex gain = s.reflectivity;
            if (options.path_loss == PathLoss::inverse_square)
                gain /= r * r;
            prepared.push_back({&s, delay, r, gain});
        }
    }

    DataCube cube(q_len, p_len);
    cube.params = params;
    cube.noise_seed = options.noise_seed;
    cube.snr_db = options.snr_db;
    if (options.noise_power)
    {
        cube.noise_power = *options.noise_power;
    }
    else if (options.snr_db)
    {
        if (prepared.empty())
            throw ScenarioError("SNR is undefined for a scene without scatterers");
        double strongest = 0.0;
        for (const auto &s : prepared)
            strongest = std::max(strongest, std::norm(s.gain));
        const double signal = strongest * detail::active_power(schedule, params.code_length);
        cube.noise_power = signal / std::pow(10.0, *options.snr_db / 10.0);
    }

    const double pri = params.pri_s;
    const double k_phase = 2.0 * two_pi / params.wavelength_m();
    parallel_for(p_len, [&](std::size_t p) {
        std::span<Complex> column = cube.packet(p);
        const std::vector<Complex> &tx = schedule[p].samples;
        for (const auto &s : prepared)
        {
            const Vec3 pos = s.source->position_m + (static_cast<double>(p) * pri) * s.source->velocity_mps;
            const double phase = -k_phase * (norm(pos) - s.range0);
            const Complex weight = s.gain * std::polar(1.0, phase);
            for (std::size_t q = s.delay; q < q_len; ++q)
                column[q] += weight * tx[q - s.delay];
        }
        if (cube.noise_power > 0.0)
        {
            auto engine = make_engine(options.noise_seed, p);
            for (Complex &v : column)
                v += complex_normal(engine, cube.noise_power);
        }
    });
    return cube;
}

inline DataCube synthesize_echo(const FrameSchedule &schedule, const std::vector<TargetModel> &targets,
                                const WaveformParams &params, const EchoOptions &options = {})
{
    return synthesize_echo(schedule, std::span<const TargetModel>(targets), params, options);
}

} // namespace isac
