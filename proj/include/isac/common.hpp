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

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <numbers>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

namespace isac
{

using Complex = std::complex<double>;

inline constexpr double speed_of_light = 299792458.0;
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// ----- Errors -------------------------------------------------------------
// Every module error derives from isac::Error so the CLI can map families
// of failures onto exit codes.

struct Error : std::runtime_error
{
    using std::runtime_error::runtime_error;
};

/// Invalid radar / algorithm parameters.
struct ParameterError : Error
{
    using Error::Error;
};

/// Scene that cannot be simulated with the configured radar (range guard, velocity).
struct ScenarioError : Error
{
    using Error::Error;
};

/// Inconsistent processing inputs, e.g. a reference bank built for another cube.
struct ProcessingError : Error
{
    using Error::Error;
};

/// Non-finite samples handed to the quantizer.
struct DataError : Error
{
    using Error::Error;
};

/// Detection requested on a map without any energy.
struct NoDetectionError : Error
{
    using Error::Error;
};

/// The brute-force oracle refuses instances above its size guard.
struct RefusalError : Error
{
    using Error::Error;
};

// ----- Geometry -----------------------------------------------------------

struct Vec3
{
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;

    friend Vec3 operator+(const Vec3 &a, const Vec3 &b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
    friend Vec3 operator-(const Vec3 &a, const Vec3 &b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
    friend Vec3 operator*(double s, const Vec3 &v) { return {s * v.x, s * v.y, s * v.z}; }
    friend bool operator==(const Vec3 &, const Vec3 &) = default;
};

inline double dot(const Vec3 &a, const Vec3 &b) { return a.x * b.x + a.y * b.y + a.z * b.z; }
inline double norm(const Vec3 &v) { return std::sqrt(dot(v, v)); }

// ----- Deterministic random numbers --------------------------------------
// std::seed_seq and std::mt19937_64 are fully specified by the standard; the
// distributions are not, so the conversions to uniform/normal are done here.

inline std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t stream = 0)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
    return std::mt19937_64(seq);
}

/// Uniform double in [0, 1) with 53 random bits.
inline double uniform01(std::mt19937_64 &engine)
{
    return static_cast<double>(engine() >> 11) * 0x1.0p-53;
}

/// Circular complex Gaussian with E|z|^2 = power (Box-Muller).
inline Complex complex_normal(std::mt19937_64 &engine, double power)
{
    double u1 = uniform01(engine);
    const double u2 = uniform01(engine);
    if (u1 <= 0.0)
        u1 = 0x1.0p-53;
    const double radius = std::sqrt(-power * std::log(u1));
    return {radius * std::cos(two_pi * u2), radius * std::sin(two_pi * u2)};
}

// ----- Threading ----------------------------------------------------------

/// Worker count from ISAC_THREADS, falling back to the hardware concurrency.
inline unsigned thread_count()
{
    if (const char *env = std::getenv("ISAC_THREADS"))
    {
        const long n = std::strtol(env, nullptr, 10);
        if (n >= 1)
            return static_cast<unsigned>(n);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

/// Runs fn(i) for i in [0, n). Each index is handled by exactly one worker,
/// so results written per index do not depend on the thread schedule.
template <typename Fn>
void parallel_for(std::size_t n, Fn &&fn)
{
    const std::size_t workers = std::min<std::size_t>(thread_count(), n);
    if (workers <= 1)
    {
        for (std::size_t i = 0; i < n; ++i)
            fn(i);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w)
    {
        pool.emplace_back([&, w] {
            for (std::size_t i = w; i < n; i += workers)
                fn(i);
        });
    }
}

} // namespace isac
