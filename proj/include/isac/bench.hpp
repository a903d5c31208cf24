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
#include <chrono>
#include <cstddef>
#include <vector>

namespace isac
{

struct TimingStats
{
    double median_s = 0.0;
    double min_s = 0.0;
    double max_s = 0.0;
    std::vector<double> samples_s;
};

/// Wall-clock seconds of one call.
template <typename Fn>
double time_once(Fn &&fn)
{
    const auto start = std::chrono::steady_clock::now();
    fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(stop - start).count();
}

/// Median of `repeats` timed calls after `warmup` untimed ones.
template <typename Fn>
TimingStats time_median(Fn &&fn, std::size_t repeats = 5, std::size_t warmup = 1)
{
    repeats = std::max<std::size_t>(repeats, 1);
    for (std::size_t i = 0; i < warmup; ++i)
        fn();
    TimingStats stats;
    for (std::size_t i = 0; i < repeats; ++i)
        stats.samples_s.push_back(time_once(fn));
    std::vector<double> sorted = stats.samples_s;
    std::sort(sorted.begin(), sorted.end());
    const std::size_t mid = sorted.size() / 2;
    stats.median_s = sorted.size() % 2 == 1 ? sorted[mid] : 0.5 * (sorted[mid - 1] + sorted[mid]);
    stats.min_s = sorted.front();
    stats.max_s = sorted.back();
    return stats;
}

} // namespace isac
