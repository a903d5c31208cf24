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

// Scenario configuration: line-oriented `key = value` pairs under
// `[section]` headers, `#` or `;` comments. [radar] is mandatory (it may be
// empty, in which case the 60 GHz reference radar is used). [target] may
// appear several times; every occurrence adds one target. A key repeated
// inside one section instance keeps the last value and records a warning.

#include "isac/fxp.hpp"
#include "isac/rsp.hpp"
#include "isac/scene.hpp"
#include "isac/waveform.hpp"

#include <cstdio>
#include <map>
#include <sstream>
#include <string>
#include <string_view>
#include <variant>

namespace isac
{

struct ConfigError : Error
{
    ConfigError(std::size_t line_, std::string key_, const std::string &message)
        : Error(format(line_, key_, message)), line(line_), key(std::move(key_))
    {
    }

    std::size_t line;
    std::string key;

  private:
    static std::string format(std::size_t line, const std::string &key, const std::string &message)
    {
        std::string out = "config";
        if (line > 0)
            out += " line " + std::to_string(line);
        if (!key.empty())
            out += " (" + key + ")";
        return out + ": " + message;
    }
};

struct PointTargetSpec
{
    Vec3 position_m{12.0, 9.0, 0.0};
    std::optional<Vec3> velocity_mps; // explicit vector wins over speed
    double speed_mps = 0.0;           // radial, positive = receding
    double rcs_dbsm = 0.0;

    Vec3 velocity() const
    {
        if (velocity_mps)
            return *velocity_mps;
        const double r = norm(position_m);
        return r > 0.0 ? (speed_mps / r) * position_m : Vec3{};
    }
};

using TargetSpec = std::variant<PointTargetSpec, PedestrianSpec, CarSpec>;

struct ScenarioConfig
{
    WaveformParams radar = WaveformParams::table1();
    PathLoss path_loss = PathLoss::inverse_square;
    RangeGuard range_guard = RangeGuard::listening_window;
    std::vector<ScheduleKind> waveforms{std::begin(all_schedule_kinds), std::end(all_schedule_kinds)};
    std::vector<TargetSpec> targets;
    std::optional<double> snr_db;

    std::uint64_t code_seed = 7;
    std::uint64_t noise_seed = 1;
    std::uint64_t scene_seed = 1;

    std::size_t doppler_bins = 0; // 0: J = P, FFT-aligned
    std::size_t mainlobe_halfwidth = default_mainlobe_halfwidth;
    SteeringMethod steering = SteeringMethod::automatic;
    bool run_oracle = false;
    std::size_t oracle_limit = default_oracle_limit;

    bool fixed_point_enabled = false;
    std::vector<fxp::FixedPointFormat> formats{{16, 1}, {24, 1}, {32, 1}};
    fxp::Mode fixed_point_mode = fxp::Mode::full_chain;

    bool benchmark_enabled = false;
    std::size_t benchmark_repeats = 5;
    std::size_t benchmark_warmup = 1;

    std::string output_directory = "out";

    std::vector<std::string> warnings;

    DopplerGrid doppler_grid() const
    {
        return doppler_bins == 0 ? DopplerGrid::for_params(radar) : DopplerGrid::uniform(doppler_bins, radar.pri_s);
    }

    /// Concrete targets; pedestrian micro-motion seeds derive from scene_seed.
    std::vector<TargetModel> build_targets() const
    {
        std::vector<TargetModel> out;
        for (std::size_t i = 0; i < targets.size(); ++i)
        {
            std::visit(
                [&](const auto &spec) {
                    using T = std::decay_t<decltype(spec)>;
                    if constexpr (std::is_same_v<T, PointTargetSpec>)
                    {
                        out.push_back(make_point_target(spec.position_m, spec.velocity(), spec.rcs_dbsm));
                    }
                    else if constexpr (std::is_same_v<T, PedestrianSpec>)
                    {
                        PedestrianSpec seeded = spec;
                        seeded.seed = scene_seed + i;
                        out.push_back(make_pedestrian(seeded));
                    }
                    else
                    {
                        out.push_back(make_car(spec));
                    }
                },
                targets[i]);
        }
        return out;
    }
};

enum class Preset
{
    table1,
    ci,
};

inline void apply_preset(ScenarioConfig &config, Preset preset)
{
    config.radar.cpi_s = preset == Preset::table1 ? WaveformParams::table1().cpi_s : WaveformParams::ci().cpi_s;
}

namespace detail
{

inline std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

inline std::vector<std::string> split_list(std::string_view s)
{
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start <= s.size())
    {
        const auto comma = s.find(',', start);
        const auto item = trim(s.substr(start, comma == std::string_view::npos ? s.npos : comma - start));
        if (!item.empty())
            out.emplace_back(item);
        if (comma == std::string_view::npos)
            break;
        start = comma + 1;
    }
    return out;
}

inline std::string format_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Entry
{
    std::string value;
    std::size_t line = 0;
};

struct Section
{
    std::string name;
    std::size_t line = 0;
    std::map<std::string, Entry> entries;
};

class SectionReader
{
  public:
    explicit SectionReader(const Section &section) : section_(section) {}

    bool has(const std::string &key) const { return section_.entries.count(key) != 0; }

    std::optional<Entry> take(const std::string &key)
    {
        used_.push_back(key);
        const auto it = section_.entries.find(key);
        if (it == section_.entries.end())
            return std::nullopt;
        return it->second;
    }

    double number(const std::string &key, double fallback)
    {
        const auto e = take(key);
        return e ? parse_number(*e, key) : fallback;
    }

    double positive(const std::string &key, double fallback)
    {
        const auto e = take(key);
        if (!e)
            return fallback;
        const double v = parse_number(*e, key);
        if (!(v > 0.0))
            throw ConfigError(e->line, key, "must be positive, got " + e->value);
        return v;
    }

    std::uint64_t integer(const std::string &key, std::uint64_t fallback, std::uint64_t min = 0,
                          std::uint64_t max = UINT64_MAX)
    {
        const auto e = take(key);
        if (!e)
            return fallback;
        const std::string &s = e->value;
        if (s.empty() || s.find_first_not_of("0123456789") != std::string::npos)
            throw ConfigError(e->line, key, "expected a non-negative integer, got '" + s + "'");
        std::uint64_t v = 0;
        try
        {
            v = std::stoull(s);
        }
        catch (const std::exception &)
        {
            throw ConfigError(e->line, key, "integer out of range: " + s);
        }
        if (v < min || v > max)
            throw ConfigError(e->line, key,
                              "value " + s + " outside [" + std::to_string(min) + ", " + std::to_string(max) + "]");
        return v;
    }

    bool boolean(const std::string &key, bool fallback)
    {
        const auto e = take(key);
        if (!e)
            return fallback;
        if (e->value == "true" || e->value == "yes" || e->value == "on" || e->value == "1")
            return true;
        if (e->value == "false" || e->value == "no" || e->value == "off" || e->value == "0")
            return false;
        throw ConfigError(e->line, key, "expected true/false, got '" + e->value + "'");
    }

    Vec3 vector(const std::string &key, const Vec3 &fallback)
    {
        const auto e = take(key);
        return e ? parse_vector(*e, key) : fallback;
    }

    static Vec3 parse_vector(const Entry &e, const std::string &key)
    {
        const auto parts = split_list(e.value);
        if (parts.size() != 3)
            throw ConfigError(e.line, key, "expected three comma-separated numbers");
        return {parse_number({parts[0], e.line}, key), parse_number({parts[1], e.line}, key),
                parse_number({parts[2], e.line}, key)};
    }

    static double parse_number(const Entry &e, const std::string &key)
    {
        const std::string &s = e.value;
        char *end = nullptr;
        const double v = std::strtod(s.c_str(), &end);
        if (s.empty() || end != s.c_str() + s.size() || !std::isfinite(v))
            throw ConfigError(e.line, key, "expected a finite number, got '" + s + "'");
        return v;
    }

    /// Rejects keys that no reader asked for.
    void finish() const
    {
        for (const auto &[key, entry] : section_.entries)
            if (std::find(used_.begin(), used_.end(), key) == used_.end())
                throw ConfigError(entry.line, key, "unknown key in [" + section_.name + "]");
    }

  private:
    const Section &section_;
    std::vector<std::string> used_;
};

inline const char *format_bool(bool v) { return v ? "true" : "false"; }

inline std::string steering_name(SteeringMethod m)
{
    switch (m)
    {
    case SteeringMethod::automatic: return "auto";
    case SteeringMethod::direct: return "direct";
    case SteeringMethod::slow_time_fft: return "slow_time_fft";
    }
    return "auto";
}

inline std::string vector_text(const Vec3 &v)
{
    return format_double(v.x) + ", " + format_double(v.y) + ", " + format_double(v.z);
}

} // namespace detail

inline std::vector<ScheduleKind> parse_waveform_list(std::string_view text, std::size_t line = 0)
{
    std::vector<ScheduleKind> out;
    for (const std::string &name : detail::split_list(text))
    {
        const auto kind = parse_schedule_kind(name);
        if (!kind)
            throw ConfigError(line, "kinds", "unknown waveform '" + name + "' (fmcw, pmcw, golay_standard, golay_dr)");
        if (std::find(out.begin(), out.end(), *kind) == out.end())
            out.push_back(*kind);
    }
    if (out.empty())
        throw ConfigError(line, "kinds", "at least one waveform is required");
    return out;
}

inline fxp::FixedPointFormat parse_format(const std::string &text, std::size_t line)
{
    const auto colon = text.find(':');
    try
    {
        if (colon == std::string::npos)
            throw std::invalid_argument("no colon");
        fxp::FixedPointFormat f{std::stoi(text.substr(0, colon)), std::stoi(text.substr(colon + 1))};
        f.validate();
        return f;
    }
    catch (const ParameterError &e)
    {
        throw ConfigError(line, "formats", e.what());
    }
    catch (const std::exception &)
    {
        throw ConfigError(line, "formats", "expected W:I, got '" + text + "'");
    }
}

inline ScenarioConfig parse_config(std::string_view text)
{
    std::vector<detail::Section> sections;
    std::vector<std::string> warnings;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size())
    {
        const auto nl = text.find('\n', pos);
        std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.npos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;

        const auto comment = raw.find_first_of("#;");
        const std::string_view line = detail::trim(raw.substr(0, comment));
        if (line.empty())
            continue;
        if (line.front() == '[')
        {
            if (line.back() != ']')
                throw ConfigError(line_no, "", "malformed section header");
            const std::string name(detail::trim(line.substr(1, line.size() - 2)));
            static const std::vector<std::string> known{"radar",      "waveforms", "noise",       "seeds",
                                                        "doppler",    "processing", "target",     "fixed_point",
                                                        "benchmark", "output"};
            if (std::find(known.begin(), known.end(), name) == known.end())
                throw ConfigError(line_no, "", "unknown section [" + name + "]");
            if (name != "target")
                for (const auto &s : sections)
                    if (s.name == name)
                        throw ConfigError(line_no, "", "section [" + name + "] appears twice");
            sections.push_back({name, line_no, {}});
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw ConfigError(line_no, "", "expected key = value");
        if (sections.empty())
            throw ConfigError(line_no, std::string(detail::trim(line.substr(0, eq))), "key outside of any section");
        const std::string key(detail::trim(line.substr(0, eq)));
        const std::string value(detail::trim(line.substr(eq + 1)));
        if (key.empty())
            throw ConfigError(line_no, "", "empty key");
        auto &entries = sections.back().entries;
        if (const auto it = entries.find(key); it != entries.end())
            warnings.push_back("line " + std::to_string(line_no) + ": duplicate key '" + key + "' in [" +
                               sections.back().name + "] (first on line " + std::to_string(it->second.line) +
                               "); last value wins");
        entries[key] = {value, line_no};
    }

    auto find = [&](const std::string &name) -> const detail::Section * {
        for (const auto &s : sections)
            if (s.name == name)
                return &s;
        return nullptr;
    };

    ScenarioConfig cfg;
    cfg.warnings = warnings;
    const detail::Section *radar = find("radar");
    if (!radar)
        throw ConfigError(0, "", "missing mandatory section [radar]");
    {
        detail::SectionReader r(*radar);
        WaveformParams &p = cfg.radar;
        p.carrier_freq_hz = r.positive("carrier_freq_hz", p.carrier_freq_hz);
        p.bandwidth_hz = r.positive("bandwidth_hz", p.bandwidth_hz);
        p.pri_s = r.positive("pri_s", p.pri_s);
        p.cpi_s = r.positive("cpi_s", p.cpi_s);
        p.code_length = r.integer("code_length", p.code_length, 1);
        p.amplitude = r.positive("amplitude", p.amplitude);
        if (auto e = r.take("pulse_shape"))
        {
            if (e->value == "identity")
                p.pulse_shape = PulseShape::identity;
            else if (e->value == "raised_cosine")
                p.pulse_shape = PulseShape::raised_cosine;
            else
                throw ConfigError(e->line, "pulse_shape", "expected identity or raised_cosine");
        }
        if (auto e = r.take("rolloff"))
        {
            p.rolloff = detail::SectionReader::parse_number(*e, "rolloff");
            if (!(p.rolloff > 0.0 && p.rolloff <= 1.0))
                throw ConfigError(e->line, "rolloff", "must be in (0, 1]");
        }
        if (auto e = r.take("path_loss"))
        {
            if (e->value == "off")
                cfg.path_loss = PathLoss::off;
            else if (e->value == "inverse_square")
                cfg.path_loss = PathLoss::inverse_square;
            else
                throw ConfigError(e->line, "path_loss", "expected off or inverse_square");
        }
        if (auto e = r.take("range_guard"))
        {
            if (e->value == "listening_window")
                cfg.range_guard = RangeGuard::listening_window;
            else if (e->value == "full_pri")
                cfg.range_guard = RangeGuard::full_pri;
            else
                throw ConfigError(e->line, "range_guard", "expected listening_window or full_pri");
        }
        r.finish();
        try
        {
            p.validate();
        }
        catch (const ParameterError &e)
        {
            const auto line = radar->entries.count("code_length") ? radar->entries.at("code_length").line
                                                                  : radar->line;
            throw ConfigError(line, "code_length", e.what());
        }
    }

    if (const auto *s = find("waveforms"))
    {
        detail::SectionReader r(*s);
        if (auto e = r.take("kinds"))
            cfg.waveforms = parse_waveform_list(e->value, e->line);
        r.finish();
    }

    if (const auto *s = find("noise"))
    {
        detail::SectionReader r(*s);
        if (auto e = r.take("snr_db"))
        {
            if (e->value == "off")
                cfg.snr_db.reset();
            else
                cfg.snr_db = detail::SectionReader::parse_number(*e, "snr_db");
        }
        r.finish();
    }

    if (const auto *s = find("seeds"))
    {
        detail::SectionReader r(*s);
        cfg.code_seed = r.integer("code", cfg.code_seed);
        cfg.noise_seed = r.integer("noise", cfg.noise_seed);
        cfg.scene_seed = r.integer("scene", cfg.scene_seed);
        r.finish();
    }

    if (const auto *s = find("doppler"))
    {
        detail::SectionReader r(*s);
        cfg.doppler_bins = r.integer("bins", cfg.doppler_bins, 0, 1u << 20);
        r.finish();
    }

    if (const auto *s = find("processing"))
    {
        detail::SectionReader r(*s);
        cfg.mainlobe_halfwidth = r.integer("mainlobe_halfwidth", cfg.mainlobe_halfwidth, 0, 1u << 20);
        cfg.run_oracle = r.boolean("oracle", cfg.run_oracle);
        cfg.oracle_limit = r.integer("oracle_limit", cfg.oracle_limit, 1);
        if (auto e = r.take("steering"))
        {
            if (e->value == "auto")
                cfg.steering = SteeringMethod::automatic;
            else if (e->value == "direct")
                cfg.steering = SteeringMethod::direct;
            else if (e->value == "slow_time_fft")
                cfg.steering = SteeringMethod::slow_time_fft;
            else
                throw ConfigError(e->line, "steering", "expected auto, direct or slow_time_fft");
        }
        r.finish();
    }

    for (const auto &s : sections)
    {
        if (s.name != "target")
            continue;
        detail::SectionReader r(s);
        const auto type = r.take("type");
        if (!type)
            throw ConfigError(s.line, "type", "[target] needs a type (point, pedestrian, car)");
        if (type->value == "point")
        {
            PointTargetSpec t;
            t.position_m = r.vector("position", t.position_m);
            if (auto e = r.take("velocity"))
                t.velocity_mps = detail::SectionReader::parse_vector(*e, "velocity");
            t.speed_mps = r.number("speed", t.speed_mps);
            t.rcs_dbsm = r.number("rcs_dbsm", t.rcs_dbsm);
            cfg.targets.emplace_back(t);
        }
        else if (type->value == "pedestrian")
        {
            PedestrianSpec t;
            t.center_m = r.vector("position", t.center_m);
            t.speed_mps = r.number("speed", t.speed_mps);
            t.rcs_dbsm = r.number("rcs_dbsm", t.rcs_dbsm);
            if (auto e = r.take("micro_motion"))
            {
                t.micro_motion_mps = detail::SectionReader::parse_number(*e, "micro_motion");
                if (t.micro_motion_mps < 0.0)
                    throw ConfigError(e->line, "micro_motion", "must be >= 0");
            }
            cfg.targets.emplace_back(t);
        }
        else if (type->value == "car")
        {
            CarSpec t;
            t.center_m = r.vector("position", t.center_m);
            t.speed_mps = r.number("speed", t.speed_mps);
            t.rcs_dbsm = r.number("rcs_dbsm", t.rcs_dbsm);
            t.scatterer_count = r.integer("scatterers", t.scatterer_count, 1, 100000);
            t.length_m = r.positive("length_m", t.length_m);
            t.width_m = r.positive("width_m", t.width_m);
            cfg.targets.emplace_back(t);
        }
        else
        {
            throw ConfigError(type->line, "type", "unknown target type '" + type->value + "'");
        }
        r.finish();
    }

    if (const auto *s = find("fixed_point"))
    {
        detail::SectionReader r(*s);
        cfg.fixed_point_enabled = r.boolean("enabled", true);
        if (auto e = r.take("formats"))
        {
            cfg.formats.clear();
            for (const std::string &item : detail::split_list(e->value))
                cfg.formats.push_back(parse_format(item, e->line));
            if (cfg.formats.empty())
                throw ConfigError(e->line, "formats", "at least one format is required");
        }
        if (auto e = r.take("mode"))
        {
            if (e->value == "full_chain")
                cfg.fixed_point_mode = fxp::Mode::full_chain;
            else if (e->value == "core_only")
                cfg.fixed_point_mode = fxp::Mode::core_only;
            else
                throw ConfigError(e->line, "mode", "expected full_chain or core_only");
        }
        r.finish();
    }

    if (const auto *s = find("benchmark"))
    {
        detail::SectionReader r(*s);
        cfg.benchmark_enabled = r.boolean("enabled", true);
        cfg.benchmark_repeats = r.integer("repeats", cfg.benchmark_repeats, 1, 1000);
        cfg.benchmark_warmup = r.integer("warmup", cfg.benchmark_warmup, 0, 1000);
        r.finish();
    }

    if (const auto *s = find("output"))
    {
        detail::SectionReader r(*s);
        if (auto e = r.take("directory"))
        {
            if (e->value.empty())
                throw ConfigError(e->line, "directory", "must not be empty");
            cfg.output_directory = e->value;
        }
        r.finish();
    }
    return cfg;
}

/// Canonical text form; parse_config(serialize_config(c)) reproduces c.
inline std::string serialize_config(const ScenarioConfig &cfg)
{
    using detail::format_double;
    std::ostringstream os;
    const WaveformParams &p = cfg.radar;
    os << "[radar]\n"
       << "carrier_freq_hz = " << format_double(p.carrier_freq_hz) << "\n"
       << "bandwidth_hz = " << format_double(p.bandwidth_hz) << "\n"
       << "pri_s = " << format_double(p.pri_s) << "\n"
       << "cpi_s = " << format_double(p.cpi_s) << "\n"
       << "code_length = " << p.code_length << "\n"
       << "amplitude = " << format_double(p.amplitude) << "\n"
       << "pulse_shape = " << (p.pulse_shape == PulseShape::identity ? "identity" : "raised_cosine") << "\n"
       << "rolloff = " << format_double(p.rolloff) << "\n"
       << "path_loss = " << (cfg.path_loss == PathLoss::off ? "off" : "inverse_square") << "\n"
       << "range_guard = " << (cfg.range_guard == RangeGuard::listening_window ? "listening_window" : "full_pri")
       << "\n\n[waveforms]\nkinds = ";
    for (std::size_t i = 0; i < cfg.waveforms.size(); ++i)
        os << (i ? ", " : "") << to_string(cfg.waveforms[i]);
    os << "\n\n[noise]\nsnr_db = " << (cfg.snr_db ? format_double(*cfg.snr_db) : std::string("off")) << "\n\n"
       << "[seeds]\ncode = " << cfg.code_seed << "\nnoise = " << cfg.noise_seed << "\nscene = " << cfg.scene_seed
       << "\n\n[doppler]\nbins = " << cfg.doppler_bins << "\n\n"
       << "[processing]\nmainlobe_halfwidth = " << cfg.mainlobe_halfwidth
       << "\noracle = " << detail::format_bool(cfg.run_oracle) << "\noracle_limit = " << cfg.oracle_limit
       << "\nsteering = " << detail::steering_name(cfg.steering) << "\n";
    for (const TargetSpec &target : cfg.targets)
    {
        os << "\n[target]\n";
        std::visit(
            [&](const auto &t) {
                using T = std::decay_t<decltype(t)>;
                if constexpr (std::is_same_v<T, PointTargetSpec>)
                {
                    os << "type = point\nposition = " << detail::vector_text(t.position_m) << "\n";
                    if (t.velocity_mps)
                        os << "velocity = " << detail::vector_text(*t.velocity_mps) << "\n";
                    os << "speed = " << format_double(t.speed_mps) << "\n";
                }
                else if constexpr (std::is_same_v<T, PedestrianSpec>)
                {
                    os << "type = pedestrian\nposition = " << detail::vector_text(t.center_m) << "\n"
                       << "speed = " << format_double(t.speed_mps) << "\n"
                       << "micro_motion = " << format_double(t.micro_motion_mps) << "\n";
                }
                else
                {
                    os << "type = car\nposition = " << detail::vector_text(t.center_m) << "\n"
                       << "speed = " << format_double(t.speed_mps) << "\n"
                       << "scatterers = " << t.scatterer_count << "\n"
                       << "length_m = " << format_double(t.length_m) << "\n"
                       << "width_m = " << format_double(t.width_m) << "\n";
                }
                os << "rcs_dbsm = " << format_double(t.rcs_dbsm) << "\n";
            },
            target);
    }
    os << "\n[fixed_point]\nenabled = " << detail::format_bool(cfg.fixed_point_enabled) << "\nformats = ";
    for (std::size_t i = 0; i < cfg.formats.size(); ++i)
        os << (i ? ", " : "") << cfg.formats[i].to_string();
    os << "\nmode = " << fxp::to_string(cfg.fixed_point_mode) << "\n\n"
       << "[benchmark]\nenabled = " << detail::format_bool(cfg.benchmark_enabled)
       << "\nrepeats = " << cfg.benchmark_repeats << "\nwarmup = " << cfg.benchmark_warmup << "\n\n"
       << "[output]\ndirectory = " << cfg.output_directory << "\n";
    return os.str();
}

} // namespace isac
