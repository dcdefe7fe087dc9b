#include "weatherwatt/synthgen.hpp"

#include "weatherwatt/errors.hpp"
#include "weatherwatt/kvconfig.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

namespace ww {

double SeededRng::uniform() {
    const std::uint64_t x = engine_();
    return static_cast<double>((x >> 11) + 1) * 0x1.0p-53;
}

double SeededRng::normal() {
    if (has_spare_) {
        has_spare_ = false;
        return spare_;
    }
    const double u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = r * std::sin(angle);
    has_spare_ = true;
    return r * std::cos(angle);
}

GeneratorSpec GeneratorSpec::defaults() {
    GeneratorSpec spec;
    spec.features = {
        {"atmospheric_pressure", 1015.0, 0.2, 2.0},
        {"dew_point_temperature", 9.0, 6.0, 1.0},
        {"rainfall", 1.2, 0.0, 0.4},
        {"relative_humidity", 58.0, 1.0, 7.0},
        {"wind_chill", 13.0, 6.0, 2.0},
    };
    spec.targets = {
        {"active_power", 240.0, {{"wind_chill", 2.5}}, 11.28860322, 0},
        {"reactive_power", 95.0, {{"wind_chill", 1.2}}, 3.976965159, 0},
    };
    return spec;
}

namespace {

const FeatureSpec* find_feature(const GeneratorSpec& spec, const std::string& name) {
    for (const auto& f : spec.features) {
        if (f.name == name) return &f;
    }
    return nullptr;
}

const TargetSpec* find_target(const GeneratorSpec& spec, const std::string& name) {
    for (const auto& t : spec.targets) {
        if (t.name == name) return &t;
    }
    return nullptr;
}

void validate(const GeneratorSpec& spec) {
    if (spec.n < 1) throw ConfigError("generator: n must be at least 1");
    if (spec.period_minutes < 1) throw ConfigError("generator: period_minutes must be positive");
    if (!(spec.gap_probability >= 0.0 && spec.gap_probability < 1.0)) {
        throw ConfigError("generator: gap_probability must be in [0, 1)");
    }
    if (!(spec.desync_probability >= 0.0 && spec.desync_probability <= 1.0)) {
        throw ConfigError("generator: desync_probability must be in [0, 1]");
    }
    if (spec.desync_probability > 0.0 && spec.period_minutes <= kDesyncMinutes) {
        // A desynced timestamp must still land strictly before the next
        // row, or the power stream stops being sorted.
        throw ConfigError("generator: period_minutes must exceed the desync offset");
    }
    if (spec.features.empty()) throw ConfigError("generator: at least one feature required");
    if (spec.targets.empty()) throw ConfigError("generator: at least one target required");
    for (std::size_t i = 0; i < spec.features.size(); ++i) {
        const auto& f = spec.features[i];
        if (f.name.empty()) throw ConfigError("generator: feature with empty name");
        if (f.noise < 0.0) throw ConfigError("generator: negative noise for feature '" + f.name + "'");
        for (std::size_t j = i + 1; j < spec.features.size(); ++j) {
            if (spec.features[j].name == f.name) {
                throw ConfigError("generator: duplicate feature '" + f.name + "'");
            }
        }
    }
    for (std::size_t i = 0; i < spec.targets.size(); ++i) {
        const auto& t = spec.targets[i];
        if (t.name.empty()) throw ConfigError("generator: target with empty name");
        if (t.noise < 0.0) throw ConfigError("generator: negative noise for target '" + t.name + "'");
        if (t.lag < 0) throw ConfigError("generator: negative lag for target '" + t.name + "'");
        if (static_cast<std::size_t>(t.lag) >= spec.n) {
            throw ConfigError("generator: lag for target '" + t.name + "' leaves no rows");
        }
        if (find_feature(spec, t.name) != nullptr) {
            throw ConfigError("generator: name '" + t.name + "' used for both feature and target");
        }
        for (std::size_t j = i + 1; j < spec.targets.size(); ++j) {
            if (spec.targets[j].name == t.name) {
                throw ConfigError("generator: duplicate target '" + t.name + "'");
            }
        }
        for (const auto& [fname, w] : t.weights) {
            (void)w;
            if (find_feature(spec, fname) == nullptr) {
                throw ConfigError("generator: target '" + t.name +
                                  "' weights unknown feature '" + fname + "'");
            }
        }
    }
}

FeatureSpec& feature_slot(GeneratorSpec& spec, const std::string& name) {
    for (auto& f : spec.features) {
        if (f.name == name) return f;
    }
    spec.features.push_back(FeatureSpec{name, 0.0, 0.0, 0.0});
    return spec.features.back();
}

TargetSpec& target_slot(GeneratorSpec& spec, const std::string& name) {
    for (auto& t : spec.targets) {
        if (t.name == name) return t;
    }
    spec.targets.push_back(TargetSpec{name, 0.0, {}, 0.0, 0});
    return spec.targets.back();
}

} // namespace

GeneratorSpec GeneratorSpec::from_file(const std::string& path) {
    GeneratorSpec spec;
    spec.features.clear();
    spec.targets.clear();
    for (const auto& [key, value] : parse_kv_file(path)) {
        if (key == "seed") {
            const long long s = kv_to_int(key, value);
            if (s < 0) throw ConfigError("generator: seed must be non-negative");
            spec.seed = static_cast<std::uint64_t>(s);
        } else if (key == "n") {
            const long long n = kv_to_int(key, value);
            if (n < 1) throw ConfigError("generator: n must be at least 1");
            spec.n = static_cast<std::size_t>(n);
        } else if (key == "period_minutes") {
            spec.period_minutes = static_cast<long>(kv_to_int(key, value));
        } else if (key == "start") {
            spec.start = Timestamp::parse(value);
        } else if (key == "gap_probability") {
            spec.gap_probability = kv_to_double(key, value);
        } else if (key == "desync_probability") {
            spec.desync_probability = kv_to_double(key, value);
        } else if (key.rfind("feature.", 0) == 0) {
            const std::string rest = key.substr(8);
            const auto dot = rest.rfind('.');
            if (dot == std::string::npos || dot == 0) {
                throw ConfigError("generator: malformed key '" + key + "'");
            }
            const std::string name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            FeatureSpec& f = feature_slot(spec, name);
            if (field == "base") f.base = kv_to_double(key, value);
            else if (field == "amplitude") f.amplitude = kv_to_double(key, value);
            else if (field == "noise") f.noise = kv_to_double(key, value);
            else throw ConfigError("generator: unknown feature field '" + field + "'");
        } else if (key.rfind("target.", 0) == 0) {
            const std::string rest = key.substr(7);
            const auto dot = rest.find('.');
            if (dot == std::string::npos || dot == 0) {
                throw ConfigError("generator: malformed key '" + key + "'");
            }
            const std::string name = rest.substr(0, dot);
            const std::string field = rest.substr(dot + 1);
            TargetSpec& t = target_slot(spec, name);
            if (field == "bias") t.bias = kv_to_double(key, value);
            else if (field == "noise") t.noise = kv_to_double(key, value);
            else if (field == "lag") t.lag = static_cast<long>(kv_to_int(key, value));
            else if (field.rfind("weight.", 0) == 0) {
                const std::string fname = field.substr(7);
                if (fname.empty()) throw ConfigError("generator: malformed key '" + key + "'");
                bool replaced = false;
                for (auto& [wname, w] : t.weights) {
                    if (wname == fname) {
                        w = kv_to_double(key, value);
                        replaced = true;
                        break;
                    }
                }
                if (!replaced) t.weights.emplace_back(fname, kv_to_double(key, value));
            } else {
                throw ConfigError("generator: unknown target field '" + field + "'");
            }
        } else {
            throw ConfigError("generator: unknown key '" + key + "'");
        }
    }
    validate(spec);
    return spec;
}

GeneratedData generate(const GeneratorSpec& spec) {
    validate(spec);
    SeededRng rng(spec.seed);

    const std::size_t nf = spec.features.size();
    const std::size_t nt = spec.targets.size();
    long max_lag = 0;
    for (const auto& t : spec.targets) max_lag = std::max(max_lag, t.lag);

    // Full per-row feature history; lagged targets read back into it.
    std::vector<std::vector<double>> history(spec.n, std::vector<double>(nf));

    std::vector<Timestamp> wts;
    std::vector<std::vector<double>> wcols(nf);
    std::vector<Timestamp> pts;
    std::vector<std::vector<double>> pcols(nt);

    constexpr double kMinutesPerDay = 1440.0;
    for (std::size_t i = 0; i < spec.n; ++i) {
        const double elapsed_min = static_cast<double>(i) * static_cast<double>(spec.period_minutes);
        const double diurnal = std::sin(2.0 * std::numbers::pi * elapsed_min / kMinutesPerDay);

        for (std::size_t j = 0; j < nf; ++j) {
            const auto& f = spec.features[j];
            history[i][j] = f.base + f.amplitude * diurnal + f.noise * rng.normal();
        }

        // Draw target noise, then the gap and desync uniforms, on every
        // row regardless of outcome so the stream layout never shifts.
        std::vector<double> target_vals(nt);
        for (std::size_t k = 0; k < nt; ++k) {
            const auto& t = spec.targets[k];
            const double eps = rng.normal();
            if (static_cast<long>(i) >= max_lag) {
                const auto& lagged = history[i - static_cast<std::size_t>(t.lag)];
                double v = t.bias;
                for (const auto& [fname, w] : t.weights) {
                    for (std::size_t j = 0; j < nf; ++j) {
                        if (spec.features[j].name == fname) {
                            v += w * lagged[j];
                            break;
                        }
                    }
                }
                target_vals[k] = v + t.noise * eps;
            }
        }

        const double u_gap = rng.uniform();
        const double u_desync = rng.uniform();
        if (u_gap < spec.gap_probability) continue;

        const Timestamp when =
            spec.start.plus_minutes(static_cast<long>(i) * spec.period_minutes);
        wts.push_back(when);
        for (std::size_t j = 0; j < nf; ++j) wcols[j].push_back(history[i][j]);

        if (static_cast<long>(i) >= max_lag) {
            pts.push_back(u_desync < spec.desync_probability ? when.plus_minutes(kDesyncMinutes)
                                                             : when);
            for (std::size_t k = 0; k < nt; ++k) pcols[k].push_back(target_vals[k]);
        }
    }

    std::vector<std::string> fnames;
    std::vector<ColumnRole> froles(nf, ColumnRole::feature);
    for (const auto& f : spec.features) fnames.push_back(f.name);
    std::vector<std::string> tnames;
    std::vector<ColumnRole> troles(nt, ColumnRole::target);
    for (const auto& t : spec.targets) tnames.push_back(t.name);

    GeneratedData out{
        TimeSeriesFrame::create(fnames, froles, std::move(wts), std::move(wcols)),
        TimeSeriesFrame::create(tnames, troles, std::move(pts), std::move(pcols)),
    };
    return out;
}

double population_single_cod(const GeneratorSpec& spec, const std::string& target,
                             const std::string& feature) {
    const TargetSpec* t = find_target(spec, target);
    if (t == nullptr) throw ConfigError("generator: unknown target '" + target + "'");
    const FeatureSpec* f = find_feature(spec, feature);
    if (f == nullptr) throw ConfigError("generator: unknown feature '" + feature + "'");

    constexpr double kMinutesPerDay = 1440.0;
    const double omega = 2.0 * std::numbers::pi / kMinutesPerDay;
    const double phase = omega * static_cast<double>(t->lag) *
                         static_cast<double>(spec.period_minutes);
    const double cos_lag = std::cos(phase);

    const double var_f = 0.5 * f->amplitude * f->amplitude + f->noise * f->noise;

    double weighted_amp = 0.0; // sum_j w_j a_j
    double noise_quad = 0.0;   // sum_j w_j^2 noise_j^2
    double w_feature = 0.0;    // weight on the queried feature, if any
    for (const auto& [fname, w] : t->weights) {
        const FeatureSpec* fj = find_feature(spec, fname);
        weighted_amp += w * fj->amplitude;
        noise_quad += w * w * fj->noise * fj->noise;
        if (fname == feature) w_feature = w;
    }
    const double var_t = 0.5 * weighted_amp * weighted_amp + noise_quad + t->noise * t->noise;

    double cov = 0.5 * cos_lag * f->amplitude * weighted_amp;
    if (t->lag == 0) cov += w_feature * f->noise * f->noise;

    if (var_f <= 0.0 || var_t <= 0.0) {
        throw DegenerateDataError("generator: zero-variance column has no defined correlation");
    }
    return (cov * cov) / (var_f * var_t);
}

} // namespace ww
