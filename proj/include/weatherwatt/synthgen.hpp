#pragma once

#include "weatherwatt/timeseries.hpp"
#include "weatherwatt/timestamp.hpp"

#include <cstdint>
#include <random>
#include <string>
#include <utility>
#include <vector>

namespace ww {

/// Deterministic draws from a fixed seed. The uniform maps the raw
/// 64-bit word through ((x >> 11) + 1) * 2^-53, giving (0, 1], so the
/// Box-Muller log never sees zero. The normal caches its spare.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    double uniform();
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// value(i) = base + amplitude * sin(2 pi elapsed_min / 1440) + noise * z
struct FeatureSpec {
    std::string name;
    double base = 0.0;
    double amplitude = 0.0;
    double noise = 0.0;
};

/// value(i) = bias + sum_j weight_j * feature_j(i - lag) + noise * z
struct TargetSpec {
    std::string name;
    double bias = 0.0;
    std::vector<std::pair<std::string, double>> weights;
    double noise = 0.0;
    long lag = 0;
};

struct GeneratorSpec {
    std::uint64_t seed = 42;
    std::size_t n = 2000;
    long period_minutes = 10;
    Timestamp start = Timestamp::parse("2017-03-01T00:00:00Z");
    double gap_probability = 0.01;
    double desync_probability = 0.05;
    std::vector<FeatureSpec> features;
    std::vector<TargetSpec> targets;

    /// Built-in scenario: five weather drivers, two power targets, both
    /// driven by wind chill plus independent noise.
    static GeneratorSpec defaults();

    /// key = value format with dotted keys: top-level scalars plus
    /// feature.<name>.base|amplitude|noise and
    /// target.<name>.bias|noise|lag|weight.<feature>.
    static GeneratorSpec from_file(const std::string& path);
};

struct GeneratedData {
    TimeSeriesFrame weather;
    TimeSeriesFrame power;
};

/// Expands the spec into a weather frame and a power frame. Gap rows
/// vanish from both streams; desynced rows keep their values but the
/// power timestamp slides forward by kDesyncMinutes.
inline constexpr long kDesyncMinutes = 5;
GeneratedData generate(const GeneratorSpec& spec);

/// Closed-form squared correlation between one feature column and one
/// target column implied by the spec, from the variance identities
/// Var(f) = a^2/2 + noise^2 and Cov(f_j, f_k) = a_j a_k / 2 (scaled by
/// cos(omega * lag * period) across a lag).
double population_single_cod(const GeneratorSpec& spec, const std::string& target,
                             const std::string& feature);

} // namespace ww
