#pragma once

#include "weatherwatt/selection.hpp"
#include "weatherwatt/timeseries.hpp"
#include "weatherwatt/timestamp.hpp"

#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace ww {

/// End-to-end experiment settings. Field defaults are the production
/// choices; a config file or CLI flags override them.
struct ExperimentConfig {
    std::string weather_path;
    std::string power_path;
    std::string roles_path;           // optional; otherwise roles come from the stream
    std::vector<std::string> targets; // empty means every target column
    long shift_minutes = 5;           // applied to the power stream before joining
    double sl = 0.05;
    double train_fraction = 0.8;
    long lag_max = 12;
    std::size_t jobs = 1;

    /// key = value file; relative input paths resolve against the
    /// config file's directory.
    static ExperimentConfig from_file(const std::string& path);
};

struct SeriesPoint {
    Timestamp when;
    double actual = 0.0;
    double predicted = 0.0;
};

struct TargetResult {
    std::string target;
    ScreeningReport screening;
    EliminationTrace trace;
    double r2_train = 0.0;
    double r2_test = 0.0; // may be negative on held-out data; reported as-is
    std::vector<SeriesPoint> series;
};

/// One growing feature set and its CoD on both splits (multi-variable
/// table row cell). Sets follow the screening ranking.
struct NestedCodEntry {
    std::vector<std::string> features;
    double cod_train = 0.0;
    double cod_test = 0.0;
};

struct ForecastReport {
    std::vector<TargetResult> targets;
    std::vector<std::vector<NestedCodEntry>> nested_cods; // parallel to targets
    std::size_t n_rows_joined = 0;
    std::size_t n_train = 0;
    std::size_t n_test = 0;
};

/// The ingestion stage alone: parse both streams, shift the power
/// timestamps, join on exact timestamps. Roles come from the config's
/// roles file, or default to weather=features, power=targets.
TimeSeriesFrame ingest_aligned(const ExperimentConfig& config,
                               ParseStats* weather_stats = nullptr,
                               ParseStats* power_stats = nullptr);

/// Ingests both streams, shifts the power timestamps, joins, screens on
/// the full aligned frame, then per target: chronological split,
/// backward elimination and final fit on train only, prediction and
/// CoD on the held-out tail. Deterministic for fixed config and inputs
/// regardless of the job count.
ForecastReport run_experiment(const ExperimentConfig& config);

/// The per-target training stage on an already-joined frame. Exposed so
/// callers can rerun the modelling without touching the filesystem.
TargetResult train_on_frame(const TimeSeriesFrame& aligned, const std::string& target,
                            double sl, double train_fraction);

/// Lag sweep of pearson_r(feature[i], target[i + k]) for k in
/// [0, lag_max]. best_lag maximizes |r|, ties to the smaller k.
struct LagScanResult {
    std::string feature;
    std::string target;
    std::vector<std::pair<long, double>> entries; // (lag_steps, pearson_r)
    long best_lag = 0;
    double median_row_minutes = 0.0; // converts lag steps to wall clock
};

LagScanResult lag_scan(const TimeSeriesFrame& frame, const std::string& feature,
                       const std::string& target, long lag_max);

/// Writes one series CSV (timestamp,actual,predicted) and one gnuplot
/// script per target under out_dir; returns the paths written.
std::vector<std::string> emit_plot_series(const ForecastReport& report,
                                          const std::string& out_dir);

/// Plain-text tables: single-variable CoD per (target, feature), and
/// the nested-set CoD progression. Targets are rows.
std::string render_tables(const ForecastReport& report);

} // namespace ww
