#include "weatherwatt/pipeline.hpp"

#include "weatherwatt/errors.hpp"
#include "weatherwatt/kvconfig.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <thread>

namespace ww {

namespace {

namespace fs = std::filesystem;

std::string resolve_against(const fs::path& base_dir, const std::string& path) {
    if (path.empty()) return path;
    fs::path p(path);
    if (p.is_absolute()) return p.string();
    return (base_dir / p).lexically_normal().string();
}

void validate(const ExperimentConfig& config) {
    if (config.weather_path.empty()) throw ConfigError("experiment: weather path not set");
    if (config.power_path.empty()) throw ConfigError("experiment: power path not set");
    if (!(config.sl > 0.0 && config.sl < 1.0)) {
        throw ConfigError("experiment: sl must be in (0, 1)");
    }
    if (!(config.train_fraction > 0.0 && config.train_fraction < 1.0)) {
        throw ConfigError("experiment: train_fraction must be in (0, 1)");
    }
    if (config.lag_max < 0) throw ConfigError("experiment: lag_max must be non-negative");
    if (config.jobs < 1) throw ConfigError("experiment: jobs must be at least 1");
}

/// Header-only peek so role maps can be inferred without a roles file.
std::vector<std::string> read_csv_header(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open '" + path + "'");
    std::string line;
    if (!std::getline(in, line)) throw IngestError("'" + path + "' is empty");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream row(line);
    while (std::getline(row, cell, ',')) {
        const auto first = cell.find_first_not_of(" \t");
        const auto last = cell.find_last_not_of(" \t");
        cells.push_back(first == std::string::npos ? "" : cell.substr(first, last - first + 1));
    }
    return cells;
}

RoleMap infer_roles(const ExperimentConfig& config) {
    RoleMap roles;
    for (const auto& name : read_csv_header(config.weather_path)) {
        if (name != "timestamp") roles[name] = ColumnRole::feature;
    }
    for (const auto& name : read_csv_header(config.power_path)) {
        if (name == "timestamp") continue;
        if (roles.count(name) != 0) {
            throw IngestError("column '" + name + "' appears in both input streams");
        }
        roles[name] = ColumnRole::target;
    }
    return roles;
}

struct TargetOutcome {
    TargetResult result;
    std::vector<NestedCodEntry> nested;
};

std::vector<double> predict_on_frame(const FittedModel& model, const TimeSeriesFrame& frame) {
    Matrix features(frame.n_rows(), model.feature_names.size());
    for (std::size_t j = 0; j < model.feature_names.size(); ++j) {
        const auto& col = frame.column(model.feature_names[j]);
        for (std::size_t i = 0; i < frame.n_rows(); ++i) features(i, j) = col[i];
    }
    return predict(model, features);
}

TargetOutcome run_target(const TimeSeriesFrame& aligned, const std::string& target,
                         double sl, double train_fraction) {
    TargetOutcome out;
    TargetResult& result = out.result;
    result.target = target;
    result.screening = screen_single(aligned, target);

    auto [train, test] = split_chronological(aligned, train_fraction);

    // Constant columns are collinear with the bias column, so they stay
    // out of the elimination start set; screening already flagged them.
    std::vector<std::string> ranked;
    for (const auto& e : result.screening.entries) {
        if (!e.degenerate) ranked.push_back(e.feature_name);
    }
    if (ranked.empty()) {
        throw DegenerateDataError("experiment: every feature column is constant");
    }

    // Elimination starts from the full feature set in frame order, not
    // screening order, so column-index tie-breaks follow the input.
    std::vector<std::string> start;
    for (const auto& name : aligned.feature_names()) {
        if (std::find(ranked.begin(), ranked.end(), name) != ranked.end()) {
            start.push_back(name);
        }
    }

    const auto& y_train = train.column(target);
    result.trace = backward_eliminate(DesignMatrix::from_frame(train, start), y_train, sl);
    result.r2_train = result.trace.final_model.r2_train;

    const auto& y_test = test.column(target);
    const std::vector<double> y_pred = predict_on_frame(result.trace.final_model, test);
    result.r2_test = r_squared(y_test, y_pred);

    result.series.reserve(test.n_rows());
    for (std::size_t i = 0; i < test.n_rows(); ++i) {
        result.series.push_back(SeriesPoint{test.timestamps()[i], y_test[i], y_pred[i]});
    }

    // Growing feature sets in screening-rank order, starting from the
    // top pair when at least two features are usable.
    const std::size_t first_size = std::min<std::size_t>(2, ranked.size());
    for (std::size_t k = first_size; k <= ranked.size(); ++k) {
        std::vector<std::string> subset(ranked.begin(),
                                        ranked.begin() + static_cast<std::ptrdiff_t>(k));
        NestedCodEntry entry;
        entry.features = subset;
        try {
            const FittedModel m = fit(DesignMatrix::from_frame(train, subset), y_train);
            entry.cod_train = m.r2_train;
            entry.cod_test = r_squared(y_test, predict_on_frame(m, test));
        } catch (const SingularMatrixError& e) {
            std::cerr << "warning: skipping nested sets from " << k
                      << " features for '" << target << "': " << e.what() << "\n";
            break;
        }
        out.nested.push_back(std::move(entry));
    }
    return out;
}

} // namespace

ExperimentConfig ExperimentConfig::from_file(const std::string& path) {
    ExperimentConfig config;
    const fs::path base_dir = fs::path(path).parent_path();
    for (const auto& [key, value] : parse_kv_file(path)) {
        if (key == "weather") {
            config.weather_path = resolve_against(base_dir, value);
        } else if (key == "power") {
            config.power_path = resolve_against(base_dir, value);
        } else if (key == "roles") {
            config.roles_path = resolve_against(base_dir, value);
        } else if (key == "targets") {
            config.targets = split_csv_list(value);
        } else if (key == "shift_minutes") {
            config.shift_minutes = static_cast<long>(kv_to_int(key, value));
        } else if (key == "sl") {
            config.sl = kv_to_double(key, value);
        } else if (key == "train_fraction") {
            config.train_fraction = kv_to_double(key, value);
        } else if (key == "lag_max") {
            config.lag_max = static_cast<long>(kv_to_int(key, value));
        } else if (key == "jobs") {
            const long long jobs = kv_to_int(key, value);
            if (jobs < 1) throw ConfigError("experiment: jobs must be at least 1");
            config.jobs = static_cast<std::size_t>(jobs);
        } else {
            throw ConfigError("experiment: unknown key '" + key + "'");
        }
    }
    return config;
}

TargetResult train_on_frame(const TimeSeriesFrame& aligned, const std::string& target,
                            double sl, double train_fraction) {
    return run_target(aligned, target, sl, train_fraction).result;
}

TimeSeriesFrame ingest_aligned(const ExperimentConfig& config, ParseStats* weather_stats,
                               ParseStats* power_stats) {
    if (config.weather_path.empty()) throw ConfigError("experiment: weather path not set");
    if (config.power_path.empty()) throw ConfigError("experiment: power path not set");
    const RoleMap roles = config.roles_path.empty() ? infer_roles(config)
                                                    : parse_roles_file(config.roles_path);
    const TimeSeriesFrame weather = parse_csv(config.weather_path, roles, weather_stats);
    TimeSeriesFrame power = parse_csv(config.power_path, roles, power_stats);
    if (config.shift_minutes != 0) {
        power = shift_timestamps(power, static_cast<int>(config.shift_minutes));
    }
    return align_join(weather, power);
}

ForecastReport run_experiment(const ExperimentConfig& config) {
    validate(config);

    const TimeSeriesFrame aligned = ingest_aligned(config);
    if (aligned.empty()) {
        throw IngestError("experiment: aligned frame is empty (no shared timestamps)");
    }

    std::vector<std::string> targets = config.targets;
    if (targets.empty()) targets = aligned.target_names();
    if (targets.empty()) throw ConfigError("experiment: no target columns found");
    for (const auto& t : targets) {
        if (!aligned.has_column(t) || aligned.role(t) != ColumnRole::target) {
            throw ConfigError("experiment: '" + t + "' is not a target column");
        }
    }

    // Per-target work is independent; results land in their slot so the
    // assembled report is identical for any job count.
    std::vector<TargetOutcome> outcomes(targets.size());
    std::vector<std::exception_ptr> failures(targets.size());
    const std::size_t workers = std::min(std::max<std::size_t>(config.jobs, 1), targets.size());
    if (workers <= 1) {
        for (std::size_t i = 0; i < targets.size(); ++i) {
            outcomes[i] = run_target(aligned, targets[i], config.sl, config.train_fraction);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        pool.reserve(workers);
        for (std::size_t w = 0; w < workers; ++w) {
            pool.emplace_back([&] {
                while (true) {
                    const std::size_t i = next.fetch_add(1);
                    if (i >= targets.size()) return;
                    try {
                        outcomes[i] =
                            run_target(aligned, targets[i], config.sl, config.train_fraction);
                    } catch (...) {
                        failures[i] = std::current_exception();
                    }
                }
            });
        }
        for (auto& t : pool) t.join();
        for (const auto& failure : failures) {
            if (failure) std::rethrow_exception(failure);
        }
    }

    ForecastReport report;
    report.n_rows_joined = aligned.n_rows();
    const auto [train, test] = split_chronological(aligned, config.train_fraction);
    report.n_train = train.n_rows();
    report.n_test = test.n_rows();
    for (auto& outcome : outcomes) {
        report.targets.push_back(std::move(outcome.result));
        report.nested_cods.push_back(std::move(outcome.nested));
    }
    return report;
}

LagScanResult lag_scan(const TimeSeriesFrame& frame, const std::string& feature,
                       const std::string& target, long lag_max) {
    if (lag_max < 0) throw ConfigError("lag_scan: lag_max must be non-negative");
    if (!frame.has_column(feature)) throw ConfigError("lag_scan: unknown column '" + feature + "'");
    if (!frame.has_column(target)) throw ConfigError("lag_scan: unknown column '" + target + "'");
    const std::size_t n = frame.n_rows();
    if (n < static_cast<std::size_t>(lag_max) + 2) {
        throw DimensionError("lag_scan: need at least lag_max + 2 rows");
    }

    const auto& x = frame.column(feature);
    const auto& y = frame.column(target);

    LagScanResult result;
    result.feature = feature;
    result.target = target;
    for (long k = 0; k <= lag_max; ++k) {
        // Overlap window: feature rows [0, n-k) against target rows
        // [k, n), i.e. the target k steps later.
        const std::size_t len = n - static_cast<std::size_t>(k);
        std::vector<double> xs(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len));
        std::vector<double> ys(y.begin() + static_cast<std::ptrdiff_t>(k), y.end());
        result.entries.emplace_back(k, pearson_r(xs, ys));
    }

    double best = -1.0;
    for (const auto& [k, r] : result.entries) {
        if (std::fabs(r) > best) {
            best = std::fabs(r);
            result.best_lag = k;
        }
    }

    std::vector<double> deltas;
    deltas.reserve(n - 1);
    for (std::size_t i = 1; i < n; ++i) {
        deltas.push_back(static_cast<double>(frame.timestamps()[i].seconds() -
                                             frame.timestamps()[i - 1].seconds()));
    }
    std::sort(deltas.begin(), deltas.end());
    const std::size_t mid = deltas.size() / 2;
    const double median_seconds = deltas.size() % 2 == 1
                                      ? deltas[mid]
                                      : 0.5 * (deltas[mid - 1] + deltas[mid]);
    result.median_row_minutes = median_seconds / 60.0;
    return result;
}

std::vector<std::string> emit_plot_series(const ForecastReport& report,
                                          const std::string& out_dir) {
    if (report.targets.empty()) throw ConfigError("plot series: report has no targets");
    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) throw IngestError("cannot create directory '" + out_dir + "': " + ec.message());

    std::vector<std::string> written;
    for (const auto& t : report.targets) {
        const fs::path csv_path = fs::path(out_dir) / ("forecast_" + t.target + ".csv");
        std::ostringstream csv;
        csv << "timestamp,actual,predicted\n";
        char buf[64];
        for (const auto& p : t.series) {
            std::snprintf(buf, sizeof(buf), "%.17g,%.17g", p.actual, p.predicted);
            csv << p.when.to_string() << ',' << buf << "\n";
        }
        std::ofstream csv_out(csv_path, std::ios::binary | std::ios::trunc);
        if (!csv_out || !(csv_out << csv.str()).flush()) {
            throw IngestError("cannot write '" + csv_path.string() + "'");
        }
        written.push_back(csv_path.string());

        const fs::path gp_path = fs::path(out_dir) / ("forecast_" + t.target + ".gp");
        std::ostringstream gp;
        gp << "set datafile separator \",\"\n"
           << "set xdata time\n"
           << "set timefmt \"%Y-%m-%dT%H:%M:%SZ\"\n"
           << "set format x \"%m-%d %H:%M\"\n"
           << "set title \"" << t.target << " forecast\"\n"
           << "set ylabel \"" << t.target << "\"\n"
           << "set key left top\n"
           << "plot \"" << csv_path.filename().string()
           << "\" using 1:2 with lines title \"actual\", \\\n"
           << "     \"" << csv_path.filename().string()
           << "\" using 1:3 with lines title \"predicted\"\n";
        std::ofstream gp_out(gp_path, std::ios::binary | std::ios::trunc);
        if (!gp_out || !(gp_out << gp.str()).flush()) {
            throw IngestError("cannot write '" + gp_path.string() + "'");
        }
        written.push_back(gp_path.string());
    }
    return written;
}

namespace {

/// Short column label: initials of underscore words, or the first two
/// letters of a single word. Collisions get a numeric suffix.
std::string abbreviate(const std::string& name) {
    std::vector<std::string> words;
    std::string word;
    std::istringstream in(name);
    while (std::getline(in, word, '_')) {
        if (!word.empty()) words.push_back(word);
    }
    std::string out;
    if (words.size() <= 1) {
        out = name.substr(0, 2);
    } else {
        for (const auto& w : words) out.push_back(w[0]);
    }
    for (char& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::string fmt3(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.3f", v);
    return buf;
}

} // namespace

std::string render_tables(const ForecastReport& report) {
    if (report.targets.empty()) throw ConfigError("render: report has no targets");

    // Shared label map across both tables; alphabetical columns.
    std::vector<std::string> features;
    for (const auto& e : report.targets.front().screening.entries) {
        features.push_back(e.feature_name);
    }
    std::sort(features.begin(), features.end());

    std::map<std::string, std::string> label;
    std::map<std::string, int> used;
    for (const auto& f : features) {
        std::string ab = abbreviate(f);
        if (++used[ab] > 1) ab += std::to_string(used[ab]);
        label[f] = ab;
    }

    std::size_t twidth = 6; // "target"
    for (const auto& t : report.targets) twidth = std::max(twidth, t.target.size());

    std::ostringstream out;
    out << "Coefficient of determination, single feature (full data)\n";
    out << std::string(twidth, ' ');
    for (const auto& f : features) {
        out << "  " << label[f];
        if (label[f].size() < 6) out << std::string(6 - label[f].size(), ' ');
    }
    out << "\n";
    for (const auto& t : report.targets) {
        out << t.target << std::string(twidth - t.target.size(), ' ');
        for (const auto& f : features) {
            std::string cell = "n/a";
            for (const auto& e : t.screening.entries) {
                if (e.feature_name == f && !e.degenerate) {
                    cell = fmt3(e.single_var_cod);
                    break;
                }
            }
            out << "  " << cell;
            if (cell.size() < 6) out << std::string(6 - cell.size(), ' ');
        }
        out << "\n";
    }

    out << "\nCoefficient of determination, growing feature sets (train/test)\n";
    for (std::size_t i = 0; i < report.targets.size(); ++i) {
        out << report.targets[i].target << ":\n";
        if (i >= report.nested_cods.size()) continue;
        for (const auto& e : report.nested_cods[i]) {
            std::string set_label;
            for (const auto& f : e.features) {
                if (!set_label.empty()) set_label += "-";
                set_label += label.count(f) != 0 ? label[f] : f;
            }
            out << "  " << set_label << std::string(set_label.size() < 24 ? 24 - set_label.size() : 1, ' ')
                << fmt3(e.cod_train) << " / " << fmt3(e.cod_test) << "\n";
        }
    }

    out << "\nlegend:";
    for (const auto& f : features) out << " " << label[f] << "=" << f;
    out << "\n";
    return out.str();
}

} // namespace ww
