#include "weatherwatt/serialize.hpp"

#include "weatherwatt/errors.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace ww {

namespace {

using nlohmann::json;

void require_finite(const std::vector<double>& values, const std::string& field) {
    for (double v : values) {
        if (!std::isfinite(v)) throw ConfigError("model json: non-finite value in " + field);
    }
}

std::vector<double> doubles_at(const json& j, const std::string& field) {
    std::vector<double> out = j.at(field).get<std::vector<double>>();
    require_finite(out, field);
    return out;
}

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

} // namespace

json to_json(const FittedModel& model) {
    return json{
        {"feature_names", model.feature_names},
        {"theta", model.theta},
        {"std_errors", model.std_errors},
        {"t_stats", model.t_stats},
        {"p_values", model.p_values},
        {"df", model.df},
        {"r2_train", model.r2_train},
        {"train_cost", model.train_cost},
    };
}

FittedModel model_from_json(const json& j) {
    try {
        FittedModel model;
        model.feature_names = j.at("feature_names").get<std::vector<std::string>>();
        model.theta = doubles_at(j, "theta");
        model.std_errors = doubles_at(j, "std_errors");
        model.t_stats = doubles_at(j, "t_stats");
        model.p_values = doubles_at(j, "p_values");
        model.df = j.at("df").get<long>();
        model.r2_train = j.at("r2_train").get<double>();
        model.train_cost = j.at("train_cost").get<double>();

        const std::size_t width = model.feature_names.size() + 1;
        if (model.theta.size() != width || model.std_errors.size() != width ||
            model.t_stats.size() != width || model.p_values.size() != width) {
            throw ConfigError("model json: coefficient arrays do not match feature_names");
        }
        if (model.df < 1) throw ConfigError("model json: df must be at least 1");

        // Not serialized; recovered from df = n - m - 1 and the cost.
        const double n = static_cast<double>(model.df + static_cast<long>(width));
        model.residual_variance = 2.0 * n * model.train_cost / static_cast<double>(model.df);
        return model;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("model json: ") + e.what());
    }
}

json to_json(const ScreeningReport& report) {
    json entries = json::array();
    for (const auto& e : report.entries) {
        entries.push_back(json{
            {"feature_name", e.feature_name},
            {"pearson_r", e.pearson_r},
            {"single_var_cod", e.single_var_cod},
            {"degenerate", e.degenerate},
        });
    }
    return json{{"target_name", report.target_name}, {"entries", entries}};
}

ScreeningReport screening_from_json(const json& j) {
    try {
        ScreeningReport report;
        report.target_name = j.at("target_name").get<std::string>();
        for (const auto& e : j.at("entries")) {
            ScreeningEntry entry;
            entry.feature_name = e.at("feature_name").get<std::string>();
            entry.pearson_r = e.at("pearson_r").get<double>();
            entry.single_var_cod = e.at("single_var_cod").get<double>();
            entry.degenerate = e.at("degenerate").get<bool>();
            report.entries.push_back(std::move(entry));
        }
        return report;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("screening json: ") + e.what());
    }
}

json to_json(const EliminationTrace& trace) {
    json rounds = json::array();
    for (const auto& r : trace.rounds) {
        rounds.push_back(json{
            {"removed_feature", r.removed_feature},
            {"p_value_at_removal", r.p_value_at_removal},
            {"surviving_features", r.surviving_features},
            {"refit_r2", r.refit_r2},
        });
    }
    return json{
        {"rounds", rounds},
        {"final_model", to_json(trace.final_model)},
        {"sl", trace.sl},
        {"intercept_only", trace.intercept_only},
    };
}

EliminationTrace trace_from_json(const json& j) {
    try {
        EliminationTrace trace;
        for (const auto& r : j.at("rounds")) {
            EliminationRound round;
            round.removed_feature = r.at("removed_feature").get<std::string>();
            round.p_value_at_removal = r.at("p_value_at_removal").get<double>();
            round.surviving_features = r.at("surviving_features").get<std::vector<std::string>>();
            round.refit_r2 = r.at("refit_r2").get<double>();
            trace.rounds.push_back(std::move(round));
        }
        trace.final_model = model_from_json(j.at("final_model"));
        trace.sl = j.at("sl").get<double>();
        trace.intercept_only = j.at("intercept_only").get<bool>();
        return trace;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("trace json: ") + e.what());
    }
}

json to_json(const ForecastReport& report) {
    json targets = json::array();
    for (const auto& t : report.targets) {
        json series = json::array();
        for (const auto& p : t.series) {
            series.push_back(json{
                {"timestamp", p.when.to_string()},
                {"actual", p.actual},
                {"predicted", p.predicted},
            });
        }
        targets.push_back(json{
            {"target", t.target},
            {"screening", to_json(t.screening)},
            {"trace", to_json(t.trace)},
            {"r2_train", t.r2_train},
            {"r2_test", t.r2_test},
            {"series", series},
        });
    }
    json nested = json::array();
    for (const auto& chain : report.nested_cods) {
        json entries = json::array();
        for (const auto& e : chain) {
            entries.push_back(json{{"features", e.features},
                                   {"cod_train", e.cod_train},
                                   {"cod_test", e.cod_test}});
        }
        nested.push_back(entries);
    }
    return json{
        {"targets", targets},
        {"nested_cods", nested},
        {"n_rows_joined", report.n_rows_joined},
        {"n_train", report.n_train},
        {"n_test", report.n_test},
    };
}

ForecastReport report_from_json(const json& j) {
    try {
        ForecastReport report;
        for (const auto& t : j.at("targets")) {
            TargetResult result;
            result.target = t.at("target").get<std::string>();
            result.screening = screening_from_json(t.at("screening"));
            result.trace = trace_from_json(t.at("trace"));
            result.r2_train = t.at("r2_train").get<double>();
            result.r2_test = t.at("r2_test").get<double>();
            for (const auto& p : t.at("series")) {
                SeriesPoint point;
                point.when = Timestamp::parse(p.at("timestamp").get<std::string>());
                point.actual = p.at("actual").get<double>();
                point.predicted = p.at("predicted").get<double>();
                result.series.push_back(point);
            }
            report.targets.push_back(std::move(result));
        }
        for (const auto& chain : j.at("nested_cods")) {
            std::vector<NestedCodEntry> entries;
            for (const auto& e : chain) {
                NestedCodEntry entry;
                entry.features = e.at("features").get<std::vector<std::string>>();
                entry.cod_train = e.at("cod_train").get<double>();
                entry.cod_test = e.at("cod_test").get<double>();
                entries.push_back(std::move(entry));
            }
            report.nested_cods.push_back(std::move(entries));
        }
        report.n_rows_joined = j.at("n_rows_joined").get<std::size_t>();
        report.n_train = j.at("n_train").get<std::size_t>();
        report.n_test = j.at("n_test").get<std::size_t>();
        return report;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("report json: ") + e.what());
    }
}

std::string lag_scan_to_csv(const LagScanResult& result) {
    std::ostringstream out;
    out << "# feature=" << result.feature << " target=" << result.target
        << " best_lag=" << result.best_lag
        << " median_row_minutes=" << fmt(result.median_row_minutes) << "\n";
    out << "lag_steps,lag_minutes,pearson_r\n";
    for (const auto& [lag, r] : result.entries) {
        out << lag << ',' << fmt(static_cast<double>(lag) * result.median_row_minutes) << ','
            << fmt(r) << "\n";
    }
    return out.str();
}

std::string read_text_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IngestError("cannot open '" + path + "' for reading");
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IngestError("cannot open '" + path + "' for writing");
    out << content;
    if (!out.flush()) throw IngestError("failed writing '" + path + "'");
}

} // namespace ww
