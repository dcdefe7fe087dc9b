#include "weatherwatt/errors.hpp"
#include "weatherwatt/pipeline.hpp"
#include "weatherwatt/serialize.hpp"
#include "weatherwatt/synthgen.hpp"
#include "weatherwatt/timeseries.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using nlohmann::json;

struct Flags {
    CLI::App* sub = nullptr;
    std::string config_path;
    std::string weather;
    std::string power;
    std::string roles;
    std::string out;
    std::vector<std::string> targets;
    long shift_minutes = 5;
    double sl = 0.05;
    double split = 0.8;
    long lag_max = 12;
    std::size_t jobs = 1;
    // synth / report
    std::string spec_path;
    std::string input_path;
    std::uint64_t seed = 42;
    std::size_t n = 2000;
};

bool given(const CLI::App* sub, const std::string& name) {
    const CLI::Option* opt = sub->get_option_no_throw(name);
    return opt != nullptr && opt->count() > 0;
}

void add_out_flag(CLI::App* sub, Flags& f) {
    sub->add_option("--out", f.out, "output directory (falls back to $WEATHERWATT_OUT)");
}

void add_ingest_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--config", f.config_path, "experiment config file (key = value)");
    sub->add_option("--weather", f.weather, "weather CSV path");
    sub->add_option("--power", f.power, "power CSV path");
    sub->add_option("--roles", f.roles, "column roles file (name = feature|target)");
    sub->add_option("--shift-minutes", f.shift_minutes,
                    "signed minutes added to power timestamps before joining");
    add_out_flag(sub, f);
}

void add_model_flags(CLI::App* sub, Flags& f) {
    sub->add_option("--target", f.targets, "target column to model (repeatable; default all)");
    sub->add_option("--sl", f.sl, "significance level for backward elimination");
    sub->add_option("--split", f.split, "fraction of rows used for training");
}

ww::ExperimentConfig make_config(const Flags& f) {
    ww::ExperimentConfig cfg;
    if (!f.config_path.empty()) cfg = ww::ExperimentConfig::from_file(f.config_path);
    if (given(f.sub, "--weather")) cfg.weather_path = f.weather;
    if (given(f.sub, "--power")) cfg.power_path = f.power;
    if (given(f.sub, "--roles")) cfg.roles_path = f.roles;
    if (given(f.sub, "--shift-minutes")) cfg.shift_minutes = f.shift_minutes;
    if (given(f.sub, "--target")) cfg.targets = f.targets;
    if (given(f.sub, "--sl")) cfg.sl = f.sl;
    if (given(f.sub, "--split")) cfg.train_fraction = f.split;
    if (given(f.sub, "--lag-max")) cfg.lag_max = f.lag_max;
    if (given(f.sub, "--jobs")) cfg.jobs = f.jobs;
    return cfg;
}

std::string require_out(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    const char* env = std::getenv("WEATHERWATT_OUT");
    if (env != nullptr && *env != '\0') return env;
    throw ww::ConfigError("no output directory: pass --out or set WEATHERWATT_OUT");
}

std::string optional_out(const std::string& flag_value) {
    if (!flag_value.empty()) return flag_value;
    const char* env = std::getenv("WEATHERWATT_OUT");
    return env != nullptr ? env : "";
}

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ww::IngestError("cannot create directory '" + dir + "': " + ec.message());
}

void check_model_ranges(const ww::ExperimentConfig& cfg) {
    // Reject bad numerics before any output file exists.
    if (!(cfg.sl > 0.0 && cfg.sl < 1.0)) throw ww::ConfigError("--sl must be in (0, 1)");
    if (!(cfg.train_fraction > 0.0 && cfg.train_fraction < 1.0)) {
        throw ww::ConfigError("--split must be in (0, 1)");
    }
}

void run_synth(const Flags& f) {
    ww::GeneratorSpec spec = given(f.sub, "--spec") ? ww::GeneratorSpec::from_file(f.spec_path)
                                                    : ww::GeneratorSpec::defaults();
    if (given(f.sub, "--seed")) spec.seed = f.seed;
    if (given(f.sub, "--n")) spec.n = f.n;

    const ww::GeneratedData data = ww::generate(spec);
    const std::string out = require_out(f.out);
    ensure_dir(out);
    const fs::path weather_path = fs::path(out) / "weather.csv";
    const fs::path power_path = fs::path(out) / "power.csv";
    ww::write_csv(data.weather, weather_path);
    ww::write_csv(data.power, power_path);
    std::cout << "wrote " << weather_path.string() << " (" << data.weather.n_rows()
              << " rows)\n";
    std::cout << "wrote " << power_path.string() << " (" << data.power.n_rows() << " rows)\n";
}

void run_ingest(const Flags& f) {
    const ww::ExperimentConfig cfg = make_config(f);
    const std::string out = require_out(f.out);

    ww::ParseStats wstats;
    ww::ParseStats pstats;
    const ww::TimeSeriesFrame aligned = ww::ingest_aligned(cfg, &wstats, &pstats);

    ensure_dir(out);
    const fs::path frame_path = fs::path(out) / "aligned.csv";
    ww::write_csv(aligned, frame_path);

    std::string roles_text;
    for (const auto& name : aligned.column_names()) {
        roles_text += name;
        roles_text += aligned.role(name) == ww::ColumnRole::feature ? " = feature\n" : " = target\n";
    }
    const fs::path roles_path = fs::path(out) / "aligned_roles.txt";
    ww::write_text_file(roles_path.string(), roles_text);

    std::cout << "weather rows dropped: " << wstats.rows_dropped
              << ", duplicates: " << wstats.duplicates_dropped << "\n";
    std::cout << "power rows dropped: " << pstats.rows_dropped
              << ", duplicates: " << pstats.duplicates_dropped << "\n";
    std::cout << "joined rows: " << aligned.n_rows() << "\n";
    std::cout << "wrote " << frame_path.string() << "\n";
    std::cout << "wrote " << roles_path.string() << "\n";
}

void run_screen(const Flags& f) {
    const ww::ExperimentConfig cfg = make_config(f);
    const std::string out = require_out(f.out);

    const ww::TimeSeriesFrame aligned = ww::ingest_aligned(cfg);
    if (aligned.empty()) throw ww::IngestError("aligned frame is empty (no shared timestamps)");
    std::vector<std::string> targets = cfg.targets.empty() ? aligned.target_names() : cfg.targets;
    if (targets.empty()) throw ww::ConfigError("no target columns found");

    ensure_dir(out);
    for (const auto& target : targets) {
        const ww::ScreeningReport report = ww::screen_single(aligned, target);
        const fs::path path = fs::path(out) / ("screening_" + target + ".json");
        ww::write_text_file(path.string(), ww::to_json(report).dump(2) + "\n");
        std::cout << target << ":\n";
        for (const auto& e : report.entries) {
            std::cout << "  " << e.feature_name << "  r=";
            if (e.degenerate) {
                std::cout << "n/a  cod=n/a (constant column)\n";
            } else {
                std::cout << e.pearson_r << "  cod=" << e.single_var_cod << "\n";
            }
        }
        std::cout << "wrote " << path.string() << "\n";
    }
}

void run_train(const Flags& f) {
    const ww::ExperimentConfig cfg = make_config(f);
    check_model_ranges(cfg);
    const std::string out = require_out(f.out);

    const ww::ForecastReport report = ww::run_experiment(cfg);
    ensure_dir(out);
    for (const auto& t : report.targets) {
        const fs::path model_path = fs::path(out) / ("model_" + t.target + ".json");
        const fs::path trace_path = fs::path(out) / ("trace_" + t.target + ".json");
        ww::write_text_file(model_path.string(),
                            ww::to_json(t.trace.final_model).dump(2) + "\n");
        ww::write_text_file(trace_path.string(), ww::to_json(t.trace).dump(2) + "\n");
        std::cout << t.target << ": kept";
        if (t.trace.final_model.feature_names.empty()) {
            std::cout << " intercept only";
        } else {
            for (const auto& name : t.trace.final_model.feature_names) std::cout << " " << name;
        }
        std::cout << " (r2_train=" << t.r2_train << ", r2_test=" << t.r2_test << ")\n";
        std::cout << "wrote " << model_path.string() << "\n";
        std::cout << "wrote " << trace_path.string() << "\n";
    }
}

void run_forecast(const Flags& f) {
    const ww::ExperimentConfig cfg = make_config(f);
    check_model_ranges(cfg);
    const std::string out = require_out(f.out);

    const ww::ForecastReport report = ww::run_experiment(cfg);
    ensure_dir(out);

    const fs::path report_path = fs::path(out) / "report.json";
    ww::write_text_file(report_path.string(), ww::to_json(report).dump(2) + "\n");
    std::cout << "wrote " << report_path.string() << "\n";

    for (const auto& path : ww::emit_plot_series(report, out)) {
        std::cout << "wrote " << path << "\n";
    }

    const fs::path tables_path = fs::path(out) / "tables.txt";
    ww::write_text_file(tables_path.string(), ww::render_tables(report));
    std::cout << "wrote " << tables_path.string() << "\n";

    // Lag sweep for each target against its top-screened feature.
    if (cfg.lag_max > 0) {
        const ww::TimeSeriesFrame aligned = ww::ingest_aligned(cfg);
        const long effective_max =
            std::min<long>(cfg.lag_max, static_cast<long>(aligned.n_rows()) - 2);
        if (effective_max >= 0) {
            for (const auto& t : report.targets) {
                const auto& entries = t.screening.entries;
                if (entries.empty() || entries.front().degenerate) continue;
                const std::string& feature = entries.front().feature_name;
                const ww::LagScanResult scan =
                    ww::lag_scan(aligned, feature, t.target, effective_max);
                const fs::path path =
                    fs::path(out) / ("lag_" + feature + "_" + t.target + ".csv");
                ww::write_text_file(path.string(), ww::lag_scan_to_csv(scan));
                std::cout << "wrote " << path.string() << " (best_lag=" << scan.best_lag
                          << ")\n";
            }
        }
    }
}

void run_report(const Flags& f) {
    json parsed;
    try {
        parsed = json::parse(ww::read_text_file(f.input_path));
    } catch (const json::exception& e) {
        throw ww::ConfigError("report json: " + std::string(e.what()));
    }
    const std::string text = ww::render_tables(ww::report_from_json(parsed));
    std::cout << text;
    const std::string out = optional_out(f.out);
    if (!out.empty()) {
        ensure_dir(out);
        const fs::path path = fs::path(out) / "tables.txt";
        ww::write_text_file(path.string(), text);
        std::cout << "wrote " << path.string() << "\n";
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"weatherwatt: data-center power forecasting from weather telemetry"};
    app.require_subcommand(1);

    Flags synth_f;
    CLI::App* synth = app.add_subcommand("synth", "generate seeded synthetic weather/power CSVs");
    synth_f.sub = synth;
    synth->add_option("--spec", synth_f.spec_path, "generator spec file (key = value)");
    synth->add_option("--seed", synth_f.seed, "random seed");
    synth->add_option("--n", synth_f.n, "row count");
    add_out_flag(synth, synth_f);
    synth->callback([&] { run_synth(synth_f); });

    Flags ingest_f;
    CLI::App* ingest = app.add_subcommand("ingest", "parse, shift, and join the two streams");
    ingest_f.sub = ingest;
    add_ingest_flags(ingest, ingest_f);
    ingest->callback([&] { run_ingest(ingest_f); });

    Flags screen_f;
    CLI::App* screen = app.add_subcommand("screen", "rank features by single-variable correlation");
    screen_f.sub = screen;
    add_ingest_flags(screen, screen_f);
    screen->add_option("--target", screen_f.targets, "target column (repeatable; default all)");
    screen->callback([&] { run_screen(screen_f); });

    Flags train_f;
    CLI::App* train = app.add_subcommand("train", "backward-eliminate and fit per target");
    train_f.sub = train;
    add_ingest_flags(train, train_f);
    add_model_flags(train, train_f);
    train->callback([&] { run_train(train_f); });

    Flags forecast_f;
    CLI::App* forecast = app.add_subcommand("forecast", "full experiment: train, predict, report");
    forecast_f.sub = forecast;
    add_ingest_flags(forecast, forecast_f);
    add_model_flags(forecast, forecast_f);
    forecast->add_option("--lag-max", forecast_f.lag_max, "lag scan upper bound in row steps");
    forecast->add_option("--jobs", forecast_f.jobs, "parallel per-target workers");
    forecast->callback([&] { run_forecast(forecast_f); });

    Flags report_f;
    CLI::App* report = app.add_subcommand("report", "render tables from a forecast report JSON");
    report_f.sub = report;
    report->add_option("--input", report_f.input_path, "forecast report JSON path")->required();
    add_out_flag(report, report_f);
    report->callback([&] { run_report(report_f); });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    } catch (const ww::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ww::IngestError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const ww::Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
