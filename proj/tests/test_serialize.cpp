#include "weatherwatt/errors.hpp"
#include "weatherwatt/pipeline.hpp"
#include "weatherwatt/serialize.hpp"
#include "weatherwatt/synthgen.hpp"

#include "doctest.h"

#include <json.hpp>

#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

using namespace ww;
using nlohmann::json;

namespace {

FittedModel small_model() {
    std::mt19937_64 rng(31);
    std::normal_distribution<double> dist;
    const std::size_t n = 40;
    Matrix features(n, 2);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        features(i, 0) = dist(rng);
        features(i, 1) = dist(rng);
        y[i] = 1.5 + 0.8 * features(i, 0) - 0.3 * features(i, 1) + 0.2 * dist(rng);
    }
    return fit(DesignMatrix::build({"u", "v"}, features), y);
}

TimeSeriesFrame synth_frame(std::size_t n) {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.n = n;
    spec.gap_probability = 0.0;
    spec.desync_probability = 0.0;
    const GeneratedData data = generate(spec);
    return align_join(data.weather, data.power);
}

} // namespace

TEST_CASE("fitted model json carries exactly the documented fields") {
    const json j = to_json(small_model());
    REQUIRE(j.is_object());
    CHECK(j.size() == 8);
    for (const char* field : {"feature_names", "theta", "std_errors", "t_stats", "p_values",
                              "df", "r2_train", "train_cost"}) {
        CHECK(j.contains(field));
    }
}

TEST_CASE("fitted model round-trips bit for bit") {
    const FittedModel model = small_model();
    const std::string text = to_json(model).dump(2);
    const FittedModel back = model_from_json(json::parse(text));

    CHECK(back.feature_names == model.feature_names);
    CHECK(back.df == model.df);
    REQUIRE(back.theta.size() == model.theta.size());
    for (std::size_t j = 0; j < model.theta.size(); ++j) {
        CHECK(back.theta[j] == model.theta[j]);
        CHECK(back.std_errors[j] == model.std_errors[j]);
        CHECK(back.t_stats[j] == model.t_stats[j]);
        CHECK(back.p_values[j] == model.p_values[j]);
    }
    CHECK(back.r2_train == model.r2_train);
    CHECK(back.train_cost == model.train_cost);
    CHECK(back.residual_variance ==
          doctest::Approx(model.residual_variance).epsilon(1e-12));

    // Serializing the reconstruction changes nothing.
    CHECK(to_json(back).dump() == to_json(model).dump());
}

TEST_CASE("reloaded model predicts identically") {
    const FittedModel model = small_model();
    const FittedModel back = model_from_json(to_json(model));
    Matrix probe(3, 2);
    probe(0, 0) = 0.0;
    probe(0, 1) = 0.0;
    probe(1, 0) = 1.0;
    probe(1, 1) = -2.0;
    probe(2, 0) = -0.5;
    probe(2, 1) = 0.25;
    const auto a = predict(model, probe);
    const auto b = predict(back, probe);
    for (std::size_t i = 0; i < a.size(); ++i) CHECK(a[i] == b[i]);
}

TEST_CASE("model json validation rejects broken documents") {
    const json good = to_json(small_model());

    json missing = good;
    missing.erase("theta");
    CHECK_THROWS_AS(model_from_json(missing), ConfigError);

    json short_arr = good;
    short_arr["std_errors"] = std::vector<double>{1.0};
    CHECK_THROWS_AS(model_from_json(short_arr), ConfigError);

    json bad_df = good;
    bad_df["df"] = 0;
    CHECK_THROWS_AS(model_from_json(bad_df), ConfigError);

    json bad_type = good;
    bad_type["theta"] = "not an array";
    CHECK_THROWS_AS(model_from_json(bad_type), ConfigError);

    json null_val = good;
    null_val["theta"][0] = nullptr;
    CHECK_THROWS_AS(model_from_json(null_val), ConfigError);
}

TEST_CASE("screening report round-trips including degenerate entries") {
    ScreeningReport report;
    report.target_name = "active_power";
    report.entries = {
        {"wind_chill", 0.72, 0.5184, false},
        {"rainfall", 0.1, 0.01, false},
        {"flatline", 0.0, 0.0, true},
    };
    const std::string text = to_json(report).dump();
    const ScreeningReport back = screening_from_json(json::parse(text));
    CHECK(to_json(back).dump() == text);
    REQUIRE(back.entries.size() == 3);
    CHECK(back.entries[2].degenerate);
    CHECK(back.entries[0].pearson_r == 0.72);

    CHECK_THROWS_AS(screening_from_json(json{{"target_name", "x"}}), ConfigError);
}

TEST_CASE("elimination trace round-trips rounds and flags") {
    const TimeSeriesFrame frame = synth_frame(300);
    const auto [train, test] = split_chronological(frame, 0.8);
    const EliminationTrace trace = backward_eliminate(
        DesignMatrix::from_frame(train, train.feature_names()), train.column("active_power"),
        0.05);

    const std::string text = to_json(trace).dump();
    const EliminationTrace back = trace_from_json(json::parse(text));
    CHECK(to_json(back).dump() == text);
    CHECK(back.sl == trace.sl);
    CHECK(back.intercept_only == trace.intercept_only);
    REQUIRE(back.rounds.size() == trace.rounds.size());
    for (std::size_t i = 0; i < trace.rounds.size(); ++i) {
        CHECK(back.rounds[i].removed_feature == trace.rounds[i].removed_feature);
        CHECK(back.rounds[i].p_value_at_removal == trace.rounds[i].p_value_at_removal);
        CHECK(back.rounds[i].surviving_features == trace.rounds[i].surviving_features);
        CHECK(back.rounds[i].refit_r2 == trace.rounds[i].refit_r2);
    }
    for (std::size_t j = 0; j < trace.final_model.theta.size(); ++j) {
        CHECK(back.final_model.theta[j] == trace.final_model.theta[j]);
    }
}

TEST_CASE("forecast report round-trips byte for byte") {
    GeneratorSpec spec = GeneratorSpec::defaults();
    spec.n = 250;
    spec.gap_probability = 0.0;
    spec.desync_probability = 0.0;
    const GeneratedData data = generate(spec);

    const auto dir = std::filesystem::temp_directory_path() / "ww_serialize_report";
    std::filesystem::create_directories(dir);
    write_csv(data.weather, dir / "weather.csv");
    write_csv(data.power, dir / "power.csv");

    ExperimentConfig config;
    config.weather_path = (dir / "weather.csv").string();
    config.power_path = (dir / "power.csv").string();
    config.shift_minutes = 0;

    const ForecastReport report = run_experiment(config);
    const std::string text = to_json(report).dump(2);
    const ForecastReport back = report_from_json(json::parse(text));
    CHECK(to_json(back).dump(2) == text);
    CHECK(back.n_rows_joined == report.n_rows_joined);
    CHECK(back.targets.size() == report.targets.size());
    REQUIRE(!back.targets.empty());
    REQUIRE(!back.targets[0].series.empty());
    CHECK(back.targets[0].series[0].when == report.targets[0].series[0].when);
    CHECK(back.targets[0].series[0].predicted == report.targets[0].series[0].predicted);

    std::filesystem::remove_all(dir);
}

TEST_CASE("lag scan csv carries the conversion header and exact reals") {
    LagScanResult result;
    result.feature = "wind_chill";
    result.target = "active_power";
    result.entries = {{0, 0.123456789012345678}, {1, -0.5}, {2, 0.25}};
    result.best_lag = 1;
    result.median_row_minutes = 10.0;

    const std::string csv = lag_scan_to_csv(result);
    CHECK(csv.find("# feature=wind_chill target=active_power best_lag=1") != std::string::npos);
    CHECK(csv.find("median_row_minutes=10") != std::string::npos);
    CHECK(csv.find("lag_steps,lag_minutes,pearson_r\n") != std::string::npos);
    CHECK(csv.find("\n0,0,0.12345678901234568\n") != std::string::npos);
    CHECK(csv.find("\n1,10,-0.5\n") != std::string::npos);
    CHECK(csv.find("\n2,20,0.25\n") != std::string::npos);

    // Reparsing the printed correlation recovers the identical double.
    const double parsed = std::stod("0.12345678901234568");
    CHECK(parsed == result.entries[0].second);
}

TEST_CASE("text file helpers round-trip and fail loudly") {
    const auto dir = std::filesystem::temp_directory_path() / "ww_serialize_text";
    std::filesystem::create_directories(dir);
    const std::string path = (dir / "blob.txt").string();
    const std::string body = "line one\nline two\n\x01\x02 binary-ish\n";
    write_text_file(path, body);
    CHECK(read_text_file(path) == body);
    CHECK_THROWS_AS(read_text_file((dir / "missing.txt").string()), IngestError);
    CHECK_THROWS_AS(write_text_file((dir / "no" / "such" / "dir.txt").string(), "x"),
                    IngestError);
    std::filesystem::remove_all(dir);
}
