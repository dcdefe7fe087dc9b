// Acceptance gate: ten hard requirements, one line of output each.
// Every numeric tolerance here is a shipped contract, not a tuning
// knob; loosen one and the build stops meaning anything.

#include "weatherwatt/errors.hpp"
#include "weatherwatt/pipeline.hpp"
#include "weatherwatt/regression.hpp"
#include "weatherwatt/selection.hpp"
#include "weatherwatt/serialize.hpp"
#include "weatherwatt/synthgen.hpp"
#include "weatherwatt/timeseries.hpp"

#include "oracles.hpp"

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace {

namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

int g_failures = 0;
std::vector<std::pair<int, std::string>> g_lines;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

// Criteria run out of order (2 aggregates over 1 and 4), so verdicts
// are buffered and printed sorted.
void verdict(int index, const std::string& name, bool ok, const std::string& detail) {
    std::string line = std::string(ok ? "[PASS]" : "[FAIL]") + " criterion " +
                       std::to_string(index) + ": " + name;
    if (!detail.empty()) line += " (" + detail + ")";
    g_lines.emplace_back(index, std::move(line));
    if (!ok) ++g_failures;
}

std::string fmt(double v) {
    std::ostringstream out;
    out.precision(3);
    out << v;
    return out.str();
}

oracle::Mat to_oracle(const ww::Matrix& m) {
    oracle::Mat out(m.rows(), std::vector<double>(m.cols()));
    for (std::size_t i = 0; i < m.rows(); ++i) {
        for (std::size_t j = 0; j < m.cols(); ++j) out[i][j] = m(i, j);
    }
    return out;
}

double l2_norm(const std::vector<double>& v) {
    double s = 0.0;
    for (double x : v) s += x * x;
    return std::sqrt(s);
}

/// Random regression instance: m gaussian feature columns with shifted
/// means, a planted coefficient vector, and observation noise.
struct Instance {
    ww::DesignMatrix design;
    std::vector<double> y;
};

Instance random_instance(std::mt19937_64& rng, std::size_t n, std::size_t m,
                         double noise_sd = 1.0) {
    std::normal_distribution<double> unit;
    std::uniform_real_distribution<double> shift(-1.0, 1.0);
    ww::Matrix features(n, m);
    std::vector<std::string> names;
    std::vector<double> mu(m);
    for (std::size_t j = 0; j < m; ++j) {
        names.push_back("f" + std::to_string(j));
        mu[j] = shift(rng);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) features(i, j) = mu[j] + unit(rng);
    }
    std::vector<double> theta(m + 1);
    for (auto& t : theta) t = 2.0 * shift(rng);
    std::vector<double> y(n);
    for (std::size_t i = 0; i < n; ++i) {
        double v = theta[0];
        for (std::size_t j = 0; j < m; ++j) v += theta[j + 1] * features(i, j);
        y[i] = v + noise_sd * unit(rng);
    }
    return Instance{ww::DesignMatrix::build(names, features), std::move(y)};
}

/// Worst normal-equation residual seen across all acceptance fits,
/// as a fraction of ||y||. Criterion 2 reads this at the end.
double g_worst_residual_ratio = 0.0;
std::size_t g_residual_checks = 0;

void track_residual(const ww::DesignMatrix& design, const std::vector<double>& y,
                    const std::vector<double>& theta) {
    const double r = oracle::max_normal_residual(to_oracle(design.x), y, theta);
    const double ratio = r / std::max(l2_norm(y), 1e-300);
    g_worst_residual_ratio = std::max(g_worst_residual_ratio, ratio);
    ++g_residual_checks;
}

void criterion_1_and_2() {
    const auto start = Clock::now();
    std::mt19937_64 rng(20170301);
    std::uniform_int_distribution<std::size_t> n_dist(30, 500);
    std::uniform_int_distribution<std::size_t> m_dist(1, 5);

    double worst_component = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const Instance inst = random_instance(rng, n_dist(rng), m_dist(rng));
        const ww::FittedModel model = ww::fit(inst.design, inst.y);
        track_residual(inst.design, inst.y, model.theta);

        // Step below 1/trace of the Hessian keeps plain gradient
        // descent monotone; the gradient tolerance leaves the iterate
        // far inside the 1e-5 acceptance band.
        const oracle::Mat x = to_oracle(inst.design.x);
        double trace = 0.0;
        for (const auto& row : x) {
            for (double vv : row) trace += vv * vv;
        }
        trace /= static_cast<double>(x.size());
        const std::vector<double> gd =
            oracle::gd_fit(x, inst.y, 0.9 / trace, 400000, 1e-10);

        for (std::size_t j = 0; j < model.theta.size(); ++j) {
            worst_component = std::max(worst_component, std::abs(model.theta[j] - gd[j]));
        }
    }
    const double elapsed = seconds_since(start);
    verdict(1, "normal equation matches gradient-descent oracle",
            worst_component < 1e-5 && elapsed < 60.0,
            "50 instances, worst |dtheta|=" + fmt(worst_component) + ", " + fmt(elapsed) + "s");
}

void criterion_3() {
    const auto start = Clock::now();
    double worst = 0.0;
    double worst_sym = 0.0;
    for (long df = 1; df <= 30; ++df) {
        for (double t = -6.0; t <= 6.0 + 1e-9; t += 0.25) {
            const double produced = ww::t_cdf(t, df);
            const double reference = oracle::t_cdf_simpson(t, df);
            worst = std::max(worst, std::abs(produced - reference));
            worst_sym = std::max(worst_sym,
                                 std::abs(ww::t_cdf(-t, df) + produced - 1.0));
        }
    }
    const double elapsed = seconds_since(start);
    verdict(3, "t-cdf matches adaptive Simpson oracle",
            worst < 1e-6 && worst_sym < 1e-12 && elapsed < 10.0,
            "max err=" + fmt(worst) + ", max sym err=" + fmt(worst_sym) + ", " + fmt(elapsed) +
                "s");
}

/// Reference elimination pass: drop-one refits give each coefficient's
/// p-value; the removal is the worst p at or above sl, ties to the
/// earlier column.
bool oracle_agrees(const ww::DesignMatrix& start_design, const std::vector<double>& y,
                   double sl, const std::vector<ww::EliminationRound>& rounds,
                   std::string& why) {
    std::vector<std::string> names = start_design.feature_names;
    std::size_t round_idx = 0;
    while (true) {
        ww::Matrix cols(start_design.n(), names.size());
        for (std::size_t j = 0; j < names.size(); ++j) {
            const auto it = std::find(start_design.feature_names.begin(),
                                      start_design.feature_names.end(), names[j]);
            const std::size_t src =
                static_cast<std::size_t>(it - start_design.feature_names.begin()) + 1;
            for (std::size_t i = 0; i < start_design.n(); ++i) cols(i, j) = start_design.x(i, src);
        }
        const ww::DesignMatrix current = ww::DesignMatrix::build(names, cols);
        const std::vector<double> pvals = oracle::pvalues_partial_f(to_oracle(current.x), y);

        std::size_t worst_j = 0;
        double worst_p = -1.0;
        for (std::size_t j = 0; j < pvals.size(); ++j) {
            if (pvals[j] > worst_p) {
                worst_p = pvals[j];
                worst_j = j;
            }
        }
        if (names.empty() || worst_p < sl) {
            if (round_idx != rounds.size()) {
                why = "oracle stopped after " + std::to_string(round_idx) + " rounds, production after " +
                      std::to_string(rounds.size());
                return false;
            }
            return true;
        }
        if (round_idx >= rounds.size()) {
            why = "oracle wants another removal (" + names[worst_j] + ") after round " +
                  std::to_string(round_idx);
            return false;
        }
        const ww::EliminationRound& round = rounds[round_idx];
        if (round.removed_feature != names[worst_j]) {
            why = "round " + std::to_string(round_idx) + ": oracle removes " + names[worst_j] +
                  ", production removed " + round.removed_feature;
            return false;
        }
        if (std::abs(round.p_value_at_removal - worst_p) > 1e-6) {
            why = "round " + std::to_string(round_idx) + ": p-value mismatch";
            return false;
        }
        names.erase(names.begin() + static_cast<std::ptrdiff_t>(worst_j));
        ++round_idx;
    }
}

void criterion_4() {
    const auto start = Clock::now();
    const std::size_t n = 500;
    int noise_first = 0;
    int oracle_mismatches = 0;
    std::string first_mismatch;

    // One generator for the whole batch: consecutive raw seeds give mt19937_64
    // streams whose early outputs are correlated, which skews the null p-values.
    std::mt19937_64 rng(424242);
    std::normal_distribution<double> unit;
    for (int trial = 0; trial < 100; ++trial) {
        ww::Matrix features(n, 4);
        std::vector<double> y(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < 4; ++j) features(i, j) = unit(rng);
            y[i] = 1.0 + 0.8 * features(i, 0) - 0.6 * features(i, 1) + 0.4 * features(i, 2) +
                   unit(rng); // column 3 never enters
        }
        const ww::DesignMatrix design =
            ww::DesignMatrix::build({"s1", "s2", "s3", "f_noise"}, features);

        const ww::EliminationTrace trace = ww::backward_eliminate(design, y, 0.05);
        track_residual(design, y, ww::fit(design, y).theta);

        if (!trace.rounds.empty() && trace.rounds.front().removed_feature == "f_noise") {
            ++noise_first;
        }
        std::string why;
        if (!oracle_agrees(design, y, 0.05, trace.rounds, why)) {
            ++oracle_mismatches;
            if (first_mismatch.empty()) first_mismatch = why;
        }
    }
    const double elapsed = seconds_since(start);
    std::string detail = std::to_string(noise_first) + "/100 noise-first, " +
                         std::to_string(oracle_mismatches) + " oracle mismatches, " +
                         fmt(elapsed) + "s";
    if (!first_mismatch.empty()) detail += "; " + first_mismatch;
    verdict(4, "backward elimination drops the planted noise feature first",
            noise_first >= 95 && oracle_mismatches == 0 && elapsed < 30.0, detail);
}

void criterion_5() {
    std::mt19937_64 rng(555);
    std::uniform_int_distribution<std::size_t> n_dist(20, 120);
    bool monotone = true;
    std::string why;

    for (int trial = 0; trial < 100 && monotone; ++trial) {
        const std::size_t m = 5;
        const Instance inst = random_instance(rng, n_dist(rng) + m + 2, m, 2.0);

        // Random nested chain: prefixes of a shuffled feature order.
        std::vector<std::size_t> order(m);
        for (std::size_t j = 0; j < m; ++j) order[j] = j;
        std::shuffle(order.begin(), order.end(), rng);

        double prev = -2.0;
        for (std::size_t k = 1; k <= m; ++k) {
            ww::Matrix cols(inst.design.n(), k);
            std::vector<std::string> names;
            for (std::size_t j = 0; j < k; ++j) {
                names.push_back(inst.design.feature_names[order[j]]);
                for (std::size_t i = 0; i < inst.design.n(); ++i) {
                    cols(i, j) = inst.design.x(i, order[j] + 1);
                }
            }
            const ww::FittedModel model = ww::fit(ww::DesignMatrix::build(names, cols), inst.y);
            if (model.r2_train < prev - 1e-12) {
                monotone = false;
                why = "trial " + std::to_string(trial) + ": r2 fell from " + fmt(prev) + " to " +
                      fmt(model.r2_train) + " at size " + std::to_string(k);
                break;
            }
            prev = model.r2_train;
        }
    }
    verdict(5, "train cod never decreases along nested feature chains",
            monotone, monotone ? "100 random datasets" : why);
}

void criterion_6() {
    std::mt19937_64 rng(666);
    std::normal_distribution<double> unit;
    std::uniform_int_distribution<std::size_t> n_dist(10, 200);
    std::uniform_real_distribution<double> mix(-2.0, 2.0);

    double worst = 0.0;
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = n_dist(rng);
        std::vector<double> x(n);
        std::vector<double> y(n);
        const double a = mix(rng);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = unit(rng);
            y[i] = a * x[i] + unit(rng);
        }
        const double r = ww::pearson_r(x, y);

        std::vector<ww::Timestamp> ts;
        for (std::size_t i = 0; i < n; ++i) {
            ts.push_back(ww::Timestamp(static_cast<std::int64_t>(i) * 600));
        }
        const ww::TimeSeriesFrame frame = ww::TimeSeriesFrame::create(
            {"x", "y"}, {ww::ColumnRole::feature, ww::ColumnRole::target}, ts, {x, y});
        const ww::ScreeningReport report = ww::screen_single(frame, "y");
        worst = std::max(worst, std::abs(report.entries[0].single_var_cod - r * r));

        // The univariate fit's train cod is the same number again.
        ww::Matrix col(n, 1);
        for (std::size_t i = 0; i < n; ++i) col(i, 0) = x[i];
        const ww::FittedModel model = ww::fit(ww::DesignMatrix::build({"x"}, col), y);
        worst = std::max(worst, std::abs(model.r2_train - r * r));
    }
    verdict(6, "single-feature cod equals squared pearson correlation", worst < 1e-10,
            "100 vectors, worst gap=" + fmt(worst));
}

void criterion_7() {
    ww::GeneratorSpec spec = ww::GeneratorSpec::defaults();
    const double population = ww::population_single_cod(spec, "active_power", "wind_chill");

    spec.n = 5000;
    const ww::GeneratedData data = ww::generate(spec);
    const ww::TimeSeriesFrame joined = ww::align_join(data.weather, data.power);
    const double r = ww::pearson_r(joined.column("wind_chill"), joined.column("active_power"));
    const double sample = r * r;

    const ww::ScreeningReport screening = ww::screen_single(joined, "active_power");
    const bool ranked_first = screening.entries.front().feature_name == "wind_chill";

    verdict(7, "generator calibrated to the published wind-chill cod",
            std::abs(population - 0.519) < 1e-6 && std::abs(sample - 0.519) <= 0.03 &&
                ranked_first,
            "population=" + fmt(population) + ", sample=" + fmt(sample) + " at n=" +
                std::to_string(joined.n_rows()) + ", top=" +
                screening.entries.front().feature_name);
}

void criterion_8() {
    // The raw desynced join and many sweep masks are legitimately empty, so
    // mute the empty-join warning for the whole criterion.
    std::ostringstream muted;
    std::streambuf* old_cerr = std::cerr.rdbuf(muted.rdbuf());

    // Full retention once the configured shift undoes the desync.
    ww::GeneratorSpec spec = ww::GeneratorSpec::defaults();
    spec.n = 500;
    spec.gap_probability = 0.0;
    spec.desync_probability = 1.0;
    const ww::GeneratedData data = ww::generate(spec);
    const std::size_t raw = ww::align_join(data.weather, data.power).n_rows();
    const std::size_t shifted =
        ww::align_join(data.weather, ww::shift_timestamps(data.power, -ww::kDesyncMinutes))
            .n_rows();
    const bool retention = raw == 0 && shifted == 500;

    // align_join must equal plain set intersection on every subset pair
    // of a five-slot timeline.
    bool join_ok = true;
    std::string why;
    const ww::Timestamp base = ww::Timestamp::parse("2017-03-01T00:00:00Z");
    for (unsigned wm = 0; wm < 32 && join_ok; ++wm) {
        for (unsigned pm = 0; pm < 32 && join_ok; ++pm) {
            std::vector<ww::Timestamp> wts;
            std::vector<double> wvals;
            std::vector<ww::Timestamp> pts;
            std::vector<double> pvals;
            for (unsigned s = 0; s < 5; ++s) {
                if (wm & (1u << s)) {
                    wts.push_back(base.plus_minutes(10 * s));
                    wvals.push_back(10.0 + s);
                }
                if (pm & (1u << s)) {
                    pts.push_back(base.plus_minutes(10 * s));
                    pvals.push_back(100.0 + s);
                }
            }
            const ww::TimeSeriesFrame weather = ww::TimeSeriesFrame::create(
                {"w"}, {ww::ColumnRole::feature}, wts, {wvals});
            const ww::TimeSeriesFrame power = ww::TimeSeriesFrame::create(
                {"p"}, {ww::ColumnRole::target}, pts, {pvals});
            const ww::TimeSeriesFrame joined = ww::align_join(weather, power);

            std::set<std::int64_t> ws;
            for (const auto& t : wts) ws.insert(t.seconds());
            std::set<std::int64_t> inter;
            for (const auto& t : pts) {
                if (ws.count(t.seconds()) != 0) inter.insert(t.seconds());
            }
            if (joined.n_rows() != inter.size()) {
                join_ok = false;
                why = "mask " + std::to_string(wm) + "/" + std::to_string(pm) + " row count";
                break;
            }
            for (std::size_t i = 0; i < joined.n_rows(); ++i) {
                const std::int64_t sec = joined.timestamps()[i].seconds();
                const double slot = static_cast<double>((sec - base.seconds()) / 600);
                if (inter.count(sec) == 0 || joined.column("w")[i] != 10.0 + slot ||
                    joined.column("p")[i] != 100.0 + slot) {
                    join_ok = false;
                    why = "mask " + std::to_string(wm) + "/" + std::to_string(pm) + " contents";
                    break;
                }
            }
        }
    }

    std::cerr.rdbuf(old_cerr);

    verdict(8, "desync shift recovers full retention; join equals set intersection",
            retention && join_ok,
            retention ? (join_ok ? "500/500 rows after shift, 1024 join cases"
                                 : "join mismatch: " + why)
                      : "retention failed: " + std::to_string(shifted) + "/500");
}

int run_cli(const std::string& args) {
    const std::string cmd = "\"" WEATHERWATT_CLI_PATH "\" " + args + " > /dev/null 2>&1";
    const int rc = std::system(cmd.c_str());
    return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void criterion_9() {
    const fs::path dir =
        fs::temp_directory_path() / ("ww_accept_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);

    bool ok = true;
    std::string detail;
    const std::string data = (dir / "data").string();
    if (run_cli("synth --seed 42 --n 2000 --out \"" + data + "\"") != 0) {
        ok = false;
        detail = "synth failed";
    }

    if (ok) {
        std::ofstream cfg(dir / "exp.cfg");
        cfg << "weather = data/weather.csv\n"
            << "power = data/power.csv\n"
            << "shift_minutes = 0\n" // generator output is already aligned
            << "lag_max = 12\n";
        cfg.close();
        const std::string cfg_path = (dir / "exp.cfg").string();
        for (const auto& [out, jobs] : std::vector<std::pair<std::string, std::string>>{
                 {"r1", "1"}, {"r2", "1"}, {"r3", "4"}}) {
            if (run_cli("forecast --config \"" + cfg_path + "\" --jobs " + jobs + " --out \"" +
                        (dir / out).string() + "\"") != 0) {
                ok = false;
                detail = "forecast run " + out + " failed";
                break;
            }
        }
    }

    if (ok) {
        const std::string r1 = slurp(dir / "r1" / "report.json");
        const std::string r2 = slurp(dir / "r2" / "report.json");
        const std::string r3 = slurp(dir / "r3" / "report.json");
        if (r1.empty() || r1 != r2) {
            ok = false;
            detail = "rerun bytes differ";
        } else if (r1 != r3) {
            ok = false;
            detail = "--jobs 4 bytes differ";
        } else {
            detail = "report.json " + std::to_string(r1.size()) + " bytes, identical x3";
        }
    }
    fs::remove_all(dir);
    verdict(9, "end-to-end forecast is byte-identical across runs and job counts", ok, detail);
}

void criterion_10() {
    ww::GeneratorSpec spec = ww::GeneratorSpec::defaults();
    spec.n = 500;
    spec.gap_probability = 0.0;
    spec.desync_probability = 0.0;
    const ww::GeneratedData data = ww::generate(spec);
    const ww::TimeSeriesFrame aligned = ww::align_join(data.weather, data.power);

    bool ok = aligned.n_rows() == 500;
    std::string detail = "both targets, 400-row train set";
    for (const char* target : {"active_power", "reactive_power"}) {
        // ceil(0.8*500) and ceil(0.908*440) both give 400 train rows, so
        // the second run sees the same fitting data minus 60 test rows.
        const ww::TargetResult full = ww::train_on_frame(aligned, target, 0.05, 0.8);
        const ww::TargetResult cut =
            ww::train_on_frame(aligned.slice(0, 440), target, 0.05, 0.908);
        if (ww::to_json(full.trace.final_model).dump() !=
            ww::to_json(cut.trace.final_model).dump()) {
            ok = false;
            detail = std::string("model for ") + target + " changed when test rows were removed";
            break;
        }
        for (std::size_t j = 0; j < full.trace.final_model.theta.size(); ++j) {
            if (full.trace.final_model.theta[j] != cut.trace.final_model.theta[j]) {
                ok = false;
                detail = std::string("theta[") + std::to_string(j) + "] differs for " + target;
                break;
            }
        }
        if (!ok) break;
    }
    verdict(10, "removing held-out rows leaves the fitted parameters bit-identical", ok, detail);
}

void criterion_2_report() {
    verdict(2, "normal-equation residual stays orthogonal on every fit",
            g_residual_checks > 0 && g_worst_residual_ratio < 1e-8,
            std::to_string(g_residual_checks) + " fits, worst ratio=" +
                fmt(g_worst_residual_ratio));
}

} // namespace

int main() {
    std::cout << "weatherwatt acceptance gate\n";
    const auto start = Clock::now();

    try {
        criterion_1_and_2();
        criterion_3();
        criterion_4();
        criterion_2_report();
        criterion_5();
        criterion_6();
        criterion_7();
        criterion_8();
        criterion_9();
        criterion_10();
    } catch (const std::exception& e) {
        g_lines.emplace_back(99, std::string("[FAIL] unhandled exception: ") + e.what());
        ++g_failures;
    }

    std::stable_sort(g_lines.begin(), g_lines.end(),
                     [](const auto& a, const auto& b) { return a.first < b.first; });
    for (const auto& [index, line] : g_lines) std::cout << line << "\n";

    std::cout << (g_failures == 0 ? "all criteria passed" : "criteria failed") << " ("
              << fmt(seconds_since(start)) << "s total)\n";
    return g_failures == 0 ? 0 : 1;
}
