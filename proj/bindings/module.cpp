#include "weatherwatt/pipeline.hpp"
#include "weatherwatt/regression.hpp"
#include "weatherwatt/selection.hpp"
#include "weatherwatt/serialize.hpp"
#include "weatherwatt/synthgen.hpp"
#include "weatherwatt/timeseries.hpp"

#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <string>
#include <utility>
#include <vector>

namespace py = pybind11;

namespace {

ww::Matrix mat_from_rows(const std::vector<std::vector<double>>& rows) {
    const std::size_t n = rows.size();
    const std::size_t m = n == 0 ? 0 : rows.front().size();
    std::vector<double> flat;
    flat.reserve(n * m);
    for (const auto& row : rows) {
        if (row.size() != m) throw ww::DimensionError("ragged feature rows");
        flat.insert(flat.end(), row.begin(), row.end());
    }
    return ww::Matrix(n, m, std::move(flat));
}

std::string fit_json(const std::vector<std::string>& feature_names,
                     const std::vector<std::vector<double>>& features,
                     const std::vector<double>& y) {
    const auto design = ww::DesignMatrix::build(feature_names, mat_from_rows(features));
    return ww::to_json(ww::fit(design, y)).dump();
}

std::vector<double> predict_rows(const std::vector<std::string>& feature_names,
                                 const std::vector<double>& theta,
                                 const std::vector<std::vector<double>>& features) {
    ww::FittedModel model;
    model.feature_names = feature_names;
    model.theta = theta;
    if (theta.size() != feature_names.size() + 1) {
        throw ww::DimensionError("theta length must be feature count + 1");
    }
    return ww::predict(model, mat_from_rows(features));
}

std::string eliminate_json(const std::vector<std::string>& feature_names,
                           const std::vector<std::vector<double>>& features,
                           const std::vector<double>& y, double sl) {
    const auto design = ww::DesignMatrix::build(feature_names, mat_from_rows(features));
    return ww::to_json(ww::backward_eliminate(design, y, sl)).dump();
}

std::vector<double> solve_normal_rows(const std::vector<std::vector<double>>& x,
                                      const std::vector<double>& y) {
    ww::Matrix ymat(y.size(), 1);
    for (std::size_t i = 0; i < y.size(); ++i) ymat(i, 0) = y[i];
    const ww::Matrix theta = ww::solve_normal(mat_from_rows(x), ymat);
    std::vector<double> out(theta.rows());
    for (std::size_t i = 0; i < theta.rows(); ++i) out[i] = theta(i, 0);
    return out;
}

py::dict lag_scan_vectors(const std::vector<double>& x, const std::vector<double>& y,
                          long lag_max) {
    if (lag_max < 0) throw ww::ConfigError("lag_max must be non-negative");
    if (x.size() != y.size()) throw ww::DimensionError("series lengths differ");
    if (x.size() < static_cast<std::size_t>(lag_max) + 2) {
        throw ww::DimensionError("need at least lag_max + 2 rows");
    }
    std::vector<std::pair<long, double>> entries;
    long best_lag = 0;
    double best = -1.0;
    for (long k = 0; k <= lag_max; ++k) {
        const std::size_t len = x.size() - static_cast<std::size_t>(k);
        const std::vector<double> xs(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(len));
        const std::vector<double> ys(y.begin() + static_cast<std::ptrdiff_t>(k), y.end());
        const double r = ww::pearson_r(xs, ys);
        entries.emplace_back(k, r);
        if (std::abs(r) > best) {
            best = std::abs(r);
            best_lag = k;
        }
    }
    py::dict out;
    out["entries"] = entries;
    out["best_lag"] = best_lag;
    return out;
}

std::pair<std::string, std::string> generate_default_csv(std::uint64_t seed, std::size_t n) {
    ww::GeneratorSpec spec = ww::GeneratorSpec::defaults();
    spec.seed = seed;
    spec.n = n;
    const ww::GeneratedData data = ww::generate(spec);
    return {ww::frame_to_csv(data.weather), ww::frame_to_csv(data.power)};
}

std::pair<std::string, std::string> generate_csv_from_spec(const std::string& spec_path) {
    const ww::GeneratedData data = ww::generate(ww::GeneratorSpec::from_file(spec_path));
    return {ww::frame_to_csv(data.weather), ww::frame_to_csv(data.power)};
}

std::string run_experiment_json(const std::string& config_path) {
    return ww::to_json(ww::run_experiment(ww::ExperimentConfig::from_file(config_path))).dump(2);
}

} // namespace

PYBIND11_MODULE(_weatherwatt, m) {
    m.doc() = "weather-to-power regression toolkit";

    // Translators run newest-first, so the base class goes in first and
    // the specific usage errors shadow it.
    py::register_exception<ww::Error>(m, "WwError", PyExc_RuntimeError);
    py::register_exception<ww::IngestError>(m, "WwIngestError", PyExc_ValueError);
    py::register_exception<ww::ConfigError>(m, "WwConfigError", PyExc_ValueError);

    m.def("t_cdf", &ww::t_cdf, py::arg("t"), py::arg("df"),
          "Student-t CDF via the regularized incomplete beta function");
    m.def("pearson_r", &ww::pearson_r, py::arg("x"), py::arg("y"));
    m.def("r_squared", &ww::r_squared, py::arg("y_true"), py::arg("y_pred"),
          "coefficient of determination; may be negative out of sample");
    m.def("solve_normal", &solve_normal_rows, py::arg("x_rows"), py::arg("y"),
          "least-squares solution of the normal equation; x_rows excludes the bias column "
          "only if you omit it yourself");
    m.def("fit_json", &fit_json, py::arg("feature_names"), py::arg("feature_rows"),
          py::arg("y"), "fit OLS with inference; returns the model as a JSON string");
    m.def("predict", &predict_rows, py::arg("feature_names"), py::arg("theta"),
          py::arg("feature_rows"));
    m.def("backward_eliminate_json", &eliminate_json, py::arg("feature_names"),
          py::arg("feature_rows"), py::arg("y"), py::arg("sl"),
          "run backward elimination; returns the trace as a JSON string");
    m.def("lag_scan", &lag_scan_vectors, py::arg("x"), py::arg("y"), py::arg("lag_max"),
          "pearson r of x[i] against y[i+k] for k in [0, lag_max]");
    m.def("generate_default_csv", &generate_default_csv, py::arg("seed") = 42,
          py::arg("n") = 2000, "built-in synthetic scenario as (weather_csv, power_csv)");
    m.def("generate_csv_from_spec", &generate_csv_from_spec, py::arg("spec_path"));
    m.def("run_experiment_json", &run_experiment_json, py::arg("config_path"),
          "run the full pipeline from a config file; returns the report as a JSON string");
}
