#include "weatherwatt/regression.hpp"

#include "weatherwatt/errors.hpp"

#include <cmath>
#include <cstddef>
#include <limits>
#include <sstream>

namespace ww {

namespace {

/// Continued fraction for the regularized incomplete beta I_x(a, b),
/// modified Lentz method. Converges quickly when x < (a+1)/(a+b+2).
double beta_cf(double a, double b, double x) {
    constexpr double kTol = 1e-12;
    constexpr int kMaxIter = 300;
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::fabs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::fabs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::fabs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < kTol) return h;
    }
    throw ConvergenceError("incomplete beta continued fraction did not converge in 300 iterations");
}

double incomplete_beta(double a, double b, double x) {
    if (x <= 0.0) return 0.0;
    if (x >= 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // Use the symmetry relation so the continued fraction stays in its
    // fast-converging region.
    if (x < (a + 1.0) / (a + b + 2.0)) {
        return front * beta_cf(a, b, x) / a;
    }
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

} // namespace

double t_cdf(double t, long df) {
    if (df < 1) throw DimensionError("t_cdf requires df >= 1");
    if (std::isnan(t)) return std::numeric_limits<double>::quiet_NaN();
    if (std::isinf(t)) return t > 0.0 ? 1.0 : 0.0;
    if (t == 0.0) return 0.5;
    const double dfd = static_cast<double>(df);
    const double x = dfd / (dfd + t * t);
    const double tail = 0.5 * incomplete_beta(0.5 * dfd, 0.5, x);
    return t > 0.0 ? 1.0 - tail : tail;
}

DesignMatrix DesignMatrix::build(std::vector<std::string> names, const Matrix& features) {
    if (features.cols() != names.size()) {
        std::ostringstream msg;
        msg << "design matrix: " << names.size() << " names for "
            << features.cols() << " feature columns";
        throw DimensionError(msg.str());
    }
    const std::size_t n = features.rows();
    const std::size_t m = names.size();
    if (n < m + 2) {
        std::ostringstream msg;
        msg << "design matrix needs at least " << (m + 2) << " rows for " << m
            << " features, got " << n;
        throw DimensionError(msg.str());
    }
    Matrix x(n, m + 1);
    for (std::size_t i = 0; i < n; ++i) {
        x(i, 0) = 1.0;
        for (std::size_t j = 0; j < m; ++j) x(i, j + 1) = features(i, j);
    }
    return DesignMatrix{std::move(names), std::move(x)};
}

DesignMatrix DesignMatrix::from_frame(const TimeSeriesFrame& frame,
                                      const std::vector<std::string>& names) {
    const std::size_t n = frame.n_rows();
    Matrix features(n, names.size());
    for (std::size_t j = 0; j < names.size(); ++j) {
        const auto& col = frame.column(names[j]);
        for (std::size_t i = 0; i < n; ++i) features(i, j) = col[i];
    }
    return build(names, features);
}

FittedModel fit(const DesignMatrix& design, const std::vector<double>& y) {
    const std::size_t n = design.n();
    const std::size_t m = design.m();
    if (y.size() != n) {
        std::ostringstream msg;
        msg << "fit: " << y.size() << " targets for " << n << " rows";
        throw DimensionError(msg.str());
    }

    Matrix ymat(n, 1);
    for (std::size_t i = 0; i < n; ++i) ymat(i, 0) = y[i];

    const Matrix xt = transpose(design.x);
    const Matrix xtx_inv = invert(matmul(xt, design.x));
    const Matrix theta_mat = matmul(xtx_inv, matmul(xt, ymat));

    FittedModel model;
    model.feature_names = design.feature_names;
    model.theta.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) model.theta[j] = theta_mat(j, 0);

    double ss_res = 0.0;
    double y_mean = 0.0;
    for (double v : y) y_mean += v;
    y_mean /= static_cast<double>(n);
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = model.theta[0];
        for (std::size_t j = 1; j <= m; ++j) pred += model.theta[j] * design.x(i, j);
        const double r = pred - y[i];
        ss_res += r * r;
        const double d = y[i] - y_mean;
        ss_tot += d * d;
    }

    model.df = static_cast<long>(n) - static_cast<long>(m) - 1;
    model.train_cost = ss_res / (2.0 * static_cast<double>(n));
    model.residual_variance = ss_res / static_cast<double>(model.df);

    const double scale = std::max(1.0, ss_tot);
    if (ss_tot / scale < 1e-24) {
        // Constant target: the fit is exact iff the residuals vanish too.
        if (ss_res / scale < 1e-18) {
            model.r2_train = 1.0;
        } else {
            throw DegenerateDataError("target column is constant; coefficient of determination undefined");
        }
    } else {
        model.r2_train = 1.0 - ss_res / ss_tot;
    }

    model.std_errors.resize(m + 1);
    model.t_stats.resize(m + 1);
    model.p_values.resize(m + 1);
    for (std::size_t j = 0; j <= m; ++j) {
        const double var_j = model.residual_variance * xtx_inv(j, j);
        const double se = var_j > 0.0 ? std::sqrt(var_j) : 0.0;
        model.std_errors[j] = se;
        if (se == 0.0) {
            // Exact fit in direction j. Zero coefficient carries no
            // evidence (p = 1); a nonzero one is certain (p -> 0).
            // 1e300 keeps downstream serialization finite.
            if (model.theta[j] == 0.0) {
                model.t_stats[j] = 0.0;
                model.p_values[j] = 1.0;
            } else {
                model.t_stats[j] = model.theta[j] > 0.0 ? 1e300 : -1e300;
                model.p_values[j] = 0.0;
            }
        } else {
            const double t = model.theta[j] / se;
            model.t_stats[j] = t;
            model.p_values[j] = 2.0 * (1.0 - t_cdf(std::fabs(t), model.df));
        }
    }
    return model;
}

std::vector<double> predict(const FittedModel& model, const Matrix& features) {
    const std::size_t m = model.feature_names.size();
    if (features.cols() != m) {
        std::ostringstream msg;
        msg << "predict: model has " << m << " features, input has " << features.cols();
        throw DimensionError(msg.str());
    }
    std::vector<double> out(features.rows());
    for (std::size_t i = 0; i < features.rows(); ++i) {
        double v = model.theta[0];
        for (std::size_t j = 0; j < m; ++j) v += model.theta[j + 1] * features(i, j);
        out[i] = v;
    }
    return out;
}

double cost(const std::vector<double>& theta, const DesignMatrix& design,
            const std::vector<double>& y) {
    const std::size_t n = design.n();
    if (theta.size() != design.m() + 1) {
        throw DimensionError("cost: theta length does not match design width");
    }
    if (y.size() != n) throw DimensionError("cost: target length does not match row count");
    double acc = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        double pred = 0.0;
        for (std::size_t j = 0; j < theta.size(); ++j) pred += theta[j] * design.x(i, j);
        const double r = pred - y[i];
        acc += r * r;
    }
    return acc / (2.0 * static_cast<double>(n));
}

double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred) {
    if (y_true.size() != y_pred.size()) {
        throw DimensionError("r_squared: series lengths differ");
    }
    if (y_true.empty()) throw DimensionError("r_squared: empty input");
    const std::size_t n = y_true.size();
    double mean = 0.0;
    for (double v : y_true) mean += v;
    mean /= static_cast<double>(n);
    double ss_res = 0.0;
    double ss_tot = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double r = y_true[i] - y_pred[i];
        ss_res += r * r;
        const double d = y_true[i] - mean;
        ss_tot += d * d;
    }
    const double scale = std::max(1.0, ss_tot + ss_res);
    if (ss_tot / scale < 1e-24) {
        if (ss_res / scale < 1e-18) return 1.0;
        throw DegenerateDataError("true series is constant; coefficient of determination undefined");
    }
    return 1.0 - ss_res / ss_tot;
}

} // namespace ww
