#pragma once

#include "weatherwatt/matrix.hpp"
#include "weatherwatt/timeseries.hpp"

#include <string>
#include <vector>

namespace ww {

/// Feature matrix with a prepended all-ones bias column. n rows,
/// m named features, x is n x (m+1).
struct DesignMatrix {
    std::vector<std::string> feature_names;
    Matrix x;

    std::size_t n() const { return x.rows(); }
    std::size_t m() const { return feature_names.size(); }

    /// features is n x m without the bias column. Requires n >= m + 2
    /// so the inference degrees of freedom are at least 1.
    static DesignMatrix build(std::vector<std::string> names, const Matrix& features);

    /// Pulls the named feature columns out of a frame, in the given order.
    static DesignMatrix from_frame(const TimeSeriesFrame& frame,
                                   const std::vector<std::string>& names);
};

/// Linear hypothesis parameters plus per-coefficient inference.
/// Index 0 of every vector is the intercept.
struct FittedModel {
    std::vector<std::string> feature_names;
    std::vector<double> theta;
    std::vector<double> std_errors;
    std::vector<double> t_stats;
    std::vector<double> p_values;
    double train_cost = 0.0;
    double r2_train = 0.0;
    double residual_variance = 0.0;
    long df = 0;
};

/// Solves the normal equation for theta and fills in the standard OLS
/// inference: SE_j = sqrt(s2 * [(X^T X)^-1]_jj), t_j = theta_j / SE_j,
/// p_j = 2 (1 - T_df(|t_j|)) with df = n - m - 1.
FittedModel fit(const DesignMatrix& design, const std::vector<double>& y);

/// y_hat_i = theta_0 + sum_j theta_j x_ij. features is n' x m.
std::vector<double> predict(const FittedModel& model, const Matrix& features);

/// Mean squared error cost: (1/2n) sum (h_theta(x_i) - y_i)^2.
double cost(const std::vector<double>& theta, const DesignMatrix& design,
            const std::vector<double>& y);

/// Coefficient of determination 1 - SS_res/SS_tot. May be negative on
/// held-out data. Throws DegenerateDataError when y_true is constant
/// and the residuals are not all (near) zero.
double r_squared(const std::vector<double>& y_true, const std::vector<double>& y_pred);

/// Student-t CDF via the regularized incomplete beta function
/// (continued fraction, tolerance 1e-12, at most 300 iterations).
double t_cdf(double t, long df);

} // namespace ww
