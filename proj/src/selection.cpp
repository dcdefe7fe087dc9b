#include "weatherwatt/selection.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iostream>
#include <sstream>

namespace ww {

double pearson_r(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw DimensionError("pearson_r: series lengths differ");
    if (x.size() < 2) throw DimensionError("pearson_r: need at least 2 samples");
    const std::size_t n = x.size();
    double mx = 0.0;
    double my = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxy = 0.0;
    double sxx = 0.0;
    double syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx <= 0.0 || syy <= 0.0) {
        throw DegenerateDataError("pearson_r: constant series has no defined correlation");
    }
    return sxy / std::sqrt(sxx * syy);
}

ScreeningReport screen_single(const TimeSeriesFrame& frame, const std::string& target) {
    if (!frame.has_column(target) || frame.role(target) != ColumnRole::target) {
        throw ConfigError("screen: '" + target + "' is not a target column");
    }
    const auto features = frame.feature_names();
    if (features.empty()) throw ConfigError("screen: frame has no feature columns");

    const auto& y = frame.column(target);
    ScreeningReport report;
    report.target_name = target;
    for (const auto& name : features) {
        ScreeningEntry entry;
        entry.feature_name = name;
        try {
            entry.pearson_r = pearson_r(frame.column(name), y);
            entry.single_var_cod = entry.pearson_r * entry.pearson_r;
        } catch (const DegenerateDataError&) {
            entry.degenerate = true;
        }
        report.entries.push_back(std::move(entry));
    }
    std::stable_sort(report.entries.begin(), report.entries.end(),
                     [](const ScreeningEntry& a, const ScreeningEntry& b) {
                         if (a.degenerate != b.degenerate) return !a.degenerate;
                         if (a.single_var_cod != b.single_var_cod) {
                             return a.single_var_cod > b.single_var_cod;
                         }
                         return a.feature_name < b.feature_name;
                     });
    return report;
}

namespace {

/// Rebuilds a design holding only the named subset of the original
/// feature columns (bias column regenerated).
DesignMatrix sub_design(const DesignMatrix& design, const std::vector<std::string>& keep) {
    Matrix features(design.n(), keep.size());
    for (std::size_t j = 0; j < keep.size(); ++j) {
        std::size_t src = design.feature_names.size();
        for (std::size_t k = 0; k < design.feature_names.size(); ++k) {
            if (design.feature_names[k] == keep[j]) {
                src = k;
                break;
            }
        }
        if (src == design.feature_names.size()) {
            throw DimensionError("elimination: unknown feature '" + keep[j] + "'");
        }
        for (std::size_t i = 0; i < design.n(); ++i) features(i, j) = design.x(i, src + 1);
    }
    return DesignMatrix::build(keep, features);
}

} // namespace

EliminationTrace backward_eliminate(const DesignMatrix& design,
                                    const std::vector<double>& y, double sl) {
    if (!(sl > 0.0 && sl <= 1.0)) {
        throw ConfigError("significance level must be in (0, 1]");
    }

    EliminationTrace trace;
    trace.sl = sl;
    std::vector<std::string> current = design.feature_names;

    FittedModel model;
    try {
        model = fit(design, y);
    } catch (const SingularMatrixError& e) {
        throw EliminationAbort(std::string("backward elimination: initial fit is singular (") +
                                   e.what() + ")",
                               trace.rounds);
    }

    while (true) {
        // Worst p-value among the non-intercept coefficients; strict >
        // keeps the earliest column on ties.
        std::size_t worst = 0;
        double worst_p = -1.0;
        for (std::size_t j = 0; j < current.size(); ++j) {
            if (model.p_values[j + 1] > worst_p) {
                worst_p = model.p_values[j + 1];
                worst = j;
            }
        }

        if (current.empty() || worst_p < sl) {
            trace.final_model = std::move(model);
            return trace;
        }

        EliminationRound round;
        round.removed_feature = current[worst];
        round.p_value_at_removal = worst_p;
        current.erase(current.begin() + static_cast<std::ptrdiff_t>(worst));
        round.surviving_features = current;

        if (current.empty()) {
            std::cerr << "warning: backward elimination removed every feature; "
                         "falling back to intercept-only model\n";
            trace.intercept_only = true;
        }
        try {
            model = fit(sub_design(design, current), y);
        } catch (const SingularMatrixError& e) {
            std::ostringstream msg;
            msg << "backward elimination: refit after removing '" << round.removed_feature
                << "' is singular (" << e.what() << ")";
            throw EliminationAbort(msg.str(), trace.rounds);
        }
        round.refit_r2 = model.r2_train;
        trace.rounds.push_back(std::move(round));

        if (current.empty()) {
            trace.final_model = std::move(model);
            return trace;
        }
    }
}

} // namespace ww
