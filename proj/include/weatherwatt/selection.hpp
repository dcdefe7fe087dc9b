#pragma once

#include "weatherwatt/errors.hpp"
#include "weatherwatt/regression.hpp"
#include "weatherwatt/timeseries.hpp"

#include <string>
#include <vector>

namespace ww {

/// Pearson correlation coefficient. Throws DegenerateDataError when
/// either series is constant.
double pearson_r(const std::vector<double>& x, const std::vector<double>& y);

/// Single-feature relevance against one target. single_var_cod is the
/// squared correlation, which equals the univariate fit's R^2.
struct ScreeningEntry {
    std::string feature_name;
    double pearson_r = 0.0;
    double single_var_cod = 0.0;
    bool degenerate = false; // constant column, correlation undefined
};

struct ScreeningReport {
    std::string target_name;
    std::vector<ScreeningEntry> entries; // cod descending, ties by name, degenerate last
};

/// Screens every feature column of the frame against the named target.
/// A constant column marks its entry degenerate instead of failing.
ScreeningReport screen_single(const TimeSeriesFrame& frame, const std::string& target);

/// One completed elimination round: which feature was dropped, at what
/// p-value, and how the refit on the survivors scored.
struct EliminationRound {
    std::string removed_feature;
    double p_value_at_removal = 0.0;
    std::vector<std::string> surviving_features;
    double refit_r2 = 0.0;
};

struct EliminationTrace {
    std::vector<EliminationRound> rounds;
    FittedModel final_model;
    double sl = 0.0;
    bool intercept_only = false; // every feature was eliminated
};

/// A fit went singular mid-elimination; rounds holds the completed
/// rounds up to that point.
class EliminationAbort : public Error {
public:
    EliminationAbort(const std::string& what, std::vector<EliminationRound> partial)
        : Error(what), rounds(std::move(partial)) {}
    std::vector<EliminationRound> rounds;
};

/// Backward elimination at significance level sl: fit, and while the
/// largest non-intercept p-value is >= sl, drop that one feature and
/// refit. Ties break toward the lower column index; the intercept never
/// drops. sl must lie in (0, 1].
EliminationTrace backward_eliminate(const DesignMatrix& design,
                                    const std::vector<double>& y, double sl);

} // namespace ww
