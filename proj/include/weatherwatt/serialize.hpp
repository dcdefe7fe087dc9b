#pragma once

#include "weatherwatt/pipeline.hpp"
#include "weatherwatt/regression.hpp"
#include "weatherwatt/selection.hpp"

#include <json.hpp>

#include <string>

namespace ww {

/// JSON shapes are stable contracts: readers depend on the exact field
/// names, and serialized reals round-trip to the identical bits.
nlohmann::json to_json(const FittedModel& model);
FittedModel model_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ScreeningReport& report);
ScreeningReport screening_from_json(const nlohmann::json& j);

nlohmann::json to_json(const EliminationTrace& trace);
EliminationTrace trace_from_json(const nlohmann::json& j);

nlohmann::json to_json(const ForecastReport& report);
ForecastReport report_from_json(const nlohmann::json& j);

/// lag_steps,lag_minutes,pearson_r rows behind a comment line carrying
/// the median inter-row duration.
std::string lag_scan_to_csv(const LagScanResult& result);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& content);

} // namespace ww
