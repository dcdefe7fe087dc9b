#pragma once

#include "weatherwatt/timestamp.hpp"

#include <filesystem>
#include <map>
#include <string>
#include <utility>
#include <vector>

namespace ww {

enum class ColumnRole { feature, target };

/// name -> role for every non-timestamp column. std::map keeps
/// iteration deterministic.
using RoleMap = std::map<std::string, ColumnRole>;

/// One row of a frame: a timestamp plus the value of every column, in
/// the frame's column order.
struct SensorReading {
    Timestamp timestamp;
    std::vector<double> values;
};

/// Timestamp-indexed table of named numeric columns. Rows are strictly
/// increasing in time and fully populated; immutable once built.
class TimeSeriesFrame {
public:
    TimeSeriesFrame() = default;

    /// Validates sizes, finiteness and strict timestamp ordering.
    static TimeSeriesFrame create(std::vector<std::string> names, std::vector<ColumnRole> roles,
                                  std::vector<Timestamp> timestamps,
                                  std::vector<std::vector<double>> columns);

    std::size_t n_rows() const { return timestamps_.size(); }
    std::size_t n_cols() const { return names_.size(); }
    bool empty() const { return timestamps_.empty(); }

    const std::vector<std::string>& column_names() const { return names_; }
    const std::vector<Timestamp>& timestamps() const { return timestamps_; }

    bool has_column(const std::string& name) const;
    ColumnRole role(const std::string& name) const;
    const std::vector<double>& column(const std::string& name) const;

    std::vector<std::string> feature_names() const;
    std::vector<std::string> target_names() const;

    SensorReading row(std::size_t i) const;

    /// Row slice [begin, end); keeps columns and roles.
    TimeSeriesFrame slice(std::size_t begin, std::size_t end) const;

private:
    std::size_t index_of(const std::string& name) const;

    std::vector<std::string> names_;
    std::vector<ColumnRole> roles_;
    std::vector<Timestamp> timestamps_;
    std::vector<std::vector<double>> columns_; // column-major, one vector per name
};

/// Rows removed while cleaning a CSV stream.
struct ParseStats {
    std::size_t rows_dropped = 0;       // unparseable numerics or holes
    std::size_t duplicates_dropped = 0; // repeated timestamps, first kept
};

/// Reads a headered CSV with a `timestamp` column. Every other header
/// column must appear in the schema. Rows with missing or unparseable
/// cells are dropped and counted; output is sorted by timestamp with
/// duplicate timestamps reduced to their first occurrence.
TimeSeriesFrame parse_csv(const std::filesystem::path& path, const RoleMap& schema,
                          ParseStats* stats = nullptr);

/// Serializes a frame back to the ingestion CSV schema (17 significant
/// digit reals, exact round-trip).
std::string frame_to_csv(const TimeSeriesFrame& frame);
void write_csv(const TimeSeriesFrame& frame, const std::filesystem::path& path);

inline constexpr int kDefaultMaxShiftMinutes = 60;

/// Translates every timestamp by delta_minutes; values untouched.
/// Throws ConfigError when |delta| exceeds max_abs_minutes.
TimeSeriesFrame shift_timestamps(const TimeSeriesFrame& frame, int delta_minutes,
                                 int max_abs_minutes = kDefaultMaxShiftMinutes);

/// Exact-timestamp inner join; output rows are the timestamp
/// intersection carrying all columns of both inputs. Column names must
/// be disjoint. Empty intersection produces an empty frame and a
/// warning on stderr.
TimeSeriesFrame align_join(const TimeSeriesFrame& weather, const TimeSeriesFrame& power);

/// First ceil(train_fraction * n) rows by time form the train frame,
/// the remainder the test frame. No shuffling.
std::pair<TimeSeriesFrame, TimeSeriesFrame> split_chronological(const TimeSeriesFrame& frame,
                                                                double train_fraction);

/// Reads a `name = feature|target` roles file.
RoleMap parse_roles_file(const std::filesystem::path& path);

} // namespace ww
