#include "weatherwatt/timeseries.hpp"

#include "weatherwatt/errors.hpp"
#include "weatherwatt/kvconfig.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <numeric>
#include <sstream>
#include <unordered_set>

namespace ww {

namespace {

std::string trim(const std::string& s) {
    const std::size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    const std::size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
}

std::vector<std::string> split_fields(const std::string& line) {
    std::vector<std::string> fields;
    std::string::size_type start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        if (comma == std::string::npos) {
            fields.push_back(trim(line.substr(start)));
            break;
        }
        fields.push_back(trim(line.substr(start, comma - start)));
        start = comma + 1;
    }
    return fields;
}

bool parse_strict_double(const std::string& text, double& out) {
    if (text.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(text.c_str(), &end);
    if (end != text.c_str() + text.size()) return false;
    if (!std::isfinite(v)) return false;
    out = v;
    return true;
}

void format_double(std::string& out, double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    out += buf;
}

} // namespace

TimeSeriesFrame TimeSeriesFrame::create(std::vector<std::string> names, std::vector<ColumnRole> roles,
                                        std::vector<Timestamp> timestamps,
                                        std::vector<std::vector<double>> columns) {
    if (names.size() != roles.size() || names.size() != columns.size()) {
        throw DimensionError("frame column metadata sizes differ");
    }
    std::unordered_set<std::string> seen;
    for (const auto& name : names) {
        if (!seen.insert(name).second) throw DimensionError("duplicate column name: " + name);
    }
    for (std::size_t c = 0; c < columns.size(); ++c) {
        if (columns[c].size() != timestamps.size()) {
            throw DimensionError("column '" + names[c] + "' length does not match row count");
        }
        for (double v : columns[c]) {
            if (!std::isfinite(v)) throw DimensionError("column '" + names[c] + "' has a non-finite value");
        }
    }
    for (std::size_t i = 1; i < timestamps.size(); ++i) {
        if (!(timestamps[i - 1] < timestamps[i])) {
            throw DimensionError("timestamps not strictly increasing at row " + std::to_string(i));
        }
    }
    TimeSeriesFrame frame;
    frame.names_ = std::move(names);
    frame.roles_ = std::move(roles);
    frame.timestamps_ = std::move(timestamps);
    frame.columns_ = std::move(columns);
    return frame;
}

std::size_t TimeSeriesFrame::index_of(const std::string& name) const {
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (names_[i] == name) return i;
    }
    throw DimensionError("no such column: " + name);
}

bool TimeSeriesFrame::has_column(const std::string& name) const {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

ColumnRole TimeSeriesFrame::role(const std::string& name) const { return roles_[index_of(name)]; }

const std::vector<double>& TimeSeriesFrame::column(const std::string& name) const {
    return columns_[index_of(name)];
}

std::vector<std::string> TimeSeriesFrame::feature_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (roles_[i] == ColumnRole::feature) out.push_back(names_[i]);
    }
    return out;
}

std::vector<std::string> TimeSeriesFrame::target_names() const {
    std::vector<std::string> out;
    for (std::size_t i = 0; i < names_.size(); ++i) {
        if (roles_[i] == ColumnRole::target) out.push_back(names_[i]);
    }
    return out;
}

SensorReading TimeSeriesFrame::row(std::size_t i) const {
    SensorReading reading;
    reading.timestamp = timestamps_[i];
    reading.values.reserve(columns_.size());
    for (const auto& col : columns_) reading.values.push_back(col[i]);
    return reading;
}

TimeSeriesFrame TimeSeriesFrame::slice(std::size_t begin, std::size_t end) const {
    if (begin > end || end > n_rows()) throw DimensionError("slice out of range");
    std::vector<Timestamp> ts(timestamps_.begin() + begin, timestamps_.begin() + end);
    std::vector<std::vector<double>> cols;
    cols.reserve(columns_.size());
    for (const auto& col : columns_) {
        cols.emplace_back(col.begin() + begin, col.begin() + end);
    }
    return create(names_, roles_, std::move(ts), std::move(cols));
}

TimeSeriesFrame parse_csv(const std::filesystem::path& path, const RoleMap& schema,
                          ParseStats* stats) {
    std::ifstream in(path);
    if (!in) throw IngestError("cannot open csv file: " + path.string());

    std::string line;
    if (!std::getline(in, line)) throw IngestError("empty csv file: " + path.string());
    const std::vector<std::string> header = split_fields(line);

    std::size_t ts_col = header.size();
    std::vector<std::string> names;
    std::vector<std::size_t> value_cols;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == "timestamp") {
            ts_col = i;
            continue;
        }
        if (!schema.count(header[i])) {
            throw IngestError(path.string() + ": column '" + header[i] + "' not present in schema");
        }
        names.push_back(header[i]);
        value_cols.push_back(i);
    }
    if (ts_col == header.size()) throw IngestError(path.string() + ": missing 'timestamp' column");

    std::vector<ColumnRole> roles;
    for (const auto& name : names) roles.push_back(schema.at(name));

    struct RawRow {
        Timestamp ts;
        std::vector<double> values;
    };
    std::vector<RawRow> rows;
    ParseStats local{};

    while (std::getline(in, line)) {
        if (trim(line).empty()) continue;
        const std::vector<std::string> fields = split_fields(line);
        if (fields.size() != header.size()) {
            ++local.rows_dropped;
            continue;
        }
        RawRow row;
        bool ok = true;
        try {
            row.ts = Timestamp::parse(fields[ts_col]);
        } catch (const IngestError&) {
            ok = false;
        }
        if (ok) {
            row.values.reserve(value_cols.size());
            for (std::size_t c : value_cols) {
                double v = 0.0;
                if (!parse_strict_double(fields[c], v)) {
                    ok = false;
                    break;
                }
                row.values.push_back(v);
            }
        }
        if (!ok) {
            ++local.rows_dropped;
            continue;
        }
        rows.push_back(std::move(row));
    }

    std::stable_sort(rows.begin(), rows.end(),
                     [](const RawRow& a, const RawRow& b) { return a.ts < b.ts; });

    std::vector<Timestamp> timestamps;
    std::vector<std::vector<double>> columns(names.size());
    timestamps.reserve(rows.size());
    for (const auto& row : rows) {
        if (!timestamps.empty() && row.ts == timestamps.back()) {
            // duplicate timestamp within one stream: keep first occurrence
            ++local.duplicates_dropped;
            continue;
        }
        timestamps.push_back(row.ts);
        for (std::size_t c = 0; c < names.size(); ++c) columns[c].push_back(row.values[c]);
    }
    if (local.duplicates_dropped > 0) {
        std::cerr << "warning: " << path.string() << ": dropped " << local.duplicates_dropped
                  << " duplicate-timestamp rows (kept first occurrence)\n";
    }
    if (stats) *stats = local;
    return TimeSeriesFrame::create(std::move(names), std::move(roles), std::move(timestamps),
                                   std::move(columns));
}

std::string frame_to_csv(const TimeSeriesFrame& frame) {
    std::string out = "timestamp";
    for (const auto& name : frame.column_names()) {
        out += ',';
        out += name;
    }
    out += '\n';
    const auto& names = frame.column_names();
    std::vector<const std::vector<double>*> cols;
    cols.reserve(names.size());
    for (const auto& name : names) cols.push_back(&frame.column(name));
    for (std::size_t i = 0; i < frame.n_rows(); ++i) {
        out += frame.timestamps()[i].to_string();
        for (const auto* col : cols) {
            out += ',';
            format_double(out, (*col)[i]);
        }
        out += '\n';
    }
    return out;
}

void write_csv(const TimeSeriesFrame& frame, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IngestError("cannot write csv file: " + path.string());
    out << frame_to_csv(frame);
}

TimeSeriesFrame shift_timestamps(const TimeSeriesFrame& frame, int delta_minutes,
                                 int max_abs_minutes) {
    if (std::abs(delta_minutes) > max_abs_minutes) {
        throw ConfigError("timestamp shift " + std::to_string(delta_minutes) +
                          " min exceeds the configured maximum of " +
                          std::to_string(max_abs_minutes) + " min");
    }
    std::vector<Timestamp> shifted;
    shifted.reserve(frame.n_rows());
    for (const auto& ts : frame.timestamps()) shifted.push_back(ts.plus_minutes(delta_minutes));
    std::vector<std::vector<double>> columns;
    std::vector<ColumnRole> roles;
    for (const auto& name : frame.column_names()) {
        columns.push_back(frame.column(name));
        roles.push_back(frame.role(name));
    }
    return TimeSeriesFrame::create(frame.column_names(), std::move(roles), std::move(shifted),
                                   std::move(columns));
}

TimeSeriesFrame align_join(const TimeSeriesFrame& weather, const TimeSeriesFrame& power) {
    for (const auto& name : power.column_names()) {
        if (weather.has_column(name)) {
            throw DimensionError("align_join: column '" + name + "' appears in both inputs");
        }
    }

    // two-pointer walk over the sorted timestamp vectors
    std::vector<std::size_t> left_idx, right_idx;
    const auto& lt = weather.timestamps();
    const auto& rt = power.timestamps();
    std::size_t i = 0, j = 0;
    while (i < lt.size() && j < rt.size()) {
        if (lt[i] < rt[j]) {
            ++i;
        } else if (rt[j] < lt[i]) {
            ++j;
        } else {
            left_idx.push_back(i++);
            right_idx.push_back(j++);
        }
    }

    std::vector<std::string> names = weather.column_names();
    std::vector<ColumnRole> roles;
    for (const auto& name : weather.column_names()) roles.push_back(weather.role(name));
    for (const auto& name : power.column_names()) {
        names.push_back(name);
        roles.push_back(power.role(name));
    }

    std::vector<Timestamp> timestamps;
    timestamps.reserve(left_idx.size());
    for (std::size_t k : left_idx) timestamps.push_back(lt[k]);

    std::vector<std::vector<double>> columns;
    columns.reserve(names.size());
    for (const auto& name : weather.column_names()) {
        const auto& src = weather.column(name);
        std::vector<double> col;
        col.reserve(left_idx.size());
        for (std::size_t k : left_idx) col.push_back(src[k]);
        columns.push_back(std::move(col));
    }
    for (const auto& name : power.column_names()) {
        const auto& src = power.column(name);
        std::vector<double> col;
        col.reserve(right_idx.size());
        for (std::size_t k : right_idx) col.push_back(src[k]);
        columns.push_back(std::move(col));
    }

    if (timestamps.empty()) {
        std::cerr << "warning: align_join produced an empty frame (no shared timestamps)\n";
    }
    return TimeSeriesFrame::create(std::move(names), std::move(roles), std::move(timestamps),
                                   std::move(columns));
}

std::pair<TimeSeriesFrame, TimeSeriesFrame> split_chronological(const TimeSeriesFrame& frame,
                                                                double train_fraction) {
    if (!(train_fraction > 0.0 && train_fraction < 1.0)) {
        throw ConfigError("train_fraction must lie in (0,1), got " + std::to_string(train_fraction));
    }
    const std::size_t n = frame.n_rows();
    if (n < 2) throw ConfigError("split needs at least 2 rows, got " + std::to_string(n));
    const auto train_count =
        static_cast<std::size_t>(std::ceil(train_fraction * static_cast<double>(n)));
    if (train_count >= n) {
        throw ConfigError("split leaves an empty test set (train_fraction too large for " +
                          std::to_string(n) + " rows)");
    }
    return {frame.slice(0, train_count), frame.slice(train_count, n)};
}

RoleMap parse_roles_file(const std::filesystem::path& path) {
    RoleMap roles;
    for (const auto& [key, value] : parse_kv_file(path)) {
        ColumnRole role;
        if (value == "feature") {
            role = ColumnRole::feature;
        } else if (value == "target") {
            role = ColumnRole::target;
        } else {
            throw ConfigError(path.string() + ": column '" + key +
                              "' must be 'feature' or 'target', got '" + value + "'");
        }
        if (!roles.emplace(key, role).second) {
            throw ConfigError(path.string() + ": duplicate column '" + key + "'");
        }
    }
    if (roles.empty()) throw ConfigError(path.string() + ": no column roles defined");
    return roles;
}

} // namespace ww
