#pragma once

#include <compare>
#include <cstdint>
#include <string>

namespace ww {

/// UTC instant at second precision. Sub-second input is truncated on parse.
class Timestamp {
public:
    Timestamp() = default;
    explicit Timestamp(std::int64_t seconds_since_epoch) : sec_(seconds_since_epoch) {}

    /// Parses ISO-8601 (e.g. 2017-03-01T12:00:00Z, optional .fraction,
    /// optional +hh:mm/-hh:mm offset, Z or no suffix meaning UTC).
    /// Throws IngestError on malformed input.
    static Timestamp parse(const std::string& text);

    /// Formats as YYYY-MM-DDTHH:MM:SSZ.
    std::string to_string() const;

    std::int64_t seconds() const { return sec_; }

    Timestamp plus_minutes(std::int64_t minutes) const { return Timestamp(sec_ + minutes * 60); }
    Timestamp plus_seconds(std::int64_t s) const { return Timestamp(sec_ + s); }

    auto operator<=>(const Timestamp&) const = default;

private:
    std::int64_t sec_ = 0;
};

} // namespace ww
