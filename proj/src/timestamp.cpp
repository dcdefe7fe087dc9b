#include "weatherwatt/timestamp.hpp"

#include "weatherwatt/errors.hpp"

#include <chrono>
#include <cctype>
#include <cstdio>

namespace ww {

namespace {

bool parse_fixed_int(const std::string& s, std::size_t pos, std::size_t len, int& out) {
    if (pos + len > s.size()) return false;
    int v = 0;
    for (std::size_t i = pos; i < pos + len; ++i) {
        if (!std::isdigit(static_cast<unsigned char>(s[i]))) return false;
        v = v * 10 + (s[i] - '0');
    }
    out = v;
    return true;
}

} // namespace

Timestamp Timestamp::parse(const std::string& raw) {
    std::size_t begin = raw.find_first_not_of(" \t\r\n");
    std::size_t end = raw.find_last_not_of(" \t\r\n");
    if (begin == std::string::npos) throw IngestError("empty timestamp");
    const std::string s = raw.substr(begin, end - begin + 1);

    int year = 0, month = 0, day = 0, hour = 0, minute = 0, second = 0;
    if (!parse_fixed_int(s, 0, 4, year) || s.size() < 19 ||
        s[4] != '-' || !parse_fixed_int(s, 5, 2, month) ||
        s[7] != '-' || !parse_fixed_int(s, 8, 2, day) ||
        (s[10] != 'T' && s[10] != 't' && s[10] != ' ') ||
        !parse_fixed_int(s, 11, 2, hour) ||
        s[13] != ':' || !parse_fixed_int(s, 14, 2, minute) ||
        s[16] != ':' || !parse_fixed_int(s, 17, 2, second)) {
        throw IngestError("malformed timestamp: '" + s + "'");
    }

    std::size_t pos = 19;
    if (pos < s.size() && s[pos] == '.') {
        // fractional seconds: truncated to second precision
        ++pos;
        std::size_t digits = 0;
        while (pos < s.size() && std::isdigit(static_cast<unsigned char>(s[pos]))) {
            ++pos;
            ++digits;
        }
        if (digits == 0) throw IngestError("malformed timestamp fraction: '" + s + "'");
    }

    std::int64_t offset_seconds = 0;
    if (pos < s.size()) {
        const char c = s[pos];
        if (c == 'Z' || c == 'z') {
            ++pos;
        } else if (c == '+' || c == '-') {
            int oh = 0, om = 0;
            std::size_t opos = pos + 1;
            if (!parse_fixed_int(s, opos, 2, oh)) throw IngestError("malformed timestamp offset: '" + s + "'");
            opos += 2;
            if (opos < s.size() && s[opos] == ':') ++opos;
            if (!parse_fixed_int(s, opos, 2, om)) throw IngestError("malformed timestamp offset: '" + s + "'");
            opos += 2;
            offset_seconds = (static_cast<std::int64_t>(oh) * 60 + om) * 60;
            if (c == '-') offset_seconds = -offset_seconds;
            pos = opos;
        }
    }
    if (pos != s.size()) throw IngestError("trailing characters in timestamp: '" + s + "'");

    using namespace std::chrono;
    const year_month_day ymd{std::chrono::year{year} / month / day};
    if (!ymd.ok() || hour > 23 || minute > 59 || second > 59) {
        throw IngestError("invalid calendar time: '" + s + "'");
    }
    const sys_days days{ymd};
    const std::int64_t local =
        static_cast<std::int64_t>(days.time_since_epoch().count()) * 86400 +
        hour * 3600 + minute * 60 + second;
    return Timestamp(local - offset_seconds);
}

std::string Timestamp::to_string() const {
    using namespace std::chrono;
    std::int64_t days = sec_ / 86400;
    std::int64_t rem = sec_ % 86400;
    if (rem < 0) {
        rem += 86400;
        --days;
    }
    const year_month_day ymd{sys_days{std::chrono::days{days}}};
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%04d-%02u-%02uT%02d:%02d:%02dZ",
                  static_cast<int>(ymd.year()), static_cast<unsigned>(ymd.month()),
                  static_cast<unsigned>(ymd.day()), static_cast<int>(rem / 3600),
                  static_cast<int>((rem % 3600) / 60), static_cast<int>(rem % 60));
    return buf;
}

} // namespace ww
