#include "rxo/kernel/value.hpp"

#include <bit>
#include <charconv>
#include <cmath>
#include <cstdio>

namespace rxo {

std::string to_string(const Kind& kind) {
    switch (kind.type) {
    case ScalarType::String: return "STRING";
    case ScalarType::Integer: return "INTEGER";
    case ScalarType::Float: return "FLOAT";
    case ScalarType::DateTime: return "DATETIME";
    case ScalarType::Boolean: return "BOOLEAN";
    case ScalarType::Ref: return "REF(" + kind.ref_class + ")";
    }
    return "?";
}

std::optional<Kind> parse_kind(std::string_view text) {
    if (text == "STRING") return Kind::string();
    if (text == "INTEGER") return Kind::integer();
    if (text == "FLOAT") return Kind::floating();
    if (text == "DATETIME") return Kind::datetime();
    if (text == "BOOLEAN") return Kind::boolean();
    if (text.starts_with("REF(") && text.ends_with(")") && text.size() > 5) {
        return Kind::ref(std::string(text.substr(4, text.size() - 5)));
    }
    return std::nullopt;
}

ScalarType type_of(const Value& v) {
    switch (v.index()) {
    case 1: return ScalarType::String;
    case 2: return ScalarType::Integer;
    case 3: return ScalarType::Float;
    case 4: return ScalarType::DateTime;
    case 5: return ScalarType::Boolean;
    case 6: return ScalarType::Ref;
    default: return ScalarType::String;
    }
}

bool conforms(const Value& v, const Kind& kind) {
    return is_null(v) || type_of(v) == kind.type;
}

std::strong_ordering compare_values(const Value& a, const Value& b) {
    if (a.index() != b.index()) return a.index() <=> b.index();
    switch (a.index()) {
    case 0: return std::strong_ordering::equal;
    case 1: {
        int c = std::get<std::string>(a).compare(std::get<std::string>(b));
        return c <=> 0;
    }
    case 2: return std::get<std::int64_t>(a) <=> std::get<std::int64_t>(b);
    case 3: {
        double x = std::get<double>(a);
        double y = std::get<double>(b);
        if (x < y) return std::strong_ordering::less;
        if (x > y) return std::strong_ordering::greater;
        return std::bit_cast<std::uint64_t>(x) <=> std::bit_cast<std::uint64_t>(y);
    }
    case 4: return std::get<Timestamp>(a) <=> std::get<Timestamp>(b);
    case 5: return std::get<bool>(a) <=> std::get<bool>(b);
    case 6: return std::get<Oid>(a) <=> std::get<Oid>(b);
    }
    return std::strong_ordering::equal;
}

bool TupleLess::operator()(const Tuple& a, const Tuple& b) const {
    const std::size_t n = std::min(a.size(), b.size());
    for (std::size_t i = 0; i < n; ++i) {
        auto c = compare_values(a[i], b[i]);
        if (c != 0) return c < 0;
    }
    return a.size() < b.size();
}

namespace {

// Proleptic Gregorian conversions (days relative to 1970-01-01).
std::int64_t days_from_civil(std::int64_t y, unsigned m, unsigned d) {
    y -= m <= 2;
    const std::int64_t era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
    const unsigned doe = yoe * 365 + yoe / 4 - yoe / 100 + doy;
    return era * 146097 + static_cast<std::int64_t>(doe) - 719468;
}

void civil_from_days(std::int64_t z, std::int64_t& y, unsigned& m, unsigned& d) {
    z += 719468;
    const std::int64_t era = (z >= 0 ? z : z - 146096) / 146097;
    const unsigned doe = static_cast<unsigned>(z - era * 146097);
    const unsigned yoe = (doe - doe / 1460 + doe / 36524 - doe / 146096) / 365;
    y = static_cast<std::int64_t>(yoe) + era * 400;
    const unsigned doy = doe - (365 * yoe + yoe / 4 - yoe / 100);
    const unsigned mp = (5 * doy + 2) / 153;
    d = doy - (153 * mp + 2) / 5 + 1;
    m = mp < 10 ? mp + 3 : mp - 9;
    y += m <= 2;
}

bool is_leap(std::int64_t y) { return (y % 4 == 0 && y % 100 != 0) || y % 400 == 0; }

unsigned days_in_month(std::int64_t y, unsigned m) {
    static constexpr unsigned table[] = {31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31};
    return m == 2 && is_leap(y) ? 29 : table[m - 1];
}

bool read_digits(std::string_view s, std::size_t pos, std::size_t count, unsigned& out) {
    out = 0;
    for (std::size_t i = pos; i < pos + count; ++i) {
        if (s[i] < '0' || s[i] > '9') return false;
        out = out * 10 + static_cast<unsigned>(s[i] - '0');
    }
    return true;
}

} // namespace

std::string format_datetime(Timestamp ts) {
    std::int64_t days = ts.seconds / 86400;
    std::int64_t rem = ts.seconds % 86400;
    if (rem < 0) {
        rem += 86400;
        days -= 1;
    }
    std::int64_t y;
    unsigned m, d;
    civil_from_days(days, y, m, d);
    char buf[40];
    std::snprintf(buf, sizeof buf, "%04lld-%02u-%02uT%02lld:%02lld:%02lldZ", static_cast<long long>(y), m, d,
                  static_cast<long long>(rem / 3600), static_cast<long long>(rem % 3600 / 60),
                  static_cast<long long>(rem % 60));
    return buf;
}

// Accepts exactly YYYY-MM-DDTHH:MM:SSZ.
std::optional<Timestamp> parse_datetime(std::string_view s) {
    if (s.size() != 20 || s[4] != '-' || s[7] != '-' || s[10] != 'T' || s[13] != ':' || s[16] != ':' ||
        s[19] != 'Z') {
        return std::nullopt;
    }
    unsigned y, mo, d, h, mi, se;
    if (!read_digits(s, 0, 4, y) || !read_digits(s, 5, 2, mo) || !read_digits(s, 8, 2, d) ||
        !read_digits(s, 11, 2, h) || !read_digits(s, 14, 2, mi) || !read_digits(s, 17, 2, se)) {
        return std::nullopt;
    }
    if (mo < 1 || mo > 12 || d < 1 || d > days_in_month(y, mo) || h > 23 || mi > 59 || se > 59) {
        return std::nullopt;
    }
    return Timestamp{days_from_civil(y, mo, d) * 86400 + h * 3600 + mi * 60 + se};
}

std::string format_float(double d) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, d);
    return std::string(buf, res.ptr);
}

std::optional<double> parse_float(std::string_view text) {
    double d = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), d);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size() || std::isnan(d)) return std::nullopt;
    return d;
}

std::optional<std::int64_t> parse_integer(std::string_view text) {
    std::int64_t v = 0;
    auto res = std::from_chars(text.data(), text.data() + text.size(), v);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) return std::nullopt;
    return v;
}

std::string display(const Value& v) {
    switch (v.index()) {
    case 0: return "NULL";
    case 1: return std::get<std::string>(v);
    case 2: return std::to_string(std::get<std::int64_t>(v));
    case 3: return format_float(std::get<double>(v));
    case 4: return format_datetime(std::get<Timestamp>(v));
    case 5: return std::get<bool>(v) ? "true" : "false";
    case 6: return std::to_string(std::get<Oid>(v).value);
    }
    return "?";
}

} // namespace rxo
