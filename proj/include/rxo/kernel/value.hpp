#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace rxo {

enum class ScalarType { String, Integer, Float, DateTime, Boolean, Ref };

/// Scalar kind of an attribute. REF kinds carry the class they point into.
struct Kind {
    ScalarType type = ScalarType::String;
    std::string ref_class;

    static Kind string() { return {ScalarType::String, {}}; }
    static Kind integer() { return {ScalarType::Integer, {}}; }
    static Kind floating() { return {ScalarType::Float, {}}; }
    static Kind datetime() { return {ScalarType::DateTime, {}}; }
    static Kind boolean() { return {ScalarType::Boolean, {}}; }
    static Kind ref(std::string cls) { return {ScalarType::Ref, std::move(cls)}; }

    bool is_numeric() const { return type == ScalarType::Integer || type == ScalarType::Float; }

    friend bool operator==(const Kind&, const Kind&) = default;
};

std::string to_string(const Kind& kind);
std::optional<Kind> parse_kind(std::string_view text);

/// UTC timestamp, whole seconds since the Unix epoch.
struct Timestamp {
    std::int64_t seconds = 0;
    friend auto operator<=>(const Timestamp&, const Timestamp&) = default;
};

struct Oid {
    std::uint64_t value = 0;
    friend auto operator<=>(const Oid&, const Oid&) = default;
};

struct Null {
    friend auto operator<=>(const Null&, const Null&) = default;
};

/// A scalar value. The alternative order mirrors ScalarType, with NULL first.
using Value = std::variant<Null, std::string, std::int64_t, double, Timestamp, bool, Oid>;

inline bool is_null(const Value& v) { return std::holds_alternative<Null>(v); }

/// The ScalarType a non-NULL value carries.
ScalarType type_of(const Value& v);

/// NULL conforms to every kind; otherwise the alternative must match.
bool conforms(const Value& v, const Kind& kind);

/// Total order over values: NULL first, then by alternative, then by value.
/// Floats compare numerically with ties broken on the bit pattern, so
/// equality is bitwise.
std::strong_ordering compare_values(const Value& a, const Value& b);

inline bool values_equal(const Value& a, const Value& b) { return compare_values(a, b) == 0; }

struct ValueLess {
    bool operator()(const Value& a, const Value& b) const { return compare_values(a, b) < 0; }
};

using Tuple = std::vector<Value>;

struct TupleLess {
    bool operator()(const Tuple& a, const Tuple& b) const;
};

std::string format_datetime(Timestamp ts);
std::optional<Timestamp> parse_datetime(std::string_view text);

std::string format_float(double d);
std::optional<double> parse_float(std::string_view text);
std::optional<std::int64_t> parse_integer(std::string_view text);

/// Plain rendering used by table output and diagnostics (NULL -> "NULL").
std::string display(const Value& v);

} // namespace rxo
