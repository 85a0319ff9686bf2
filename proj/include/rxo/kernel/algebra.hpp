#pragma once

#include "rxo/kernel/expr.hpp"
#include "rxo/kernel/relation.hpp"

#include <string>
#include <utility>
#include <vector>

namespace rxo::kernel {

/// Tuples of `rel` satisfying `pred`.
Relation select(const Relation& rel, const ExprPtr& pred);

/// Restriction to `attributes` in the given order; duplicates collapse.
Relation project(const Relation& rel, const std::vector<std::string>& attributes);

struct JoinPair {
    std::string left;
    std::string right;
};

/// Equijoin. The result header is left ++ right; right attribute names that
/// collide with an existing name are prefixed with "r." until unique. NULL
/// never matches.
Relation join(const Relation& left, const Relation& right, const std::vector<JoinPair>& on);

/// Like join, but left tuples without a partner are kept, padded with NULL.
Relation left_join(const Relation& left, const Relation& right, const std::vector<JoinPair>& on);

/// Set union; headers must be equal.
Relation union_of(const Relation& a, const Relation& b);

Relation difference(const Relation& a, const Relation& b);

enum class AggregateFn { Sum, Count, Min, Max, Avg };

struct AggregateSpec {
    AggregateFn fn;
    std::string attribute; // empty with Count counts tuples
    std::string out_name;
};

std::string to_string(AggregateFn fn);

/// Result kind of an aggregate over an input kind.
Kind aggregate_kind(AggregateFn fn, const Kind& input);

/// Grouped aggregation. NULL inputs are ignored; SUM/AVG/MIN/MAX over only
/// NULLs give NULL and COUNT gives 0. With no group attributes the result
/// has exactly one tuple, even for empty input.
Relation aggregate(const Relation& rel, const std::vector<std::string>& group_by,
                   const std::vector<AggregateSpec>& aggregates);

/// Appends a computed attribute. `kind` overrides the inferred kind, which is
/// required when the expression is an untyped NULL.
Relation extend(const Relation& rel, const std::string& name, const ExprPtr& expr,
                const std::optional<Kind>& kind = std::nullopt);

Relation rename(const Relation& rel, const std::vector<std::pair<std::string, std::string>>& renames);

/// Set-level update: every tuple satisfying `pred` gets the assignments,
/// all evaluated against the tuple's prior values.
Relation update(const Relation& rel, const ExprPtr& pred,
                const std::vector<std::pair<std::string, ExprPtr>>& assignments);

/// Appends an INTEGER attribute numbering tuples 0..n-1 in canonical order.
Relation number_rows(const Relation& rel, const std::string& name);

/// Re-labels a relation with a header of equal arity whose kinds are
/// reachable by cast (INTEGER to FLOAT widening, REF to REF).
Relation retype(const Relation& rel, const Header& header);

} // namespace rxo::kernel
