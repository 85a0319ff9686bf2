#pragma once

#include "rxo/database.hpp"
#include "rxo/query/evaluator.hpp"

#include <optional>
#include <string>
#include <variant>

namespace rxo::query {

inline constexpr int kMaxExpansionDepth = 8;

/// The relation a non-terminal path names: one attribute per scalar post-path
/// (`.Name`, `.Bank.Name`, `.#`, `.Bank.#`, ...).
struct OView {
    std::string cls;             // class of the terminal node (owning class for set-of rows)
    bool rows = false;           // terminal is a set-of component
    kernel::Relation relation;
};

OView resolve_oview(const Database& db, const syntax::Path& path, const std::optional<std::string>& context = std::nullopt);

struct SelectionPlan {
    std::string cls;
    kernel::ValueSet oids;
};

/// Objects of the extent of `cls` satisfying `predicate` (existential over
/// set-valued paths). A null predicate selects the whole extent.
SelectionPlan compile_selection(const Database& db, const std::string& cls, const syntax::ExprPtr& predicate);

/// Top-level SELECT. Attributes are named after the items.
kernel::Relation evaluate_select(const Database& db, const syntax::Select& select);

std::variant<Value, kernel::Relation> eval_calculated(const Database& db, const std::string& cls, Oid oid,
                                                      const std::string& member);

} // namespace rxo::query
