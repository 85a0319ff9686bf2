#pragma once

#include "rxo/database.hpp"
#include "rxo/query/procedure.hpp"
#include "rxo/syntax/ast.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace rxo::runtime {

/// Objects of the extent of `cls`.
struct ObjectSelection {
    std::string cls;
    kernel::ValueSet oids;
};

/// Objects reached by an object-valued path such as `DOCS[.Date IS NULL]`.
ObjectSelection select_objects(const Database& db, const syntax::Path& path);

// Every operation below either succeeds completely or throws and leaves
// `db` untouched. Constraints are checked once, at the end.

Oid new_object(Database& db, const syntax::NewObject& st);
std::size_t destroy_objects(Database& db, const ObjectSelection& sel);

/// Simultaneous assignment of stored scalar or reference components. Values
/// may read the object's own components.
std::size_t assign_components(Database& db, const ObjectSelection& sel,
                              const std::vector<std::pair<std::string, syntax::ExprPtr>>& assignments);

std::size_t insert_component(Database& db, const ObjectSelection& sel, const std::string& component,
                             const std::vector<std::vector<syntax::ExprPtr>>& rows);
/// Rows of a stored set-of component of the selected objects where `where`
/// holds (all rows when null) are removed.
std::size_t delete_component(Database& db, const ObjectSelection& sel, const std::string& component,
                             const syntax::ExprPtr& where);

query::SetProcedure compile_method(const Database& db, const std::string& cls, const std::string& method);
std::size_t exec_method(Database& db, const ObjectSelection& sel, const std::string& method, const std::vector<Value>& args);

/// Argument values of an EXEC, checked against the method signature of `cls`.
std::vector<Value> method_arguments(const Database& db, const std::string& cls, const std::string& method,
                                    const std::vector<syntax::ExprPtr>& args);

struct StatementResult {
    std::optional<kernel::Relation> relation; // SELECT
    std::string message;
    std::size_t affected = 0;
};

/// Runs one statement atomically.
StatementResult execute(Database& db, const syntax::Statement& st);

} // namespace rxo::runtime
