#pragma once

#include "rxo/catalog/catalog.hpp"
#include "rxo/kernel/relation.hpp"
#include "rxo/syntax/ast.hpp"

#include <optional>
#include <string>
#include <vector>

namespace rxo::query {

class Evaluator;

inline constexpr const char* kHostColumn = "&.#";
inline constexpr const char* kResultColumn = "%result";
inline constexpr const char* kReturnedColumn = "%returned";

/// One enclosing IF condition of a step, with the branch taken.
struct Guard {
    syntax::ExprPtr condition;
    bool polarity = true;
};

/// A predicated bulk operation over the frame of all hosts.
///   Declare  adds a NULL local column.
///   Branch   computes the masks `name + "t"` and `name + "f"` from `expr`.
///   Assign   updates a local or a host component where the mask holds.
///   Return   stores `expr` in the result and retires the hosts.
struct Step {
    enum class Op { Declare, Branch, Assign, Return };
    Op op = Op::Assign;
    std::string mask; // enabling mask column; empty at top level
    std::string name;
    std::optional<Kind> kind;
    bool component = false;
    syntax::ExprPtr expr;
    std::vector<Guard> guards;
    SourcePos pos;
};

struct SetProcedure {
    std::string cls;
    std::string member;
    std::vector<syntax::Param> params;
    std::optional<Kind> returns;
    bool method = false;
    std::vector<Step> steps;
    std::vector<std::string> writes; // host components assigned, in first-write order

    std::vector<const Step*> assignments() const;
};

/// Lowers a loop-free body into steps. Methods may assign stored scalar and
/// reference components of the host; functions may only assign locals and
/// must return.
SetProcedure compile_procedure(const catalog::Catalog& cat, const std::string& cls, const std::string& member,
                               const syntax::Block& body, const std::vector<syntax::Param>& params,
                               const std::optional<Kind>& returns, bool method);

/// Runs the steps once over every host in `hosts` (single column `&.#`).
/// The result holds one row per host with the final values of `&.<component>`
/// columns for every written component and, for functions, `%result`.
kernel::Relation run_procedure(Evaluator& ev, const SetProcedure& proc, const kernel::Relation& hosts,
                               const std::vector<Value>& args);

/// Frame column holding the final value of a written host component.
std::string component_column(const catalog::Catalog& cat, const std::string& cls, const std::string& member);

} // namespace rxo::query
