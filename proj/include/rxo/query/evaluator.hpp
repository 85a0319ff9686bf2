#pragma once

#include "rxo/database.hpp"
#include "rxo/kernel/algebra.hpp"
#include "rxo/syntax/ast.hpp"

#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rxo::query {

struct SetProcedure;

/// A node of the object graph bound to columns of a frame. Object nodes own
/// the column `prefix.#`; set-of rows own `prefix.$` plus one column per
/// nested attribute.
struct Binding {
    std::string prefix;
    catalog::Node node;

    std::string oid_column() const { return prefix + ".#"; }
    std::string marker_column() const { return prefix + ".$"; }
};

struct Local {
    std::string column;
    Kind kind;
};

/// Name resolution context for expressions compiled into a frame.
struct Scope {
    const Scope* outer = nullptr;
    std::optional<Binding> dot;
    std::map<std::string, Binding> aliases;
    std::optional<Binding> from_bare;
    std::optional<Binding> host;
    std::map<std::string, Local> locals;
};

/// A wide relation of variable bindings. `functional` frames hold exactly
/// one row per host and refuse set-valued expansion.
struct Frame {
    kernel::Relation rel;
    bool functional = false;

    bool has(const std::string& column) const { return rel.header().contains(column); }
};

struct SelectResult {
    kernel::Relation rel; // host key, then one column per item
    std::string host_key;
    std::vector<std::string> columns;
    std::vector<std::string> names;
};

/// A terminal reached by a path: a value column, or a node.
using Resolved = std::variant<Local, Binding>;

/// Plans and runs queries against one immutable database state. Values of
/// calculated members are computed once per evaluator.
class Evaluator {
public:
    explicit Evaluator(const Database& db) : db_(db) {}

    const Database& db() const { return db_; }
    const catalog::Catalog& catalog() const { return db_.catalog; }

    std::string fresh(const std::string& stem);

    kernel::Relation unit() const;
    /// OIDs of the extent of `cls` (descendants included) as column `column`.
    kernel::Relation extent(const std::string& cls, const std::string& column) const;
    /// OIDs of objects whose exact class is `cls`.
    kernel::Relation exact_objects(const std::string& cls, const std::string& column) const;
    std::string exact_class_of(Oid oid) const;

    /// (#oid REF(cls), values...) for every object in the extent of `cls`.
    kernel::Relation member_values(const std::string& cls, const catalog::MemberDecl& m);
    const kernel::Relation& exact_member_values(const std::string& cls, const catalog::MemberDecl& m);

    std::string ensure_scalar(Frame& f, const Binding& b, const catalog::MemberDecl& m);
    Binding ensure_reference(Frame& f, const Binding& b, const catalog::MemberDecl& m);
    Binding ensure_set(Frame& f, const Binding& b, const catalog::MemberDecl& m);

    /// Walks a path in value mode (outer expansions) or navigation mode
    /// (only existing components survive).
    Resolved resolve(Frame& f, const Scope& s, const syntax::Path& p, bool navigate);
    /// Keeps the rows of `f` for which `pred` holds at node `b`.
    void restrict(Frame& f, const Scope& outer, const Binding& b, const syntax::ExprPtr& pred);

    kernel::ExprPtr compile(Frame& f, const Scope& s, const syntax::Expr& e);
    std::optional<Kind> kind_of(const Frame& f, const kernel::ExprPtr& e) const;
    /// Compiles `e` and coerces it towards `target` (string literal to DATETIME, INTEGER to FLOAT).
    kernel::ExprPtr compile_as(Frame& f, const Scope& s, const syntax::Expr& e, const std::optional<Kind>& target);

    SelectResult run_select(const kernel::Relation& hosts, const std::string& host_key, const Scope& outer,
                            const syntax::Select& sel);

    /// Value of an expression with no free names other than class selections.
    Value constant(const syntax::Expr& e, const std::optional<Kind>& target = std::nullopt);

    /// Objects reached by an object-valued path, with the node class.
    std::pair<std::string, kernel::ValueSet> select_objects(const syntax::Path& p);

    /// Scalar or set value of a calculated member for one object.
    std::variant<Value, kernel::Relation> calculated(const std::string& cls, Oid oid, const std::string& member);

private:
    std::string subquery_column(Frame& f, const Scope& s, const syntax::Select& sel);
    /// A class name with a predicate used as a value: the single matching OID.
    std::string selection_column(Frame& f, const Scope& s, const syntax::Path& p);
    void attach(Frame& f, const std::string& oid_column, kernel::Relation values, const std::vector<std::string>& names);
    kernel::Relation realize_query(const std::string& cls, const catalog::MemberDecl& m, const syntax::Select& q);
    kernel::Relation realize_procedure(const std::string& cls, const catalog::MemberDecl& m, const syntax::Block& body);

    const Database& db_;
    std::map<std::pair<std::string, std::string>, kernel::Relation> cache_;
    std::set<std::pair<std::string, std::string>> in_progress_;
    int counter_ = 0;
};

kernel::Header member_header(const std::string& key_name, const Kind& key_kind, const catalog::MemberDecl& m);
Kind attribute_kind(const catalog::MemberDecl& m);

} // namespace rxo::query
