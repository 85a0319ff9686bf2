#pragma once

#include "rxo/error.hpp"
#include "rxo/kernel/algebra.hpp"
#include "rxo/kernel/value.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace rxo::syntax {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;
struct Select;
struct NewObject;

/// One dotted step of a path, optionally filtered: `GOODS[.Art = "A1"]`.
struct Segment {
    std::string name; // "#" for the OID pseudo-attribute
    ExprPtr predicate;
    SourcePos pos;
};

enum class PathRoot {
    Bare,  // GOODS.Turnover, Cntr.Bank, tmpPieces
    Dot,   // .Name: relative to the current row
    Alias, // #g.Items.Art
};

struct Path {
    PathRoot root = PathRoot::Bare;
    std::string alias;
    std::vector<Segment> segments;
    SourcePos pos;

    bool has_predicates() const {
        for (const auto& s : segments) {
            if (s.predicate) return true;
        }
        return false;
    }
    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (const auto& s : segments) out.push_back(s.name);
        return out;
    }
};

enum class UnaryOp { Neg, Not };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

struct Expr {
    struct Literal {
        Value value;
    };
    struct PathRef {
        Path path;
    };
    struct Unary {
        UnaryOp op;
        ExprPtr operand;
    };
    struct Binary {
        BinaryOp op;
        ExprPtr lhs;
        ExprPtr rhs;
    };
    struct IsNull {
        ExprPtr operand;
        bool negated = false;
    };
    struct Aggregate {
        kernel::AggregateFn fn;
        ExprPtr argument; // null for COUNT(*)
    };
    struct Subquery {
        std::shared_ptr<const Select> select;
    };
    struct New {
        std::shared_ptr<const NewObject> statement;
    };

    std::variant<Literal, PathRef, Unary, Binary, IsNull, Aggregate, Subquery, New> node;
    SourcePos pos;
};

struct Param {
    std::string name;
    Kind kind;
};

struct MemberDecl {
    enum class Form { Scalar, Reference, SetOf, Method };

    std::string name;
    Form form = Form::Scalar;
    ScalarType scalar = ScalarType::String;  // Scalar
    std::string target;                      // Reference
    std::vector<MemberDecl> members;         // SetOf
    std::vector<std::string> key;            // SetOf
    std::vector<Param> params;               // Method
    std::optional<Kind> returns;             // Method
    SourcePos pos;
};

/// `REFERENCE Items(.Art) ON GOODS(.Art)`
struct ReferenceClause {
    std::string component;
    std::vector<std::string> attributes;
    std::string target_class;
    std::vector<std::string> target_attributes;
    SourcePos pos;
};

struct CreateClass {
    std::string name;
    std::vector<std::string> parents;
    std::vector<MemberDecl> members;
    std::vector<std::string> key;
    std::vector<ReferenceClause> references;
};

struct ProcStmt;
using Block = std::vector<ProcStmt>;

struct ProcStmt {
    struct Declare {
        std::string name;
        Kind kind;
    };
    struct Assign {
        Path target;
        ExprPtr value;
    };
    struct If {
        ExprPtr condition;
        Block then_branch;
        Block else_branch;
        bool has_else = false;
    };
    struct Return {
        ExprPtr value; // may be null
    };

    std::variant<Declare, Assign, If, Return> node;
    SourcePos pos;
};

struct RealizeTarget {
    std::string member;
    std::optional<std::vector<Param>> params;
    SourcePos pos;
};

struct SelectItem {
    ExprPtr expr;
    std::string alias;
};

struct Select {
    std::vector<SelectItem> items;
    Path from;
    std::string from_alias;
    ExprPtr where;
    std::vector<ExprPtr> group_by;
    SourcePos pos;
};

enum class RealizationBody { Stored, Query, Procedure };

struct AlterRealize {
    std::string class_name;
    std::vector<RealizeTarget> targets;
    RealizationBody body = RealizationBody::Stored;
    std::shared_ptr<const Select> query;
    std::shared_ptr<const Block> procedure;
};

struct Initializer {
    Path target;
    ExprPtr value;
};

struct NewObject {
    std::string class_name;
    std::vector<Initializer> initializers;
    SourcePos pos;
};

struct Destroy {
    Path target;
};

struct Exec {
    Path target;
    std::string method;
    std::vector<ExprPtr> args;
};

/// `INSERT INTO DOCS[.DocN = "D1"].Items VALUES ("A1", 5)`
struct InsertRows {
    Path target;
    std::vector<std::vector<ExprPtr>> rows;
};

/// `DELETE FROM DOCS[.DocN = "D1"].Items WHERE .Art = "A1"`
struct DeleteRows {
    Path target;
    ExprPtr where;
};

/// `UPDATE DOCS[.DocN = "D1"] SET .Comment := "X"`
struct UpdateObjects {
    Path target;
    std::vector<Initializer> assignments;
};

struct Statement {
    std::variant<CreateClass, AlterRealize, NewObject, Destroy, Select, Exec, InsertRows, DeleteRows, UpdateObjects> node;
    SourcePos pos;
};

} // namespace rxo::syntax
