#pragma once

#include "rxo/kernel/relation.hpp"

#include <memory>
#include <optional>
#include <set>
#include <string>
#include <variant>
#include <vector>

namespace rxo::kernel {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class UnaryOp { Neg, Not, IsNull, IsNotNull };
enum class BinaryOp { Add, Sub, Mul, Div, Eq, Ne, Lt, Le, Gt, Ge, And, Or };

using ValueSet = std::set<Value, ValueLess>;

/// Tuple-level expression over attribute names. Comparisons involving NULL
/// are false; arithmetic involving NULL yields NULL.
struct Expr {
    struct Column {
        std::string name;
    };
    struct Literal {
        Value value;
        std::optional<Kind> kind; // empty for an untyped NULL
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
    struct InSet {
        ExprPtr operand;
        std::shared_ptr<const ValueSet> values;
    };
    struct Cast {
        ExprPtr operand;
        Kind kind;
    };

    std::variant<Column, Literal, Unary, Binary, InSet, Cast> node;
};

ExprPtr column(std::string name);
ExprPtr literal(Value value);
ExprPtr literal(Value value, Kind kind);
ExprPtr unary(UnaryOp op, ExprPtr operand);
ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs);
ExprPtr in_set(ExprPtr operand, ValueSet values);
ExprPtr cast(ExprPtr operand, Kind kind);

inline ExprPtr eq(ExprPtr a, ExprPtr b) { return binary(BinaryOp::Eq, std::move(a), std::move(b)); }
inline ExprPtr conj(ExprPtr a, ExprPtr b) { return binary(BinaryOp::And, std::move(a), std::move(b)); }
inline ExprPtr is_null(ExprPtr a) { return unary(UnaryOp::IsNull, std::move(a)); }
inline ExprPtr is_not_null(ExprPtr a) { return unary(UnaryOp::IsNotNull, std::move(a)); }
inline ExprPtr always_true() { return literal(true); }

std::string to_string(const Expr& e);

/// Whether a value of kind `from` may be cast to `to` (identity, INTEGER to
/// FLOAT widening, REF to any REF).
bool castable(const Kind& from, const Kind& to);

/// An expression resolved against a header: column names become positions
/// and the result kind is known. Empty kind means the expression is NULL.
class BoundExpr {
public:
    BoundExpr(const ExprPtr& expr, const Header& header);

    const std::optional<Kind>& kind() const noexcept { return root_->kind; }
    Value evaluate(const Tuple& t) const;
    bool test(const Tuple& t) const;

private:
    struct Node {
        std::variant<Expr::Column, Expr::Literal, Expr::Unary, Expr::Binary, Expr::InSet, Expr::Cast> src;
        std::size_t index = 0;
        std::optional<Kind> kind;
        std::vector<std::unique_ptr<Node>> children;
    };
    static std::unique_ptr<Node> build(const Expr& e, const Header& header);
    static Value eval(const Node& n, const Tuple& t);

    std::shared_ptr<const Node> root_;
};

bool truthy(const Value& v);

} // namespace rxo::kernel
