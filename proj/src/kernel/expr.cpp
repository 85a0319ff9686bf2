#include "rxo/kernel/expr.hpp"

#include <cmath>

namespace rxo::kernel {

ExprPtr column(std::string name) { return std::make_shared<Expr>(Expr{Expr::Column{std::move(name)}}); }

ExprPtr literal(Value value) {
    std::optional<Kind> kind;
    if (!is_null(value)) {
        if (std::holds_alternative<Oid>(value)) {
            kind = Kind::ref("");
        } else {
            kind = Kind{type_of(value), {}};
        }
    }
    return std::make_shared<Expr>(Expr{Expr::Literal{std::move(value), std::move(kind)}});
}

ExprPtr literal(Value value, Kind kind) {
    return std::make_shared<Expr>(Expr{Expr::Literal{std::move(value), std::move(kind)}});
}

ExprPtr unary(UnaryOp op, ExprPtr operand) {
    return std::make_shared<Expr>(Expr{Expr::Unary{op, std::move(operand)}});
}

ExprPtr binary(BinaryOp op, ExprPtr lhs, ExprPtr rhs) {
    return std::make_shared<Expr>(Expr{Expr::Binary{op, std::move(lhs), std::move(rhs)}});
}

ExprPtr in_set(ExprPtr operand, ValueSet values) {
    return std::make_shared<Expr>(
        Expr{Expr::InSet{std::move(operand), std::make_shared<const ValueSet>(std::move(values))}});
}

ExprPtr cast(ExprPtr operand, Kind kind) {
    return std::make_shared<Expr>(Expr{Expr::Cast{std::move(operand), std::move(kind)}});
}

namespace {

const char* op_text(BinaryOp op) {
    switch (op) {
    case BinaryOp::Add: return "+";
    case BinaryOp::Sub: return "-";
    case BinaryOp::Mul: return "*";
    case BinaryOp::Div: return "/";
    case BinaryOp::Eq: return "=";
    case BinaryOp::Ne: return "<>";
    case BinaryOp::Lt: return "<";
    case BinaryOp::Le: return "<=";
    case BinaryOp::Gt: return ">";
    case BinaryOp::Ge: return ">=";
    case BinaryOp::And: return "AND";
    case BinaryOp::Or: return "OR";
    }
    return "?";
}

bool is_comparison(BinaryOp op) {
    return op == BinaryOp::Eq || op == BinaryOp::Ne || op == BinaryOp::Lt || op == BinaryOp::Le ||
           op == BinaryOp::Gt || op == BinaryOp::Ge;
}

bool comparable(const std::optional<Kind>& a, const std::optional<Kind>& b) {
    if (!a || !b) return true;
    if (a->is_numeric() && b->is_numeric()) return true;
    return a->type == b->type;
}

bool boolean_or_null(const std::optional<Kind>& k) { return !k || k->type == ScalarType::Boolean; }

[[noreturn]] void kind_error(const std::string& what, const std::optional<Kind>& a, const std::optional<Kind>& b) {
    fail(ErrorCode::KindMismatch, what + ": " + (a ? to_string(*a) : "NULL") + " and " + (b ? to_string(*b) : "NULL"));
}

std::int64_t checked(bool overflow, std::int64_t v) {
    if (overflow) fail(ErrorCode::InvalidValue, "integer overflow");
    return v;
}

double as_double(const Value& v) {
    return std::holds_alternative<double>(v) ? std::get<double>(v) : static_cast<double>(std::get<std::int64_t>(v));
}

Value arithmetic(BinaryOp op, const Value& a, const Value& b) {
    if (is_null(a) || is_null(b)) return Null{};
    if (std::holds_alternative<std::string>(a)) {
        return std::get<std::string>(a) + std::get<std::string>(b);
    }
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<std::int64_t>(b)) {
        std::int64_t x = std::get<std::int64_t>(a), y = std::get<std::int64_t>(b), r = 0;
        switch (op) {
        case BinaryOp::Add: {
            bool overflow = __builtin_add_overflow(x, y, &r);
            return checked(overflow, r);
        }
        case BinaryOp::Sub: {
            bool overflow = __builtin_sub_overflow(x, y, &r);
            return checked(overflow, r);
        }
        case BinaryOp::Mul: {
            bool overflow = __builtin_mul_overflow(x, y, &r);
            return checked(overflow, r);
        }
        case BinaryOp::Div:
            if (y == 0) fail(ErrorCode::InvalidValue, "division by zero");
            if (x == INT64_MIN && y == -1) fail(ErrorCode::InvalidValue, "integer overflow");
            return x / y;
        default: break;
        }
    }
    double x = as_double(a), y = as_double(b), r = 0;
    switch (op) {
    case BinaryOp::Add: r = x + y; break;
    case BinaryOp::Sub: r = x - y; break;
    case BinaryOp::Mul: r = x * y; break;
    case BinaryOp::Div:
        if (y == 0) fail(ErrorCode::InvalidValue, "division by zero");
        r = x / y;
        break;
    default: break;
    }
    if (std::isnan(r)) fail(ErrorCode::InvalidValue, "arithmetic produced NaN");
    return r;
}

std::strong_ordering compare_for_predicate(const Value& a, const Value& b) {
    if (std::holds_alternative<std::int64_t>(a) && std::holds_alternative<double>(b)) {
        return compare_values(Value{as_double(a)}, b);
    }
    if (std::holds_alternative<double>(a) && std::holds_alternative<std::int64_t>(b)) {
        return compare_values(a, Value{as_double(b)});
    }
    return compare_values(a, b);
}

} // namespace

bool truthy(const Value& v) { return std::holds_alternative<bool>(v) && std::get<bool>(v); }

bool castable(const Kind& from, const Kind& to) {
    if (from.type == to.type) return true;
    return from.type == ScalarType::Integer && to.type == ScalarType::Float;
}

std::string to_string(const Expr& e) {
    return std::visit(
        [](const auto& n) -> std::string {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Column>) {
                return n.name;
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return std::holds_alternative<std::string>(n.value) ? "\"" + display(n.value) + "\"" : display(n.value);
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                switch (n.op) {
                case UnaryOp::Neg: return "-(" + to_string(*n.operand) + ")";
                case UnaryOp::Not: return "NOT (" + to_string(*n.operand) + ")";
                case UnaryOp::IsNull: return "(" + to_string(*n.operand) + " IS NULL)";
                case UnaryOp::IsNotNull: return "(" + to_string(*n.operand) + " IS NOT NULL)";
                }
                return "?";
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                return "(" + to_string(*n.lhs) + " " + op_text(n.op) + " " + to_string(*n.rhs) + ")";
            } else if constexpr (std::is_same_v<T, Expr::InSet>) {
                return "(" + to_string(*n.operand) + " IN {" + std::to_string(n.values->size()) + " values})";
            } else {
                return "CAST(" + to_string(*n.operand) + " AS " + rxo::to_string(n.kind) + ")";
            }
        },
        e.node);
}

BoundExpr::BoundExpr(const ExprPtr& expr, const Header& header) : root_(build(*expr, header)) {}

std::unique_ptr<BoundExpr::Node> BoundExpr::build(const Expr& e, const Header& header) {
    auto node = std::make_unique<Node>();
    node->src = e.node;
    std::visit(
        [&](const auto& n) {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, Expr::Column>) {
                node->index = header.index_of(n.name);
                node->kind = header[node->index].kind;
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                node->kind = n.kind;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                node->children.push_back(build(*n.operand, header));
                const auto& k = node->children[0]->kind;
                switch (n.op) {
                case UnaryOp::Neg:
                    if (k && !k->is_numeric()) kind_error("negation of non-numeric", k, k);
                    node->kind = k;
                    break;
                case UnaryOp::Not:
                    if (!boolean_or_null(k)) kind_error("NOT of non-boolean", k, k);
                    node->kind = Kind::boolean();
                    break;
                default: node->kind = Kind::boolean(); break;
                }
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                node->children.push_back(build(*n.lhs, header));
                node->children.push_back(build(*n.rhs, header));
                const auto& a = node->children[0]->kind;
                const auto& b = node->children[1]->kind;
                if (is_comparison(n.op)) {
                    if (!comparable(a, b)) kind_error("incomparable operands", a, b);
                    node->kind = Kind::boolean();
                } else if (n.op == BinaryOp::And || n.op == BinaryOp::Or) {
                    if (!boolean_or_null(a) || !boolean_or_null(b)) kind_error("logical operator on non-boolean", a, b);
                    node->kind = Kind::boolean();
                } else {
                    bool strings = (!a || a->type == ScalarType::String) && (!b || b->type == ScalarType::String) &&
                                   (a || b) && n.op == BinaryOp::Add;
                    if (strings) {
                        node->kind = Kind::string();
                    } else {
                        if ((a && !a->is_numeric()) || (b && !b->is_numeric())) kind_error("arithmetic on", a, b);
                        if (!a || !b) {
                            node->kind = a ? a : b;
                        } else if (a->type == ScalarType::Float || b->type == ScalarType::Float) {
                            node->kind = Kind::floating();
                        } else {
                            node->kind = Kind::integer();
                        }
                    }
                }
            } else if constexpr (std::is_same_v<T, Expr::InSet>) {
                node->children.push_back(build(*n.operand, header));
                node->kind = Kind::boolean();
            } else {
                node->children.push_back(build(*n.operand, header));
                const auto& k = node->children[0]->kind;
                if (k && !castable(*k, n.kind)) kind_error("invalid cast", k, n.kind);
                node->kind = n.kind;
            }
        },
        e.node);
    return node;
}

Value BoundExpr::evaluate(const Tuple& t) const { return eval(*root_, t); }

bool BoundExpr::test(const Tuple& t) const { return truthy(eval(*root_, t)); }

Value BoundExpr::eval(const Node& n, const Tuple& t) {
    return std::visit(
        [&](const auto& src) -> Value {
            using T = std::decay_t<decltype(src)>;
            if constexpr (std::is_same_v<T, Expr::Column>) {
                return t[n.index];
            } else if constexpr (std::is_same_v<T, Expr::Literal>) {
                return src.value;
            } else if constexpr (std::is_same_v<T, Expr::Unary>) {
                Value v = eval(*n.children[0], t);
                switch (src.op) {
                case UnaryOp::Neg:
                    if (is_null(v)) return Null{};
                    if (std::holds_alternative<std::int64_t>(v)) {
                        std::int64_t r = 0;
                        bool overflow = __builtin_sub_overflow(std::int64_t{0}, std::get<std::int64_t>(v), &r);
                        return checked(overflow, r);
                    }
                    return -std::get<double>(v);
                case UnaryOp::Not: return !truthy(v);
                case UnaryOp::IsNull: return is_null(v);
                case UnaryOp::IsNotNull: return !is_null(v);
                }
                return Null{};
            } else if constexpr (std::is_same_v<T, Expr::Binary>) {
                if (src.op == BinaryOp::And) {
                    return truthy(eval(*n.children[0], t)) && truthy(eval(*n.children[1], t));
                }
                if (src.op == BinaryOp::Or) {
                    return truthy(eval(*n.children[0], t)) || truthy(eval(*n.children[1], t));
                }
                Value a = eval(*n.children[0], t);
                Value b = eval(*n.children[1], t);
                if (is_comparison(src.op)) {
                    if (is_null(a) || is_null(b)) return false;
                    auto c = compare_for_predicate(a, b);
                    switch (src.op) {
                    case BinaryOp::Eq: return c == 0;
                    case BinaryOp::Ne: return c != 0;
                    case BinaryOp::Lt: return c < 0;
                    case BinaryOp::Le: return c <= 0;
                    case BinaryOp::Gt: return c > 0;
                    case BinaryOp::Ge: return c >= 0;
                    default: return false;
                    }
                }
                return arithmetic(src.op, a, b);
            } else if constexpr (std::is_same_v<T, Expr::InSet>) {
                Value v = eval(*n.children[0], t);
                if (is_null(v)) return false;
                return src.values->count(v) > 0;
            } else {
                Value v = eval(*n.children[0], t);
                if (src.kind.type == ScalarType::Float && std::holds_alternative<std::int64_t>(v)) {
                    return static_cast<double>(std::get<std::int64_t>(v));
                }
                return v;
            }
        },
        n.src);
}

} // namespace rxo::kernel
