#include "rxo/syntax/printer.hpp"

#include "rxo/syntax/lexer.hpp"

#include <sstream>

namespace rxo::syntax {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string_view op_text(BinaryOp op) {
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

std::string type_text(const Kind& k) { return k.type == ScalarType::Ref ? k.ref_class : to_string(k); }

template <typename T, typename F>
std::string join(const std::vector<T>& items, F&& f, std::string_view sep = ", ") {
    std::string out;
    for (std::size_t i = 0; i < items.size(); ++i) {
        if (i) out += sep;
        out += f(items[i]);
    }
    return out;
}

bool needs_parens(const Expr& e) {
    return std::holds_alternative<Expr::Binary>(e.node) || std::holds_alternative<Expr::Unary>(e.node) ||
           std::holds_alternative<Expr::IsNull>(e.node);
}

std::string operand(const ExprPtr& e) {
    std::string s = print(*e);
    return needs_parens(*e) ? "(" + s + ")" : s;
}

std::string params_text(const std::vector<Param>& ps) {
    return "(" + join(ps, [](const Param& p) { return p.name + " " + type_text(p.kind); }) + ")";
}

std::string names_text(const std::vector<std::string>& ns, bool dotted) {
    return "(" + join(ns, [&](const std::string& n) { return (dotted ? "." : "") + n; }) + ")";
}

std::string member_text(const MemberDecl& m) {
    switch (m.form) {
    case MemberDecl::Form::Scalar: return m.name + " " + to_string(Kind{m.scalar, {}});
    case MemberDecl::Form::Reference: return m.name + " " + m.target;
    case MemberDecl::Form::SetOf: {
        std::string s = m.name + " SET OF (" + join(m.members, member_text) + ")";
        if (!m.key.empty()) s += " KEY" + names_text(m.key, false);
        return s;
    }
    case MemberDecl::Form::Method: {
        std::string s = m.name + params_text(m.params);
        if (m.returns) s += " " + type_text(*m.returns);
        return s;
    }
    }
    return {};
}

std::string initializer_text(const Initializer& i) { return print(i.target) + " := " + print(*i.value); }

std::string new_text(const NewObject& n) {
    std::string s = "NEW " + n.class_name;
    if (!n.initializers.empty()) s += " WITH SET " + join(n.initializers, initializer_text);
    return s;
}

std::string proc_text(const ProcStmt& st);

std::string block_text(const Block& b) {
    std::string s = "BEGIN";
    for (const auto& st : b) s += " " + proc_text(st);
    return s + " END";
}

std::string proc_text(const ProcStmt& st) {
    return std::visit(
        overloaded{
            [](const ProcStmt::Declare& d) { return "DECLARE " + d.name + " " + type_text(d.kind) + ";"; },
            [](const ProcStmt::Assign& a) { return print(a.target) + " := " + print(*a.value) + ";"; },
            [](const ProcStmt::If& f) {
                std::string s = "IF " + print(*f.condition) + " THEN " + block_text(f.then_branch);
                if (f.has_else) s += " ELSE " + block_text(f.else_branch);
                return s;
            },
            [](const ProcStmt::Return& r) { return r.value ? "RETURN " + print(*r.value) + ";" : std::string("RETURN;"); },
        },
        st.node);
}

} // namespace

std::string print_literal(const Value& v) {
    return std::visit(overloaded{
                          [](const Null&) { return std::string("NULL"); },
                          [](const std::string& s) { return quote(s); },
                          [](std::int64_t i) { return std::to_string(i); },
                          [](double d) {
                              std::string s = format_float(d);
                              if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
                              return s;
                          },
                          [](Timestamp t) { return format_datetime(t); },
                          [](bool b) { return std::string(b ? "TRUE" : "FALSE"); },
                          [](Oid o) { return std::to_string(o.value); },
                      },
                      v);
}

std::string print(const Path& p) {
    std::string s;
    if (p.root == PathRoot::Alias) s = "#" + p.alias;
    for (std::size_t i = 0; i < p.segments.size(); ++i) {
        if (i > 0 || p.root != PathRoot::Bare) s += ".";
        const Segment& seg = p.segments[i];
        s += seg.name;
        if (seg.predicate) s += "[" + print(*seg.predicate) + "]";
    }
    return s;
}

std::string print(const Expr& e) {
    return std::visit(
        overloaded{
            [](const Expr::Literal& l) { return print_literal(l.value); },
            [](const Expr::PathRef& p) { return print(p.path); },
            [](const Expr::Unary& u) {
                return std::string(u.op == UnaryOp::Neg ? "-" : "NOT ") + operand(u.operand);
            },
            [](const Expr::Binary& b) {
                return operand(b.lhs) + " " + std::string(op_text(b.op)) + " " + operand(b.rhs);
            },
            [](const Expr::IsNull& n) { return operand(n.operand) + (n.negated ? " IS NOT NULL" : " IS NULL"); },
            [](const Expr::Aggregate& a) {
                return std::string(kernel::to_string(a.fn)) + "(" + (a.argument ? print(*a.argument) : "*") + ")";
            },
            [](const Expr::Subquery& q) { return "(" + print(*q.select) + ")"; },
            [](const Expr::New& n) { return "(" + new_text(*n.statement) + ")"; },
        },
        e.node);
}

std::string print(const Select& s) {
    std::string out = "SELECT " + join(s.items, [](const SelectItem& it) {
                          return print(*it.expr) + (it.alias.empty() ? "" : " AS " + it.alias);
                      });
    out += " FROM " + print(s.from);
    if (!s.from_alias.empty()) out += " #" + s.from_alias;
    if (s.where) out += " WHERE " + print(*s.where);
    if (!s.group_by.empty()) out += " GROUP BY " + join(s.group_by, [](const ExprPtr& e) { return print(*e); });
    return out;
}

std::string print(const Block& b) { return block_text(b); }

std::string print(const Statement& st) {
    return std::visit(
        overloaded{
            [](const CreateClass& c) {
                std::string s = "CREATE CLASS " + c.name;
                if (!c.parents.empty()) s += " EXTEND " + join(c.parents, [](const std::string& n) { return n; });
                s += " (" + join(c.members, member_text) + ")";
                if (!c.key.empty()) s += " KEY" + names_text(c.key, false);
                for (const auto& r : c.references) {
                    s += " REFERENCE " + r.component + names_text(r.attributes, true) + " ON " + r.target_class +
                         names_text(r.target_attributes, true);
                }
                return s + ";";
            },
            [](const AlterRealize& a) {
                std::string s = "ALTER " + a.class_name + " REALIZE " + join(a.targets, [](const RealizeTarget& t) {
                                    return t.member + (t.params ? params_text(*t.params) : "");
                                });
                switch (a.body) {
                case RealizationBody::Stored: return s + " AS STORED;";
                case RealizationBody::Query: return s + " AS " + print(*a.query) + ";";
                case RealizationBody::Procedure: return s + " AS " + block_text(*a.procedure);
                }
                return s;
            },
            [](const NewObject& n) { return new_text(n) + ";"; },
            [](const Destroy& d) { return "DESTROY " + print(d.target) + ";"; },
            [](const Select& s) { return print(s) + ";"; },
            [](const Exec& e) {
                return "EXEC " + print(e.target) + "." + e.method + "(" +
                       join(e.args, [](const ExprPtr& a) { return print(*a); }) + ");";
            },
            [](const InsertRows& ins) {
                return "INSERT INTO " + print(ins.target) + " VALUES " +
                       join(ins.rows,
                            [](const std::vector<ExprPtr>& row) {
                                return "(" + join(row, [](const ExprPtr& a) { return print(*a); }) + ")";
                            }) +
                       ";";
            },
            [](const DeleteRows& d) {
                return "DELETE FROM " + print(d.target) + (d.where ? " WHERE " + print(*d.where) : "") + ";";
            },
            [](const UpdateObjects& u) {
                return "UPDATE " + print(u.target) + " SET " + join(u.assignments, initializer_text) + ";";
            },
        },
        st.node);
}

// ---- dump ----

namespace {

std::string dump_path(const Path& p);
std::string dump_select(const Select& s);

std::string dump_value(const Value& v) {
    static const char* tags[] = {"null", "str", "int", "float", "dt", "bool", "oid"};
    return std::string("(") + tags[v.index()] + " " + print_literal(v) + ")";
}

std::string dump_block(const Block& b);

std::string dump_proc(const ProcStmt& st) {
    return std::visit(overloaded{
                          [](const ProcStmt::Declare& d) { return "(declare " + d.name + " " + to_string(d.kind) + ")"; },
                          [](const ProcStmt::Assign& a) { return "(assign " + dump_path(a.target) + " " + dump(*a.value) + ")"; },
                          [](const ProcStmt::If& f) {
                              return "(if " + dump(*f.condition) + " " + dump_block(f.then_branch) +
                                     (f.has_else ? " " + dump_block(f.else_branch) : "") + ")";
                          },
                          [](const ProcStmt::Return& r) {
                              return std::string("(return") + (r.value ? " " + dump(*r.value) : "") + ")";
                          },
                      },
                      st.node);
}

std::string dump_block(const Block& b) {
    return "(block" + join(b, [](const ProcStmt& s) { return " " + dump_proc(s); }, "") + ")";
}

std::string dump_path(const Path& p) {
    static const char* roots[] = {"bare", "dot", "alias"};
    std::string s = std::string("(path ") + roots[static_cast<int>(p.root)];
    if (p.root == PathRoot::Alias) s += " #" + p.alias;
    for (const auto& seg : p.segments) {
        s += " (" + seg.name;
        if (seg.predicate) s += " " + dump(*seg.predicate);
        s += ")";
    }
    return s + ")";
}

std::string dump_member(const MemberDecl& m) {
    std::string s = "(member " + m.name + " " + std::to_string(static_cast<int>(m.form));
    switch (m.form) {
    case MemberDecl::Form::Scalar: s += " " + to_string(Kind{m.scalar, {}}); break;
    case MemberDecl::Form::Reference: s += " " + m.target; break;
    case MemberDecl::Form::SetOf:
        s += join(m.members, [](const MemberDecl& c) { return " " + dump_member(c); }, "");
        s += " (key" + join(m.key, [](const std::string& k) { return " " + k; }, "") + ")";
        break;
    case MemberDecl::Form::Method:
        s += join(m.params, [](const Param& p) { return " (" + p.name + " " + to_string(p.kind) + ")"; }, "");
        if (m.returns) s += " -> " + to_string(*m.returns);
        break;
    }
    return s + ")";
}

std::string dump_inits(const std::vector<Initializer>& inits) {
    return join(inits, [](const Initializer& i) { return " (" + dump_path(i.target) + " " + dump(*i.value) + ")"; }, "");
}

std::string dump_new(const NewObject& n) { return "(new " + n.class_name + dump_inits(n.initializers) + ")"; }

std::string dump_select(const Select& s) {
    std::string out = "(select";
    for (const auto& it : s.items) out += " (item " + dump(*it.expr) + " " + it.alias + ")";
    out += " (from " + dump_path(s.from) + " " + s.from_alias + ")";
    if (s.where) out += " (where " + dump(*s.where) + ")";
    if (!s.group_by.empty()) out += " (group" + join(s.group_by, [](const ExprPtr& e) { return " " + dump(*e); }, "") + ")";
    return out + ")";
}

std::string dump_exprs(const std::vector<ExprPtr>& es) {
    return join(es, [](const ExprPtr& e) { return " " + dump(*e); }, "");
}

} // namespace

std::string dump(const Expr& e) {
    return std::visit(
        overloaded{
            [](const Expr::Literal& l) { return dump_value(l.value); },
            [](const Expr::PathRef& p) { return dump_path(p.path); },
            [](const Expr::Unary& u) {
                return std::string(u.op == UnaryOp::Neg ? "(neg " : "(not ") + dump(*u.operand) + ")";
            },
            [](const Expr::Binary& b) {
                return "(" + std::string(op_text(b.op)) + " " + dump(*b.lhs) + " " + dump(*b.rhs) + ")";
            },
            [](const Expr::IsNull& n) { return std::string(n.negated ? "(notnull " : "(isnull ") + dump(*n.operand) + ")"; },
            [](const Expr::Aggregate& a) {
                return "(" + std::string(kernel::to_string(a.fn)) + (a.argument ? " " + dump(*a.argument) : "") + ")";
            },
            [](const Expr::Subquery& q) { return dump_select(*q.select); },
            [](const Expr::New& n) { return dump_new(*n.statement); },
        },
        e.node);
}

std::string dump(const Statement& st) {
    return std::visit(
        overloaded{
            [](const CreateClass& c) {
                std::string s = "(create " + c.name + " (extend" +
                                join(c.parents, [](const std::string& p) { return " " + p; }, "") + ")";
                s += join(c.members, [](const MemberDecl& m) { return " " + dump_member(m); }, "");
                s += " (key" + join(c.key, [](const std::string& k) { return " " + k; }, "") + ")";
                for (const auto& r : c.references) {
                    s += " (ref " + r.component + join(r.attributes, [](const std::string& a) { return " " + a; }, "") +
                         " on " + r.target_class +
                         join(r.target_attributes, [](const std::string& a) { return " " + a; }, "") + ")";
                }
                return s + ")";
            },
            [](const AlterRealize& a) {
                std::string s = "(alter " + a.class_name;
                for (const auto& t : a.targets) {
                    s += " (" + t.member;
                    if (t.params) {
                        s += " (params" +
                             join(*t.params, [](const Param& p) { return " (" + p.name + " " + to_string(p.kind) + ")"; }, "") +
                             ")";
                    }
                    s += ")";
                }
                switch (a.body) {
                case RealizationBody::Stored: s += " stored"; break;
                case RealizationBody::Query: s += " " + dump_select(*a.query); break;
                case RealizationBody::Procedure: s += " " + dump_block(*a.procedure); break;
                }
                return s + ")";
            },
            [](const NewObject& n) { return dump_new(n); },
            [](const Destroy& d) { return "(destroy " + dump_path(d.target) + ")"; },
            [](const Select& s) { return dump_select(s); },
            [](const Exec& e) { return "(exec " + dump_path(e.target) + " " + e.method + dump_exprs(e.args) + ")"; },
            [](const InsertRows& ins) {
                std::string s = "(insert " + dump_path(ins.target);
                for (const auto& row : ins.rows) s += " (row" + dump_exprs(row) + ")";
                return s + ")";
            },
            [](const DeleteRows& d) {
                return "(delete " + dump_path(d.target) + (d.where ? " " + dump(*d.where) : "") + ")";
            },
            [](const UpdateObjects& u) { return "(update " + dump_path(u.target) + dump_inits(u.assignments) + ")"; },
        },
        st.node);
}

} // namespace rxo::syntax
