#include "rxo/query/evaluator.hpp"

#include "rxo/query/procedure.hpp"
#include "rxo/schema/schema.hpp"
#include "rxo/syntax/printer.hpp"

#include <algorithm>

namespace rxo::query {

namespace K = kernel;
namespace S = syntax;
using catalog::MemberDecl;
using catalog::Node;
using Form = MemberDecl::Form;

namespace {

struct InProgress {
    std::set<std::pair<std::string, std::string>>& set;
    std::pair<std::string, std::string> key;
    ~InProgress() { set.erase(key); }
};

const MemberDecl* member_at(const catalog::Catalog& cat, const Node& node, const std::string& name) {
    if (node.kind == Node::Kind::Scalar) return nullptr;
    for (const MemberDecl* m : catalog::members_at(cat, node)) {
        if (m->name == name) return m;
    }
    return nullptr;
}

bool contains_aggregate(const S::Expr& e) {
    return std::visit(
        [](const auto& n) -> bool {
            using T = std::decay_t<decltype(n)>;
            if constexpr (std::is_same_v<T, S::Expr::Aggregate>) return true;
            else if constexpr (std::is_same_v<T, S::Expr::Unary>) return contains_aggregate(*n.operand);
            else if constexpr (std::is_same_v<T, S::Expr::Binary>) return contains_aggregate(*n.lhs) || contains_aggregate(*n.rhs);
            else if constexpr (std::is_same_v<T, S::Expr::IsNull>) return contains_aggregate(*n.operand);
            else return false;
        },
        e.node);
}

K::UnaryOp kernel_op(S::UnaryOp op) { return op == S::UnaryOp::Neg ? K::UnaryOp::Neg : K::UnaryOp::Not; }

K::BinaryOp kernel_op(S::BinaryOp op) {
    switch (op) {
    case S::BinaryOp::Add: return K::BinaryOp::Add;
    case S::BinaryOp::Sub: return K::BinaryOp::Sub;
    case S::BinaryOp::Mul: return K::BinaryOp::Mul;
    case S::BinaryOp::Div: return K::BinaryOp::Div;
    case S::BinaryOp::Eq: return K::BinaryOp::Eq;
    case S::BinaryOp::Ne: return K::BinaryOp::Ne;
    case S::BinaryOp::Lt: return K::BinaryOp::Lt;
    case S::BinaryOp::Le: return K::BinaryOp::Le;
    case S::BinaryOp::Gt: return K::BinaryOp::Gt;
    case S::BinaryOp::Ge: return K::BinaryOp::Ge;
    case S::BinaryOp::And: return K::BinaryOp::And;
    case S::BinaryOp::Or: return K::BinaryOp::Or;
    }
    return K::BinaryOp::Eq;
}

// A string literal meets DATETIME, or an integer literal meets a REF.
K::ExprPtr coerce_literal(const S::Expr& src, K::ExprPtr compiled, const std::optional<Kind>& other) {
    const auto* lit = std::get_if<S::Expr::Literal>(&src.node);
    if (!lit || !other) return compiled;
    if (other->type == ScalarType::DateTime) {
        if (const auto* s = std::get_if<std::string>(&lit->value)) {
            auto ts = parse_datetime(*s);
            if (!ts) throw Error(ErrorCode::InvalidValue, "invalid DATETIME literal \"" + *s + "\"", src.pos);
            return K::literal(*ts);
        }
    }
    if (other->type == ScalarType::Ref) {
        if (const auto* i = std::get_if<std::int64_t>(&lit->value); i && *i > 0) {
            return K::literal(Oid{static_cast<std::uint64_t>(*i)}, *other);
        }
    }
    return compiled;
}

void require_boolean(const std::optional<Kind>& k, SourcePos pos) {
    if (k && k->type != ScalarType::Boolean) {
        throw Error(ErrorCode::KindMismatch, "condition must be BOOLEAN, got " + to_string(*k), pos);
    }
}

std::string item_name(const S::SelectItem& item) {
    if (!item.alias.empty()) return item.alias;
    return S::print(*item.expr);
}

} // namespace

Kind attribute_kind(const MemberDecl& m) {
    return m.form == Form::Reference ? Kind::ref(m.target) : Kind{m.scalar, {}};
}

K::Header member_header(const std::string& key_name, const Kind& key_kind, const MemberDecl& m) {
    std::vector<K::Attribute> attrs{{key_name, key_kind}};
    if (m.form == Form::SetOf) {
        for (const auto& n : m.members) attrs.push_back({n.name, attribute_kind(n)});
    } else {
        attrs.push_back({m.name, attribute_kind(m)});
    }
    return K::Header(std::move(attrs));
}

std::string Evaluator::fresh(const std::string& stem) { return "%" + stem + std::to_string(counter_++); }

K::Relation Evaluator::unit() const {
    K::Relation r{K::Header({{"%unit", Kind::boolean()}})};
    r.insert({true});
    return r;
}

K::Relation Evaluator::exact_objects(const std::string& cls, const std::string& column) const {
    K::Header h({{column, Kind::ref(cls)}});
    if (!schema::has_root(db_, cls)) return K::Relation(h);
    const auto& root = db_.store.at(schema::root_relation(cls)).relation;
    return K::rename(K::project(root, {schema::kOid}), {{schema::kOid, column}});
}

K::Relation Evaluator::extent(const std::string& cls, const std::string& column) const {
    K::Relation out{K::Header({{column, Kind::ref(cls)}})};
    for (const auto& e : catalog().extent_classes(cls)) {
        if (!schema::has_root(db_, e)) continue;
        out = K::union_of(out, K::retype(exact_objects(e, column), out.header()));
    }
    return out;
}

std::string Evaluator::exact_class_of(Oid oid) const {
    for (const auto& cls : catalog().class_names()) {
        if (!schema::has_root(db_, cls)) continue;
        for (const auto& t : db_.store.at(schema::root_relation(cls)).relation) {
            if (std::get<Oid>(t[0]) == oid) return cls;
        }
    }
    fail(ErrorCode::UnknownName, "no object with OID " + std::to_string(oid.value));
}

K::Relation Evaluator::member_values(const std::string& cls, const MemberDecl& m) {
    K::Header h = member_header(schema::kOid, Kind::ref(cls), m);
    K::Relation out(h);
    for (const auto& e : catalog().extent_classes(cls)) {
        if (!schema::has_root(db_, e)) continue;
        out = K::union_of(out, K::retype(exact_member_values(e, m), h));
    }
    return out;
}

const K::Relation& Evaluator::exact_member_values(const std::string& cls, const MemberDecl& m) {
    std::pair<std::string, std::string> key{cls, m.name};
    if (auto it = cache_.find(key); it != cache_.end()) return it->second;
    if (!in_progress_.insert(key).second) {
        fail(ErrorCode::RecursiveRealization, "realization of " + cls + "." + m.name + " depends on itself");
    }
    InProgress guard{in_progress_, key};
    auto act = catalog().active(cls, m.name);
    if (!act) fail(ErrorCode::UnrealizedComponent, cls + "." + m.name + " has no realization");
    K::Relation rel;
    switch (act->realization->body) {
    case S::RealizationBody::Stored: {
        auto entry = schema::storage_for(db_, cls, m.name);
        const auto& stored = db_.store.at(entry.relation).relation;
        if (m.form == Form::SetOf) {
            rel = K::Relation(stored.header());
            for (const auto& t : stored) rel.insert(t);
        } else {
            rel = K::project(stored, {schema::kOid, m.name});
        }
        break;
    }
    case S::RealizationBody::Query: rel = realize_query(cls, m, *act->realization->query); break;
    case S::RealizationBody::Procedure: rel = realize_procedure(cls, m, *act->realization->procedure); break;
    }
    return cache_.emplace(key, std::move(rel)).first->second;
}

K::Relation Evaluator::realize_query(const std::string& cls, const MemberDecl& m, const S::Select& q) {
    Scope host;
    host.host = Binding{"&", Node{Node::Kind::Object, cls, nullptr, {}}};
    SelectResult r = run_select(exact_objects(cls, "&.#"), "&.#", host, q);
    const std::size_t want = m.form == Form::SetOf ? m.members.size() : 1;
    if (r.columns.size() != want) {
        throw Error(ErrorCode::KindMismatch,
                    cls + "." + m.name + " needs " + std::to_string(want) + " selected items, the query has " +
                        std::to_string(r.columns.size()),
                    q.pos);
    }
    std::vector<std::string> cols{r.host_key};
    cols.insert(cols.end(), r.columns.begin(), r.columns.end());
    K::Relation rel = K::project(r.rel, cols);
    if (m.form != Form::SetOf) {
        std::set<Value, ValueLess> seen;
        for (const auto& t : rel) {
            if (!seen.insert(t[0]).second) {
                fail(ErrorCode::Cardinality, cls + "." + m.name + " yields more than one value for one object");
            }
        }
    }
    return K::retype(rel, member_header(schema::kOid, Kind::ref(cls), m));
}

K::Relation Evaluator::realize_procedure(const std::string& cls, const MemberDecl& m, const S::Block& body) {
    SetProcedure proc = compile_procedure(catalog(), cls, m.name, body, {}, attribute_kind(m), false);
    K::Relation out(member_header(schema::kOid, Kind::ref(cls), m));
    // Evaluated one object at a time.
    for (const auto& t : exact_objects(cls, "&.#")) {
        K::Relation host(K::Header({{"&.#", Kind::ref(cls)}}));
        host.insert(t);
        K::Relation frame = run_procedure(*this, proc, host, {});
        const auto& row = *frame.begin();
        out.insert({t[0], row[frame.header().index_of(kResultColumn)]});
    }
    return out;
}

void Evaluator::attach(Frame& f, const std::string& oid_column, K::Relation values, const std::vector<std::string>& names) {
    const auto& h = values.header();
    std::vector<std::pair<std::string, std::string>> temp;
    std::vector<std::string> temp_names;
    for (const auto& a : h) {
        temp.push_back({a.name, fresh("j")});
        temp_names.push_back(temp.back().second);
    }
    values = K::rename(values, temp);
    std::vector<std::string> keep = f.rel.header().names();
    K::Relation joined = K::left_join(f.rel, values, {{oid_column, temp_names[0]}});
    std::vector<std::pair<std::string, std::string>> back;
    for (std::size_t i = 1; i < temp_names.size(); ++i) {
        keep.push_back(temp_names[i]);
        back.push_back({temp_names[i], names[i - 1]});
    }
    f.rel = K::rename(K::project(joined, keep), back);
}

std::string Evaluator::ensure_scalar(Frame& f, const Binding& b, const MemberDecl& m) {
    std::string col = b.prefix + "." + m.name;
    if (b.node.kind == Node::Kind::Row || f.has(col)) return col;
    attach(f, b.oid_column(), member_values(b.node.cls, m), {col});
    return col;
}

Binding Evaluator::ensure_reference(Frame& f, const Binding& b, const MemberDecl& m) {
    Binding nb{b.prefix + "." + m.name, Node{Node::Kind::Object, m.target, nullptr, {}}};
    if (b.node.kind == Node::Kind::Row || f.has(nb.oid_column())) return nb;
    attach(f, b.oid_column(), member_values(b.node.cls, m), {nb.oid_column()});
    return nb;
}

Binding Evaluator::ensure_set(Frame& f, const Binding& b, const MemberDecl& m) {
    Binding nb{b.prefix + "." + m.name, Node{Node::Kind::Row, b.node.cls, &m, {}}};
    if (f.has(nb.marker_column())) return nb;
    if (f.functional) {
        fail(ErrorCode::NonCompilableBody, "set-valued component " + m.name + " used as a value; select from it instead");
    }
    K::Relation values = K::extend(member_values(b.node.cls, m), "%marker", K::literal(true));
    std::vector<std::string> names;
    for (const auto& n : m.members) {
        names.push_back(nb.prefix + "." + n.name + (n.form == Form::Reference ? ".#" : ""));
    }
    names.push_back(nb.marker_column());
    attach(f, b.oid_column(), std::move(values), names);
    return nb;
}

Resolved Evaluator::resolve(Frame& f, const Scope& s, const S::Path& p, bool navigate) {
    Binding cur;
    std::size_t i = 0;
    auto fail_at = [&](ErrorCode code, const std::string& msg) -> void { throw Error(code, msg, p.pos); };
    if (p.root == S::PathRoot::Dot) {
        const Scope* sc = &s;
        while (sc && !sc->dot) sc = sc->outer;
        if (!sc) fail_at(ErrorCode::UnknownName, "'.' path outside of an object context");
        cur = *sc->dot;
    } else if (p.root == S::PathRoot::Alias) {
        const Binding* found = nullptr;
        for (const Scope* sc = &s; sc && !found; sc = sc->outer) {
            if (auto it = sc->aliases.find(p.alias); it != sc->aliases.end()) found = &it->second;
        }
        if (!found) fail_at(ErrorCode::UnknownName, "unknown alias #" + p.alias);
        cur = *found;
    } else {
        const std::string& name = p.segments.front().name;
        bool bound = false;
        for (const Scope* sc = &s; sc && !bound; sc = sc->outer) {
            if (auto it = sc->locals.find(name); it != sc->locals.end()) {
                if (p.segments.size() > 1 || p.segments.front().predicate) {
                    fail_at(ErrorCode::NotTraversable, "local " + name + " cannot be navigated");
                }
                return it->second;
            }
            if (sc->from_bare && member_at(catalog(), sc->from_bare->node, name)) {
                cur = *sc->from_bare;
                bound = true;
            } else if (sc->host && member_at(catalog(), sc->host->node, name)) {
                cur = *sc->host;
                bound = true;
            }
        }
        if (!bound) {
            if (!catalog().contains(name)) fail_at(ErrorCode::UnknownName, "unknown name " + name);
            if (!navigate) fail_at(ErrorCode::Unsupported, "class " + name + " cannot start a value path");
            cur = Binding{"$" + std::to_string(counter_++), Node{Node::Kind::Object, name, nullptr, {}}};
            f.rel = K::join(f.rel, extent(name, cur.oid_column()), {});
            if (p.segments.front().predicate) restrict(f, s, cur, p.segments.front().predicate);
            i = 1;
        }
    }
    for (; i < p.segments.size(); ++i) {
        const S::Segment& seg = p.segments[i];
        const bool last = i + 1 == p.segments.size();
        if (seg.name == "#") {
            if (cur.node.kind != Node::Kind::Object) fail_at(ErrorCode::NotTraversable, "rows have no '#'");
            if (!last || seg.predicate) fail_at(ErrorCode::NotTraversable, "'#' ends a path");
            return Local{cur.oid_column(), Kind::ref(cur.node.cls)};
        }
        const MemberDecl* m = member_at(catalog(), cur.node, seg.name);
        if (!m) fail_at(ErrorCode::UnknownName, "unknown component " + seg.name);
        switch (m->form) {
        case Form::Method: fail_at(ErrorCode::NotTraversable, "method " + seg.name + " in a path"); break;
        case Form::Scalar: {
            if (seg.predicate) fail_at(ErrorCode::KindMismatch, "selection applied to scalar " + seg.name);
            if (!last) fail_at(ErrorCode::NotTraversable, "cannot continue past scalar " + seg.name);
            return Local{ensure_scalar(f, cur, *m), attribute_kind(*m)};
        }
        case Form::Reference:
            cur = ensure_reference(f, cur, *m);
            if (navigate) f.rel = K::select(f.rel, K::is_not_null(K::column(cur.oid_column())));
            break;
        case Form::SetOf:
            cur = ensure_set(f, cur, *m);
            if (navigate) f.rel = K::select(f.rel, K::is_not_null(K::column(cur.marker_column())));
            break;
        }
        if (seg.predicate) restrict(f, s, cur, seg.predicate);
    }
    return cur;
}

void Evaluator::restrict(Frame& f, const Scope& outer, const Binding& b, const S::ExprPtr& pred) {
    if (f.functional) fail(ErrorCode::NonCompilableBody, "object selection inside a procedure expression");
    Scope ps;
    ps.outer = &outer;
    ps.dot = b;
    std::vector<std::string> cols = f.rel.header().names();
    K::ExprPtr ke = compile(f, ps, *pred);
    require_boolean(kind_of(f, ke), pred->pos);
    f.rel = K::project(K::select(f.rel, ke), cols);
}

std::optional<Kind> Evaluator::kind_of(const Frame& f, const K::ExprPtr& e) const {
    return K::BoundExpr(e, f.rel.header()).kind();
}

K::ExprPtr Evaluator::compile(Frame& f, const Scope& s, const S::Expr& e) {
    try {
        return std::visit(
            [&](const auto& n) -> K::ExprPtr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, S::Expr::Literal>) {
                    return K::literal(n.value);
                } else if constexpr (std::is_same_v<T, S::Expr::PathRef>) {
                    const auto& p = n.path;
                    if (p.root == S::PathRoot::Bare && p.segments.size() == 1) {
                        const std::string& name = p.segments.front().name;
                        bool shadowed = false;
                        for (const Scope* sc = &s; sc && !shadowed; sc = sc->outer) {
                            shadowed = sc->locals.count(name) ||
                                       (sc->from_bare && member_at(catalog(), sc->from_bare->node, name)) ||
                                       (sc->host && member_at(catalog(), sc->host->node, name));
                        }
                        if (!shadowed && catalog().contains(name)) return K::column(selection_column(f, s, p));
                    }
                    Resolved r = resolve(f, s, p, false);
                    if (auto* l = std::get_if<Local>(&r)) return K::column(l->column);
                    const Binding& b = std::get<Binding>(r);
                    if (b.node.kind != Node::Kind::Object) {
                        throw Error(ErrorCode::KindMismatch, "set-valued path " + S::print(p) + " used as a value", p.pos);
                    }
                    return K::column(b.oid_column());
                } else if constexpr (std::is_same_v<T, S::Expr::Unary>) {
                    return K::unary(kernel_op(n.op), compile(f, s, *n.operand));
                } else if constexpr (std::is_same_v<T, S::Expr::Binary>) {
                    K::ExprPtr l = compile(f, s, *n.lhs);
                    K::ExprPtr r = compile(f, s, *n.rhs);
                    auto kl = kind_of(f, l);
                    auto kr = kind_of(f, r);
                    l = coerce_literal(*n.lhs, l, kr);
                    r = coerce_literal(*n.rhs, r, kl);
                    return K::binary(kernel_op(n.op), l, r);
                } else if constexpr (std::is_same_v<T, S::Expr::IsNull>) {
                    K::ExprPtr o = compile(f, s, *n.operand);
                    return n.negated ? K::is_not_null(o) : K::is_null(o);
                } else if constexpr (std::is_same_v<T, S::Expr::Aggregate>) {
                    fail(ErrorCode::AggregateMisuse, "aggregate outside of a SELECT item list");
                } else if constexpr (std::is_same_v<T, S::Expr::Subquery>) {
                    return K::column(subquery_column(f, s, *n.select));
                } else {
                    fail(ErrorCode::Unsupported, "NEW is only allowed as an initializer value");
                }
            },
            e.node);
    } catch (Error& err) {
        if (!err.position()) throw err.with_position(e.pos);
        throw;
    }
}

K::ExprPtr Evaluator::compile_as(Frame& f, const Scope& s, const S::Expr& e, const std::optional<Kind>& target) {
    return coerce_literal(e, compile(f, s, e), target);
}

std::string Evaluator::selection_column(Frame& f, const Scope& s, const S::Path& p) {
    auto sel = std::make_shared<S::Select>();
    S::Path oid;
    oid.root = S::PathRoot::Dot;
    oid.segments.push_back({"#", nullptr, p.pos});
    oid.pos = p.pos;
    sel->items.push_back({std::make_shared<S::Expr>(S::Expr{S::Expr::PathRef{oid}, p.pos}), ""});
    sel->from = p;
    sel->pos = p.pos;
    return subquery_column(f, s, *sel);
}

std::string Evaluator::subquery_column(Frame& f, const Scope& s, const S::Select& sel) {
    std::string rid = fresh("r");
    f.rel = K::number_rows(f.rel, rid);
    SelectResult r = run_select(f.rel, rid, s, sel);
    if (r.columns.size() != 1) throw Error(ErrorCode::KindMismatch, "a subquery used as a value must select one item", sel.pos);
    K::Relation values = K::project(r.rel, {rid, r.columns.front()});
    std::set<Value, ValueLess> seen;
    for (const auto& t : values) {
        if (!seen.insert(t[0]).second) throw Error(ErrorCode::Cardinality, "subquery yields more than one row", sel.pos);
    }
    std::string col = fresh("q");
    attach(f, rid, std::move(values), {col});
    std::vector<std::string> keep;
    for (const auto& n : f.rel.header().names()) {
        if (n != rid) keep.push_back(n);
    }
    f.rel = K::project(f.rel, keep);
    return col;
}

SelectResult Evaluator::run_select(const K::Relation& hosts, const std::string& host_key, const Scope& outer,
                                   const S::Select& sel) {
    Frame fr{hosts, false};
    Resolved from = resolve(fr, outer, sel.from, true);
    if (std::holds_alternative<Local>(from)) {
        throw Error(ErrorCode::TerminalScalarPath, "FROM path " + S::print(sel.from) + " ends at a scalar", sel.from.pos);
    }
    const Binding fb = std::get<Binding>(from);
    Scope ss;
    ss.outer = &outer;
    ss.dot = fb;
    if (!sel.from_alias.empty()) ss.aliases[sel.from_alias] = fb;
    else ss.from_bare = fb;

    if (sel.where) {
        if (contains_aggregate(*sel.where)) throw Error(ErrorCode::AggregateMisuse, "aggregate in WHERE", sel.where->pos);
        K::ExprPtr w = compile(fr, ss, *sel.where);
        require_boolean(kind_of(fr, w), sel.where->pos);
        fr.rel = K::select(fr.rel, w);
    }

    SelectResult out;
    out.host_key = host_key;
    for (const auto& item : sel.items) out.names.push_back(item_name(item));

    auto add_column = [&](Frame& target, const K::ExprPtr& e) {
        std::string col = fresh("o");
        auto k = kind_of(target, e);
        target.rel = K::extend(target.rel, col, e, k ? k : std::optional<Kind>(Kind::string()));
        out.columns.push_back(col);
    };

    bool grouped = !sel.group_by.empty();
    for (const auto& item : sel.items) grouped = grouped || contains_aggregate(*item.expr);
    if (!grouped) {
        for (const auto& item : sel.items) add_column(fr, compile(fr, ss, *item.expr));
        std::vector<std::string> cols{host_key};
        cols.insert(cols.end(), out.columns.begin(), out.columns.end());
        out.rel = K::project(fr.rel, cols);
        return out;
    }

    std::vector<std::string> group_cols{host_key};
    std::map<std::string, std::string> by_dump;
    for (const auto& g : sel.group_by) {
        if (contains_aggregate(*g)) throw Error(ErrorCode::AggregateMisuse, "aggregate in GROUP BY", g->pos);
        K::ExprPtr ke = compile(fr, ss, *g);
        std::string col = fresh("k");
        auto k = kind_of(fr, ke);
        fr.rel = K::extend(fr.rel, col, ke, k ? k : std::optional<Kind>(Kind::string()));
        group_cols.push_back(col);
        by_dump[S::dump(*g)] = col;
    }
    std::vector<K::AggregateSpec> specs;
    auto collect = [&](auto&& self, const S::Expr& e) -> void {
        if (const auto* a = std::get_if<S::Expr::Aggregate>(&e.node)) {
            std::string d = S::dump(e);
            if (by_dump.count(d)) return;
            std::string arg;
            if (a->argument) {
                if (contains_aggregate(*a->argument)) throw Error(ErrorCode::AggregateMisuse, "nested aggregate", e.pos);
                K::ExprPtr ke = compile(fr, ss, *a->argument);
                arg = fresh("x");
                auto k = kind_of(fr, ke);
                fr.rel = K::extend(fr.rel, arg, ke, k ? k : std::optional<Kind>(Kind::integer()));
            }
            std::string col = fresh("a");
            specs.push_back({a->fn, arg, col});
            by_dump[d] = col;
            return;
        }
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, S::Expr::Unary> || std::is_same_v<T, S::Expr::IsNull>) self(self, *n.operand);
                else if constexpr (std::is_same_v<T, S::Expr::Binary>) {
                    self(self, *n.lhs);
                    self(self, *n.rhs);
                }
            },
            e.node);
    };
    for (const auto& item : sel.items) collect(collect, *item.expr);

    K::Relation g;
    try {
        g = K::aggregate(fr.rel, group_cols, specs);
    } catch (Error& err) {
        if (!err.position()) throw err.with_position(sel.pos);
        throw;
    }
    if (sel.group_by.empty()) {
        // Every host gets a row even when nothing matched.
        K::Relation all = K::project(hosts, {host_key});
        K::Relation present = K::project(g, {host_key});
        for (const auto& t : K::difference(K::retype(all, present.header()), present)) {
            Tuple row = t;
            for (const auto& spec : specs) {
                if (spec.fn == K::AggregateFn::Count) row.push_back(std::int64_t{0});
                else row.push_back(Null{});
            }
            g.insert(std::move(row));
        }
    }

    Frame gf{std::move(g), false};
    auto translate = [&](auto&& self, const S::Expr& e) -> K::ExprPtr {
        if (auto it = by_dump.find(S::dump(e)); it != by_dump.end()) return K::column(it->second);
        return std::visit(
            [&](const auto& n) -> K::ExprPtr {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, S::Expr::Literal>) return K::literal(n.value);
                else if constexpr (std::is_same_v<T, S::Expr::Unary>) return K::unary(kernel_op(n.op), self(self, *n.operand));
                else if constexpr (std::is_same_v<T, S::Expr::IsNull>) {
                    auto o = self(self, *n.operand);
                    return n.negated ? K::is_not_null(o) : K::is_null(o);
                } else if constexpr (std::is_same_v<T, S::Expr::Binary>) {
                    K::ExprPtr l = self(self, *n.lhs);
                    K::ExprPtr r = self(self, *n.rhs);
                    auto kl = kind_of(gf, l);
                    auto kr = kind_of(gf, r);
                    return K::binary(kernel_op(n.op), coerce_literal(*n.lhs, l, kr), coerce_literal(*n.rhs, r, kl));
                } else {
                    throw Error(ErrorCode::AggregateMisuse, S::print(e) + " is neither grouped nor aggregated", e.pos);
                }
            },
            e.node);
    };
    for (const auto& item : sel.items) add_column(gf, translate(translate, *item.expr));
    std::vector<std::string> cols{host_key};
    cols.insert(cols.end(), out.columns.begin(), out.columns.end());
    out.rel = K::project(gf.rel, cols);
    return out;
}

Value Evaluator::constant(const S::Expr& e, const std::optional<Kind>& target) {
    Frame f{unit(), false};
    Scope top;
    K::ExprPtr ke = compile_as(f, top, e, target);
    auto k = kind_of(f, ke);
    if (target && k && !K::castable(*k, *target)) {
        throw Error(ErrorCode::KindMismatch, "value of kind " + to_string(*k) + " where " + to_string(*target) + " is expected",
                    e.pos);
    }
    std::optional<Kind> as = target ? target : k;
    f.rel = K::extend(f.rel, "%value", ke, as ? as : std::optional<Kind>(Kind::string()));
    if (f.rel.empty()) return Null{};
    const auto& row = *f.rel.begin();
    return row.back();
}

std::pair<std::string, K::ValueSet> Evaluator::select_objects(const S::Path& p) {
    Frame f{unit(), false};
    Scope top;
    Resolved r = resolve(f, top, p, true);
    const Binding* b = std::get_if<Binding>(&r);
    if (!b) throw Error(ErrorCode::TerminalScalarPath, S::print(p) + " does not reach objects", p.pos);
    if (b->node.kind != Node::Kind::Object) throw Error(ErrorCode::KindMismatch, S::print(p) + " reaches component rows, not objects", p.pos);
    K::ValueSet oids;
    auto idx = f.rel.header().index_of(b->oid_column());
    for (const auto& t : f.rel) oids.insert(t[idx]);
    return {b->node.cls, std::move(oids)};
}

std::variant<Value, K::Relation> Evaluator::calculated(const std::string& cls, Oid oid, const std::string& member) {
    std::string exact = exact_class_of(oid);
    if (!catalog().is_a(exact, cls)) fail(ErrorCode::KindMismatch, "object " + std::to_string(oid.value) + " is not a " + cls);
    const auto* rm = catalog().find_member(exact, member);
    if (!rm) fail(ErrorCode::UnknownMember, "class " + exact + " has no member " + member);
    if (rm->form() == Form::Method) fail(ErrorCode::KindMismatch, member + " is a method");
    auto act = catalog().active(exact, member);
    if (!act) fail(ErrorCode::UnrealizedComponent, exact + "." + member + " has no realization");
    if (act->realization->body == S::RealizationBody::Stored) {
        fail(ErrorCode::UnrealizedComponent, exact + "." + member + " is stored, not calculated");
    }
    const K::Relation& all = exact_member_values(exact, *rm->decl);
    K::Relation mine = K::select(all, K::eq(K::column(schema::kOid), K::literal(oid)));
    std::vector<std::string> rest;
    for (std::size_t i = 1; i < all.header().size(); ++i) rest.push_back(all.header()[i].name);
    K::Relation values = K::project(mine, rest);
    if (rm->form() == Form::SetOf) return values;
    if (values.empty()) return Value{Null{}};
    return values.begin()->front();
}

} // namespace rxo::query
