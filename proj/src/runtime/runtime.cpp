#include "rxo/runtime/runtime.hpp"

#include "rxo/query/evaluator.hpp"
#include "rxo/query/query.hpp"
#include "rxo/schema/schema.hpp"
#include "rxo/syntax/printer.hpp"

#include <map>
#include <set>

namespace rxo::runtime {

namespace K = kernel;
namespace S = syntax;
using catalog::MemberDecl;
using catalog::Node;
using query::Binding;
using query::Evaluator;
using query::Frame;
using query::Scope;
using Form = MemberDecl::Form;

namespace {

std::map<std::string, K::ValueSet> by_exact_class(const Database& db, const K::ValueSet& oids) {
    std::map<std::string, K::ValueSet> out;
    for (const auto& cls : db.catalog.class_names()) {
        if (!schema::has_root(db, cls)) continue;
        for (const auto& t : db.store.at(schema::root_relation(cls)).relation) {
            if (oids.count(t[0])) out[cls].insert(t[0]);
        }
    }
    return out;
}

K::Relation host_relation(const std::string& cls, const K::ValueSet& oids) {
    K::Relation r{K::Header({{query::kHostColumn, Kind::ref(cls)}})};
    for (const auto& v : oids) r.insert({v});
    return r;
}

// Resolves a component named by an initializer target such as `.Name`.
const MemberDecl& stored_component(const Database& db, const std::string& cls, const S::Path& target) {
    if (target.root == S::PathRoot::Alias || target.segments.size() != 1 || target.segments.front().predicate) {
        throw Error(ErrorCode::UnknownComponent, S::print(target) + " is not a component of " + cls, target.pos);
    }
    const std::string& name = target.segments.front().name;
    const auto* rm = db.catalog.find_member(cls, name);
    if (!rm || rm->form() == Form::Method) {
        throw Error(ErrorCode::UnknownComponent, "class " + cls + " has no component " + name, target.pos);
    }
    if (rm->form() == Form::SetOf) {
        throw Error(ErrorCode::KindMismatch, name + " is a set-of component; add rows with INSERT INTO", target.pos);
    }
    auto act = db.catalog.active(cls, name);
    if (!act || act->realization->body != S::RealizationBody::Stored) {
        throw Error(ErrorCode::AssignToCalculated, cls + "." + name + " is not stored", target.pos);
    }
    return *rm->decl;
}

// Replaces root attributes of the objects in `frame` (column `&.#`) with the
// frame columns named in `columns` (member -> column).
void write_back(Database& db, const std::string& cls, const K::Relation& frame,
                const std::vector<std::pair<std::string, std::string>>& columns) {
    if (columns.empty()) return;
    auto& root = db.store.at(schema::root_relation(cls)).relation;
    const auto& rh = root.header();
    std::vector<std::pair<std::size_t, std::size_t>> moves;
    for (const auto& [member, col] : columns) moves.push_back({rh.index_of(member), frame.header().index_of(col)});
    const std::size_t host = frame.header().index_of(query::kHostColumn);
    std::map<Value, const Tuple*, ValueLess> rows;
    for (const auto& t : frame) rows[t[host]] = &t;
    std::vector<Tuple> replaced;
    std::vector<Tuple> removed;
    for (const auto& t : root) {
        auto it = rows.find(t[0]);
        if (it == rows.end()) continue;
        Tuple nt = t;
        for (const auto& [to, from] : moves) nt[to] = (*it->second)[from];
        removed.push_back(t);
        replaced.push_back(std::move(nt));
    }
    for (const auto& t : removed) root.erase(t);
    for (auto& t : replaced) {
        K::check_conforms(rh, t);
        root.insert(std::move(t));
    }
}

Oid create(Database& db, const S::NewObject& st) {
    const std::string& cls = st.class_name;
    if (!db.catalog.contains(cls)) throw Error(ErrorCode::UnknownClass, "unknown class " + cls, st.pos);
    if (!schema::has_root(db, cls)) {
        throw Error(ErrorCode::UnrealizedComponent, "class " + cls + " has no stored components yet", st.pos);
    }
    std::map<std::string, Value> values;
    for (const auto& init : st.initializers) {
        const MemberDecl& m = stored_component(db, cls, init.target);
        if (values.count(m.name)) throw Error(ErrorCode::MemberCollision, m.name + " initialized twice", init.target.pos);
        const Kind kind = query::attribute_kind(m);
        if (const auto* nested = std::get_if<S::Expr::New>(&init.value->node)) {
            const std::string& ncls = nested->statement->class_name;
            if (kind.type != ScalarType::Ref || !db.catalog.contains(ncls) || !db.catalog.is_a(ncls, kind.ref_class)) {
                throw Error(ErrorCode::KindMismatch, "NEW " + ncls + " cannot initialize " + m.name, init.value->pos);
            }
            values[m.name] = create(db, *nested->statement);
        } else {
            Evaluator ev(db);
            values[m.name] = ev.constant(*init.value, kind);
        }
    }
    Oid oid{++db.last_oid};
    auto& root = db.store.at(schema::root_relation(cls)).relation;
    Tuple t{oid};
    for (std::size_t i = 1; i < root.header().size(); ++i) {
        auto it = values.find(root.header()[i].name);
        t.push_back(it == values.end() ? Value{Null{}} : it->second);
    }
    K::check_conforms(root.header(), t);
    root.insert(std::move(t));
    return oid;
}

const MemberDecl& set_component(const Database& db, const std::string& cls, const std::string& component,
                                std::string& relation) {
    const auto* rm = db.catalog.find_member(cls, component);
    if (!rm) fail(ErrorCode::UnknownComponent, "class " + cls + " has no component " + component);
    if (rm->form() != Form::SetOf) fail(ErrorCode::KindMismatch, component + " is not a set-of component");
    auto act = db.catalog.active(cls, component);
    if (!act || act->realization->body != S::RealizationBody::Stored) {
        fail(ErrorCode::AssignToCalculated, cls + "." + component + " is not stored");
    }
    relation = schema::storage_for(db, cls, component).relation;
    return *rm->decl;
}

template <typename F>
auto transact(Database& db, F&& body) {
    Database work = db;
    auto result = body(work);
    work.store.check();
    db = std::move(work);
    return result;
}

} // namespace

ObjectSelection select_objects(const Database& db, const S::Path& path) {
    Evaluator ev(db);
    auto [cls, oids] = ev.select_objects(path);
    return {cls, std::move(oids)};
}

Oid new_object(Database& db, const S::NewObject& st) {
    return transact(db, [&](Database& work) { return create(work, st); });
}

std::size_t destroy_objects(Database& db, const ObjectSelection& sel) {
    return transact(db, [&](Database& work) {
        if (sel.oids.empty()) return std::size_t{0};
        std::size_t n = 0;
        std::vector<std::string> names;
        for (const auto& [name, sr] : work.store.relations()) names.push_back(name);
        for (const auto& name : names) {
            auto& rel = work.store.at(name).relation;
            // Every stored relation starts with the owning object's OID.
            std::vector<Tuple> gone;
            for (const auto& t : rel) {
                if (sel.oids.count(t[0])) gone.push_back(t);
            }
            for (const auto& t : gone) rel.erase(t);
            if (name.ends_with("@obj")) n += gone.size();
            std::vector<std::size_t> refs;
            for (std::size_t i = 1; i < rel.header().size(); ++i) {
                if (rel.header()[i].kind.type == ScalarType::Ref) refs.push_back(i);
            }
            if (refs.empty()) continue;
            std::vector<Tuple> dangling;
            for (const auto& t : rel) {
                for (auto i : refs) {
                    if (sel.oids.count(t[i])) {
                        dangling.push_back(t);
                        break;
                    }
                }
            }
            for (const auto& t : dangling) {
                rel.erase(t);
                Tuple nt = t;
                for (auto i : refs) {
                    if (sel.oids.count(nt[i])) nt[i] = Null{};
                }
                rel.insert(std::move(nt));
            }
        }
        return n;
    });
}

std::size_t assign_components(Database& db, const ObjectSelection& sel,
                              const std::vector<std::pair<std::string, S::ExprPtr>>& assignments) {
    return transact(db, [&](Database& work) {
        const Database start = work;
        Evaluator ev(start);
        std::size_t n = 0;
        for (const auto& [cls, oids] : by_exact_class(start, sel.oids)) {
            Frame f{host_relation(cls, oids), true};
            Scope sc;
            Binding host{"&", Node{Node::Kind::Object, cls, nullptr, {}}};
            sc.host = host;
            sc.dot = host;
            std::vector<std::pair<std::string, std::string>> columns;
            std::set<std::string> seen;
            for (const auto& [name, expr] : assignments) {
                S::Path target;
                target.root = S::PathRoot::Dot;
                target.segments.push_back({name, nullptr, expr->pos});
                const MemberDecl& m = stored_component(start, cls, target);
                if (!seen.insert(name).second) throw Error(ErrorCode::MemberCollision, name + " assigned twice", expr->pos);
                const Kind kind = query::attribute_kind(m);
                K::ExprPtr ke = ev.compile_as(f, sc, *expr, kind);
                auto k = ev.kind_of(f, ke);
                if (k && !K::castable(*k, kind)) {
                    throw Error(ErrorCode::KindMismatch, "cannot assign " + to_string(*k) + " to " + cls + "." + name, expr->pos);
                }
                std::string col = ev.fresh("set");
                f.rel = K::extend(f.rel, col, k && *k != kind ? K::cast(ke, kind) : ke, kind);
                columns.push_back({name, col});
            }
            write_back(work, cls, f.rel, columns);
            n += oids.size();
        }
        return n;
    });
}

std::size_t insert_component(Database& db, const ObjectSelection& sel, const std::string& component,
                             const std::vector<std::vector<S::ExprPtr>>& rows) {
    return transact(db, [&](Database& work) {
        const Database start = work;
        Evaluator ev(start);
        std::size_t n = 0;
        for (const auto& [cls, oids] : by_exact_class(start, sel.oids)) {
            std::string relation;
            const MemberDecl& m = set_component(start, cls, component, relation);
            std::vector<Tuple> values;
            for (const auto& row : rows) {
                if (row.size() != m.members.size()) {
                    fail(ErrorCode::KindMismatch, component + " rows have " + std::to_string(m.members.size()) + " values");
                }
                Tuple t{Null{}};
                for (std::size_t i = 0; i < row.size(); ++i) t.push_back(ev.constant(*row[i], query::attribute_kind(m.members[i])));
                values.push_back(std::move(t));
            }
            auto& rel = work.store.at(relation).relation;
            for (const auto& oid : oids) {
                for (auto t : values) {
                    t[0] = oid;
                    K::check_conforms(rel.header(), t);
                    if (rel.insert(std::move(t))) ++n;
                }
            }
        }
        return n;
    });
}

std::size_t delete_component(Database& db, const ObjectSelection& sel, const std::string& component,
                             const S::ExprPtr& where) {
    return transact(db, [&](Database& work) {
        const Database start = work;
        Evaluator ev(start);
        std::size_t n = 0;
        for (const auto& [cls, oids] : by_exact_class(start, sel.oids)) {
            std::string relation;
            const MemberDecl& m = set_component(start, cls, component, relation);
            auto& rel = work.store.at(relation).relation;
            Binding host{"&", Node{Node::Kind::Object, cls, nullptr, {}}};
            Binding row{"$d", Node{Node::Kind::Row, cls, &m, {}}};
            std::vector<std::pair<std::string, std::string>> names{{schema::kOid, query::kHostColumn}};
            for (const auto& a : m.members) {
                names.push_back({a.name, row.prefix + "." + a.name + (a.form == Form::Reference ? ".#" : "")});
            }
            K::Relation mine = K::select(rel, K::in_set(K::column(schema::kOid), oids));
            Frame f{K::extend(K::rename(mine, names), row.marker_column(), K::literal(true)), false};
            if (where) {
                Scope sc;
                sc.host = host;
                sc.dot = row;
                K::ExprPtr pred = ev.compile(f, sc, *where);
                if (auto k = ev.kind_of(f, pred); k && k->type != ScalarType::Boolean) {
                    throw Error(ErrorCode::KindMismatch, "WHERE must be BOOLEAN", where->pos);
                }
                f.rel = K::select(f.rel, pred);
            }
            std::vector<std::string> cols;
            for (const auto& [from, to] : names) cols.push_back(to);
            for (const auto& t : K::project(f.rel, cols)) {
                if (rel.erase(t)) ++n;
            }
        }
        return n;
    });
}

query::SetProcedure compile_method(const Database& db, const std::string& cls, const std::string& method) {
    const auto* rm = db.catalog.find_member(cls, method);
    if (!rm) fail(ErrorCode::UnknownMember, "class " + cls + " has no member " + method);
    if (rm->form() != Form::Method) fail(ErrorCode::KindMismatch, method + " is not a method");
    auto act = db.catalog.active(cls, method);
    if (!act) fail(ErrorCode::UnrealizedComponent, "method " + cls + "." + method + " has no realization");
    return query::compile_procedure(db.catalog, cls, method, *act->realization->procedure, rm->decl->params,
                                    rm->decl->returns, true);
}

std::vector<Value> method_arguments(const Database& db, const std::string& cls, const std::string& method,
                                    const std::vector<S::ExprPtr>& args) {
    const auto* rm = db.catalog.find_member(cls, method);
    if (!rm) fail(ErrorCode::UnknownMember, "class " + cls + " has no member " + method);
    if (rm->form() != Form::Method) fail(ErrorCode::KindMismatch, method + " is not a method");
    const auto& params = rm->decl->params;
    if (params.size() != args.size()) {
        fail(ErrorCode::KindMismatch, method + " takes " + std::to_string(params.size()) + " arguments, got " +
                                          std::to_string(args.size()));
    }
    Evaluator ev(db);
    std::vector<Value> out;
    for (std::size_t i = 0; i < args.size(); ++i) out.push_back(ev.constant(*args[i], params[i].kind));
    return out;
}

std::size_t exec_method(Database& db, const ObjectSelection& sel, const std::string& method, const std::vector<Value>& args) {
    return transact(db, [&](Database& work) {
        const Database start = work;
        Evaluator ev(start);
        std::size_t n = 0;
        for (const auto& [cls, oids] : by_exact_class(start, sel.oids)) {
            query::SetProcedure proc = compile_method(start, cls, method);
            K::Relation frame = query::run_procedure(ev, proc, host_relation(cls, oids), args);
            std::vector<std::pair<std::string, std::string>> columns;
            for (const auto& w : proc.writes) columns.push_back({w, query::component_column(start.catalog, cls, w)});
            write_back(work, cls, frame, columns);
            n += oids.size();
        }
        return n;
    });
}

} // namespace rxo::runtime
