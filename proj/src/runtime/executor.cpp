#include "rxo/query/evaluator.hpp"
#include "rxo/query/query.hpp"
#include "rxo/runtime/runtime.hpp"
#include "rxo/schema/schema.hpp"
#include "rxo/syntax/printer.hpp"

namespace rxo::runtime {

namespace S = syntax;

namespace {

std::string affected(std::size_t n) { return "OK (" + std::to_string(n) + (n == 1 ? " row" : " rows") + " affected)"; }

// Splits `DOCS[.DocN = "D1"].Items` into the object path and the component.
std::pair<S::Path, std::string> component_target(const S::Path& p) {
    if (p.root != S::PathRoot::Bare || p.segments.size() < 2 || p.segments.back().predicate) {
        throw Error(ErrorCode::UnknownComponent, S::print(p) + " does not name a set-of component of selected objects", p.pos);
    }
    S::Path objects = p;
    std::string member = objects.segments.back().name;
    objects.segments.pop_back();
    return {objects, member};
}

// Realizations are checked once on registration so errors surface at ALTER.
void validate(const Database& db, const S::AlterRealize& a) {
    query::Evaluator ev(db);
    for (const auto& target : a.targets) {
        for (const auto& cls : db.catalog.extent_classes(a.class_name)) {
            auto act = db.catalog.active(cls, target.member);
            if (!act || act->owner != a.class_name) continue;
            const auto* rm = db.catalog.find_member(cls, target.member);
            if (rm->form() == S::MemberDecl::Form::Method) {
                query::compile_procedure(db.catalog, cls, target.member, *a.procedure, rm->decl->params, rm->decl->returns,
                                         true);
            } else if (a.body == S::RealizationBody::Procedure) {
                query::compile_procedure(db.catalog, cls, target.member, *a.procedure, {}, query::attribute_kind(*rm->decl),
                                         false);
            } else if (a.body == S::RealizationBody::Query && schema::has_root(db, cls)) {
                ev.exact_member_values(cls, *rm->decl);
            }
        }
    }
}

StatementResult run(Database& db, const S::Statement& st) {
    return std::visit(
        [&](const auto& n) -> StatementResult {
            using T = std::decay_t<decltype(n)>;
            StatementResult r;
            if constexpr (std::is_same_v<T, S::CreateClass>) {
                Database work = db;
                work.catalog.define_class(n);
                schema::rebuild(work);
                work.catalog.log(st);
                db = std::move(work);
                r.message = "OK (class " + n.name + " created)";
            } else if constexpr (std::is_same_v<T, S::AlterRealize>) {
                Database work = db;
                if (!work.catalog.contains(n.class_name)) fail(ErrorCode::UnknownClass, "unknown class " + n.class_name);
                for (const auto& target : n.targets) {
                    try {
                        work.catalog.register_realization(n.class_name, target.member, target.params,
                                                          catalog::Realization{n.body, n.query, n.procedure});
                    } catch (Error& e) {
                        if (!e.position()) throw e.with_position(target.pos);
                        throw;
                    }
                }
                schema::rebuild(work);
                validate(work, n);
                work.catalog.log(st);
                db = std::move(work);
                r.message = "OK (realization registered)";
            } else if constexpr (std::is_same_v<T, S::NewObject>) {
                std::uint64_t before = db.last_oid;
                new_object(db, n);
                r.affected = db.last_oid - before;
                r.message = affected(r.affected);
            } else if constexpr (std::is_same_v<T, S::Destroy>) {
                r.affected = destroy_objects(db, select_objects(db, n.target));
                r.message = affected(r.affected);
            } else if constexpr (std::is_same_v<T, S::Select>) {
                r.relation = query::evaluate_select(db, n);
                r.affected = r.relation->size();
            } else if constexpr (std::is_same_v<T, S::Exec>) {
                ObjectSelection sel = select_objects(db, n.target);
                auto args = method_arguments(db, sel.cls, n.method, n.args);
                r.affected = exec_method(db, sel, n.method, args);
                r.message = affected(r.affected);
            } else if constexpr (std::is_same_v<T, S::InsertRows>) {
                auto [objects, member] = component_target(n.target);
                r.affected = insert_component(db, select_objects(db, objects), member, n.rows);
                r.message = affected(r.affected);
            } else if constexpr (std::is_same_v<T, S::DeleteRows>) {
                auto [objects, member] = component_target(n.target);
                r.affected = delete_component(db, select_objects(db, objects), member, n.where);
                r.message = affected(r.affected);
            } else {
                std::vector<std::pair<std::string, S::ExprPtr>> sets;
                for (const auto& a : n.assignments) {
                    if (a.target.segments.size() != 1) {
                        throw Error(ErrorCode::UnknownComponent, S::print(a.target) + " is not a component", a.target.pos);
                    }
                    sets.push_back({a.target.segments.front().name, a.value});
                }
                r.affected = assign_components(db, select_objects(db, n.target), sets);
                r.message = affected(r.affected);
            }
            return r;
        },
        st.node);
}

} // namespace

StatementResult execute(Database& db, const S::Statement& st) {
    try {
        return run(db, st);
    } catch (Error& e) {
        if (!e.position()) throw e.with_position(st.pos);
        throw;
    }
}

} // namespace rxo::runtime
