#include "rxo/query/query.hpp"

#include "rxo/syntax/printer.hpp"

#include <set>

namespace rxo::query {

namespace K = kernel;
namespace S = syntax;
using catalog::Node;
using Form = catalog::MemberDecl::Form;

namespace {

struct HeaderBuilder {
    Evaluator& ev;
    Frame& frame;
    std::vector<std::string> columns;
    std::vector<std::pair<std::string, std::string>> renames;

    void add(const std::string& column, const std::string& name) {
        columns.push_back(column);
        renames.push_back({column, name});
    }

    void object(const Binding& b, const std::string& name, int depth) {
        if (depth > kMaxExpansionDepth) {
            fail(ErrorCode::CycleDepthExceeded, "reference expansion deeper than " + std::to_string(kMaxExpansionDepth) +
                                                    " at " + name);
        }
        if (b.node.kind == Node::Kind::Object) add(b.oid_column(), name + ".#");
        for (const auto* m : catalog::members_at(ev.catalog(), b.node)) {
            switch (m->form) {
            case Form::Scalar: add(ev.ensure_scalar(frame, b, *m), name + "." + m->name); break;
            case Form::Reference: object(ev.ensure_reference(frame, b, *m), name + "." + m->name, depth + 1); break;
            case Form::SetOf: object(ev.ensure_set(frame, b, *m), name + "." + m->name, depth); break;
            case Form::Method: break;
            }
        }
    }
};

} // namespace

OView resolve_oview(const Database& db, const S::Path& path, const std::optional<std::string>& context) {
    Evaluator ev(db);
    Frame f{ev.unit(), false};
    Scope top;
    if (context) {
        if (!db.catalog.contains(*context)) fail(ErrorCode::UnknownClass, "unknown class " + *context);
        Binding host{"&", Node{Node::Kind::Object, *context, nullptr, {}}};
        f.rel = ev.extent(*context, host.oid_column());
        top.host = host;
        top.dot = host;
    }
    Resolved r = ev.resolve(f, top, path, true);
    const Binding* b = std::get_if<Binding>(&r);
    if (!b) throw Error(ErrorCode::TerminalScalarPath, S::print(path) + " ends at a scalar", path.pos);
    HeaderBuilder hb{ev, f, {}, {}};
    hb.object(*b, "", 0);
    OView out;
    out.cls = b->node.cls;
    out.rows = b->node.kind == Node::Kind::Row;
    out.relation = K::rename(K::project(f.rel, hb.columns), hb.renames);
    return out;
}

SelectionPlan compile_selection(const Database& db, const std::string& cls, const S::ExprPtr& predicate) {
    if (!db.catalog.contains(cls)) fail(ErrorCode::UnknownClass, "unknown class " + cls);
    Evaluator ev(db);
    Binding b{"$s", Node{Node::Kind::Object, cls, nullptr, {}}};
    Frame f{ev.extent(cls, b.oid_column()), false};
    Scope top;
    if (predicate) ev.restrict(f, top, b, predicate);
    SelectionPlan plan{cls, {}};
    for (const auto& t : f.rel) plan.oids.insert(t[0]);
    return plan;
}

K::Relation evaluate_select(const Database& db, const S::Select& select) {
    Evaluator ev(db);
    Scope top;
    SelectResult r = ev.run_select(ev.unit(), "%unit", top, select);
    std::set<std::string> seen;
    std::vector<std::pair<std::string, std::string>> renames;
    for (std::size_t i = 0; i < r.columns.size(); ++i) {
        if (!seen.insert(r.names[i]).second) {
            throw Error(ErrorCode::DuplicateOutName, "output name " + r.names[i] + " appears twice", select.pos);
        }
        renames.push_back({r.columns[i], r.names[i]});
    }
    return K::rename(K::project(r.rel, r.columns), renames);
}

std::variant<Value, K::Relation> eval_calculated(const Database& db, const std::string& cls, Oid oid,
                                                 const std::string& member) {
    Evaluator ev(db);
    return ev.calculated(cls, oid, member);
}

} // namespace rxo::query
