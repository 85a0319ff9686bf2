#include "rxo/query/procedure.hpp"

#include "rxo/query/evaluator.hpp"
#include "rxo/syntax/printer.hpp"

#include <algorithm>
#include <set>

namespace rxo::query {

namespace K = kernel;
namespace S = syntax;
using Form = catalog::MemberDecl::Form;

std::vector<const Step*> SetProcedure::assignments() const {
    std::vector<const Step*> out;
    for (const auto& s : steps) {
        if (s.op == Step::Op::Assign) out.push_back(&s);
    }
    return out;
}

std::string component_column(const catalog::Catalog& cat, const std::string& cls, const std::string& member) {
    const auto* rm = cat.find_member(cls, member);
    if (!rm) fail(ErrorCode::UnknownMember, "class " + cls + " has no member " + member);
    return std::string("&.") + member + (rm->form() == Form::Reference ? ".#" : "");
}

namespace {

bool overlaps(const catalog::Catalog& cat, const std::string& a, const std::string& b) {
    return cat.is_a(a, b) || cat.is_a(b, a);
}

class Lowering {
public:
    Lowering(const catalog::Catalog& cat, SetProcedure& proc) : cat_(cat), proc_(proc) {
        for (const auto& p : proc.params) locals_.insert(p.name);
    }

    void block(const S::Block& b, const std::string& mask, const std::vector<Guard>& guards) {
        for (const auto& st : b) statement(st, mask, guards);
    }

private:
    void statement(const S::ProcStmt& st, const std::string& mask, const std::vector<Guard>& guards) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                Step step;
                step.mask = mask;
                step.guards = guards;
                step.pos = st.pos;
                if constexpr (std::is_same_v<T, S::ProcStmt::Declare>) {
                    if (!locals_.insert(n.name).second) {
                        throw Error(ErrorCode::MemberCollision, "local " + n.name + " declared twice", st.pos);
                    }
                    step.op = Step::Op::Declare;
                    step.name = n.name;
                    step.kind = n.kind;
                    proc_.steps.push_back(std::move(step));
                } else if constexpr (std::is_same_v<T, S::ProcStmt::Assign>) {
                    assign(n, std::move(step));
                } else if constexpr (std::is_same_v<T, S::ProcStmt::If>) {
                    check_reads(*n.condition);
                    std::string id = "%g" + std::to_string(branches_++);
                    step.op = Step::Op::Branch;
                    step.name = id;
                    step.expr = n.condition;
                    proc_.steps.push_back(std::move(step));
                    auto then_guards = guards;
                    then_guards.push_back({n.condition, true});
                    block(n.then_branch, id + "t", then_guards);
                    auto else_guards = guards;
                    else_guards.push_back({n.condition, false});
                    block(n.else_branch, id + "f", else_guards);
                } else {
                    if (n.value) check_reads(*n.value);
                    step.op = Step::Op::Return;
                    step.expr = n.value;
                    proc_.steps.push_back(std::move(step));
                }
            },
            st.node);
    }

    void assign(const S::ProcStmt::Assign& a, Step step) {
        const S::Path& t = a.target;
        if (t.root != S::PathRoot::Bare || t.segments.size() != 1 || t.segments.front().predicate) {
            throw Error(ErrorCode::NonCompilableBody, "assignment target " + S::print(t) + " is not a local or own component",
                        t.pos);
        }
        const std::string& name = t.segments.front().name;
        check_reads(*a.value);
        step.op = Step::Op::Assign;
        step.name = name;
        step.expr = a.value;
        if (locals_.count(name)) {
            proc_.steps.push_back(std::move(step));
            return;
        }
        const auto* rm = cat_.find_member(proc_.cls, name);
        if (!rm) throw Error(ErrorCode::UnknownName, "unknown name " + name, t.pos);
        if (!proc_.method) {
            throw Error(ErrorCode::NonCompilableBody, "a calculated component may not assign component " + name, t.pos);
        }
        if (rm->form() == Form::SetOf || rm->form() == Form::Method) {
            throw Error(ErrorCode::NonCompilableBody, name + " cannot be assigned in a method body", t.pos);
        }
        auto act = cat_.active(proc_.cls, name);
        if (!act || act->realization->body != S::RealizationBody::Stored) {
            throw Error(ErrorCode::NonCompilableBody, "component " + name + " is not stored", t.pos);
        }
        step.component = true;
        if (std::find(proc_.writes.begin(), proc_.writes.end(), name) == proc_.writes.end()) proc_.writes.push_back(name);
        proc_.steps.push_back(std::move(step));
    }

    void check_reads(const S::Expr& e) {
        std::visit(
            [&](const auto& n) {
                using T = std::decay_t<decltype(n)>;
                if constexpr (std::is_same_v<T, S::Expr::PathRef>) check_path(n.path);
                else if constexpr (std::is_same_v<T, S::Expr::Unary> || std::is_same_v<T, S::Expr::IsNull>) check_reads(*n.operand);
                else if constexpr (std::is_same_v<T, S::Expr::Binary>) {
                    check_reads(*n.lhs);
                    check_reads(*n.rhs);
                } else if constexpr (std::is_same_v<T, S::Expr::Aggregate>) {
                    throw Error(ErrorCode::AggregateMisuse, "aggregate outside of a SELECT", e.pos);
                }
            },
            e.node);
    }

    // Own components may be read; other objects only where this call cannot change them.
    void check_path(const S::Path& p) {
        if (p.root != S::PathRoot::Bare || locals_.count(p.segments.front().name)) return;
        const auto* rm = cat_.find_member(proc_.cls, p.segments.front().name);
        if (!rm) return;
        catalog::Node node{catalog::Node::Kind::Object, proc_.cls, nullptr, {}};
        for (std::size_t i = 0; i < p.segments.size(); ++i) {
            const auto& seg = p.segments[i];
            if (seg.name == "#") return;
            const catalog::MemberDecl* m = nullptr;
            for (const auto* cand : catalog::members_at(cat_, node)) {
                if (cand->name == seg.name) m = cand;
            }
            if (!m) return;
            if (m->form == Form::SetOf) {
                throw Error(ErrorCode::NonCompilableBody, "set-valued component " + m->name + " read outside a SELECT", p.pos);
            }
            if (m->form != Form::Reference) return;
            const bool more = i + 1 < p.segments.size() && p.segments[i + 1].name != "#";
            if (proc_.method && more && overlaps(cat_, m->target, proc_.cls)) {
                throw Error(ErrorCode::NonCompilableBody,
                            "method reads state of another " + m->target + " object through " + S::print(p), p.pos);
            }
            node = catalog::step_node(node, *m);
        }
    }

    const catalog::Catalog& cat_;
    SetProcedure& proc_;
    std::set<std::string> locals_;
    int branches_ = 0;
};

K::ExprPtr live_mask(const std::string& mask) {
    K::ExprPtr alive = K::unary(K::UnaryOp::Not, K::column(kReturnedColumn));
    return mask.empty() ? alive : K::conj(K::column(mask), alive);
}

K::ExprPtr checked_value(Evaluator& ev, Frame& f, const Scope& sc, const S::Expr& e, const Kind& target) {
    K::ExprPtr ke = ev.compile_as(f, sc, e, target);
    auto k = ev.kind_of(f, ke);
    if (!k) return K::literal(Null{}, target);
    if (!K::castable(*k, target)) {
        throw Error(ErrorCode::KindMismatch, "cannot assign " + to_string(*k) + " to " + to_string(target), e.pos);
    }
    return *k == target ? ke : K::cast(ke, target);
}

} // namespace

SetProcedure compile_procedure(const catalog::Catalog& cat, const std::string& cls, const std::string& member,
                               const S::Block& body, const std::vector<S::Param>& params,
                               const std::optional<Kind>& returns, bool method) {
    SetProcedure proc;
    proc.cls = cls;
    proc.member = member;
    proc.params = params;
    proc.returns = returns;
    proc.method = method;
    Lowering(cat, proc).block(body, "", {});
    return proc;
}

K::Relation run_procedure(Evaluator& ev, const SetProcedure& proc, const K::Relation& hosts,
                          const std::vector<Value>& args) {
    if (args.size() != proc.params.size()) {
        fail(ErrorCode::KindMismatch, proc.member + " takes " + std::to_string(proc.params.size()) + " arguments, got " +
                                          std::to_string(args.size()));
    }
    Frame f{hosts, true};
    Scope sc;
    const Binding host{"&", catalog::Node{catalog::Node::Kind::Object, proc.cls, nullptr, {}}};
    sc.host = host;
    for (std::size_t i = 0; i < args.size(); ++i) {
        const auto& p = proc.params[i];
        Value v = args[i];
        if (p.kind.type == ScalarType::Float && std::holds_alternative<std::int64_t>(v)) {
            v = static_cast<double>(std::get<std::int64_t>(v));
        }
        if (!conforms(v, p.kind)) fail(ErrorCode::KindMismatch, "argument " + p.name + " must be " + to_string(p.kind));
        std::string col = "%p." + p.name;
        f.rel = K::extend(f.rel, col, K::literal(v, p.kind), p.kind);
        sc.locals[p.name] = Local{col, p.kind};
    }
    f.rel = K::extend(f.rel, kReturnedColumn, K::literal(false));
    if (proc.returns) f.rel = K::extend(f.rel, kResultColumn, K::literal(Null{}, *proc.returns), *proc.returns);

    for (const auto& step : proc.steps) {
        try {
            switch (step.op) {
            case Step::Op::Declare: {
                std::string col = "%v." + step.name;
                f.rel = K::extend(f.rel, col, K::literal(Null{}, *step.kind), *step.kind);
                sc.locals[step.name] = Local{col, *step.kind};
                break;
            }
            case Step::Op::Branch: {
                K::ExprPtr cond = ev.compile(f, sc, *step.expr);
                if (auto k = ev.kind_of(f, cond); k && k->type != ScalarType::Boolean) {
                    throw Error(ErrorCode::KindMismatch, "IF condition must be BOOLEAN", step.expr->pos);
                }
                K::ExprPtr live = live_mask(step.mask);
                K::ExprPtr holds = K::eq(cond, K::literal(true));
                f.rel = K::extend(f.rel, step.name + "t", K::conj(live, holds), Kind::boolean());
                f.rel = K::extend(f.rel, step.name + "f", K::conj(live, K::unary(K::UnaryOp::Not, holds)), Kind::boolean());
                break;
            }
            case Step::Op::Assign: {
                std::string col;
                Kind kind;
                if (!step.component) {
                    const Local& l = sc.locals.at(step.name);
                    col = l.column;
                    kind = l.kind;
                } else {
                    const auto* rm = ev.catalog().find_member(proc.cls, step.name);
                    kind = attribute_kind(*rm->decl);
                    if (rm->form() == Form::Reference) {
                        col = ev.ensure_reference(f, host, *rm->decl).oid_column();
                    } else {
                        col = ev.ensure_scalar(f, host, *rm->decl);
                    }
                }
                K::ExprPtr value = checked_value(ev, f, sc, *step.expr, kind);
                f.rel = K::update(f.rel, live_mask(step.mask), {{col, value}});
                if (step.component && kind.type == ScalarType::Ref) {
                    // Expansions through the old reference are stale now.
                    const std::string stale = "&." + step.name + ".";
                    std::vector<std::string> keep;
                    for (const auto& n : f.rel.header().names()) {
                        if (n.rfind(stale, 0) != 0 || n == col) keep.push_back(n);
                    }
                    f.rel = K::project(f.rel, keep);
                }
                break;
            }
            case Step::Op::Return: {
                std::vector<std::pair<std::string, K::ExprPtr>> sets;
                if (step.expr) {
                    if (!proc.returns) throw Error(ErrorCode::KindMismatch, proc.member + " returns no value", step.pos);
                    sets.push_back({kResultColumn, checked_value(ev, f, sc, *step.expr, *proc.returns)});
                }
                sets.push_back({kReturnedColumn, K::literal(true)});
                f.rel = K::update(f.rel, live_mask(step.mask), sets);
                break;
            }
            }
        } catch (Error& err) {
            if (!err.position()) throw err.with_position(step.pos);
            throw;
        }
    }

    if (!proc.method) {
        const auto idx = f.rel.header().index_of(kReturnedColumn);
        for (const auto& t : f.rel) {
            if (!std::get<bool>(t[idx])) {
                fail(ErrorCode::ProcedureNoReturn, proc.cls + "." + proc.member + " ended without RETURN");
            }
        }
    }
    std::vector<std::string> out{kHostColumn};
    for (const auto& w : proc.writes) {
        std::string col = component_column(ev.catalog(), proc.cls, w);
        if (!f.has(col)) {
            // Written only in branches that never ran for these hosts.
            const auto* rm = ev.catalog().find_member(proc.cls, w);
            if (rm->form() == Form::Reference) ev.ensure_reference(f, host, *rm->decl);
            else ev.ensure_scalar(f, host, *rm->decl);
        }
        out.push_back(col);
    }
    if (proc.returns) out.push_back(kResultColumn);
    return K::project(f.rel, out);
}

} // namespace rxo::query
