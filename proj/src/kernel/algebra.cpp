#include "rxo/kernel/algebra.hpp"

#include <map>

namespace rxo::kernel {

Relation select(const Relation& rel, const ExprPtr& pred) {
    BoundExpr bound(pred, rel.header());
    Relation out(rel.header());
    for (const auto& t : rel) {
        if (bound.test(t)) out.insert(t);
    }
    return out;
}

Relation project(const Relation& rel, const std::vector<std::string>& attributes) {
    std::vector<std::size_t> idx;
    std::vector<Attribute> attrs;
    for (const auto& name : attributes) {
        idx.push_back(rel.header().index_of(name));
        attrs.push_back(rel.header()[idx.back()]);
    }
    Relation out{Header(std::move(attrs))};
    for (const auto& t : rel) {
        Tuple p;
        p.reserve(idx.size());
        for (auto i : idx) p.push_back(t[i]);
        out.insert(std::move(p));
    }
    return out;
}

namespace {

struct JoinLayout {
    Header header;
    std::vector<std::size_t> left_idx;
    std::vector<std::size_t> right_idx;
};

JoinLayout layout(const Relation& left, const Relation& right, const std::vector<JoinPair>& on) {
    JoinLayout l;
    for (const auto& p : on) {
        auto li = left.header().index_of(p.left);
        auto ri = right.header().index_of(p.right);
        const Kind& lk = left.header()[li].kind;
        const Kind& rk = right.header()[ri].kind;
        if (lk.type != rk.type) {
            fail(ErrorCode::KindMismatch, "join attributes " + p.left + ":" + to_string(lk) + " and " + p.right + ":" +
                                              to_string(rk) + " have different kinds");
        }
        l.left_idx.push_back(li);
        l.right_idx.push_back(ri);
    }
    std::vector<Attribute> attrs = left.header().attributes();
    for (auto a : right.header()) {
        auto taken = [&](const std::string& n) {
            for (const auto& x : attrs) {
                if (x.name == n) return true;
            }
            return false;
        };
        while (taken(a.name)) a.name = "r." + a.name;
        attrs.push_back(std::move(a));
    }
    l.header = Header(std::move(attrs));
    return l;
}

Relation join_impl(const Relation& left, const Relation& right, const std::vector<JoinPair>& on, bool outer) {
    JoinLayout l = layout(left, right, on);
    std::map<Tuple, std::vector<const Tuple*>, TupleLess> index;
    for (const auto& t : right) {
        Tuple k;
        bool null_key = false;
        for (auto i : l.right_idx) {
            null_key = null_key || is_null(t[i]);
            k.push_back(t[i]);
        }
        if (!null_key) index[std::move(k)].push_back(&t);
    }
    Relation out(l.header);
    const std::size_t right_arity = right.header().size();
    for (const auto& t : left) {
        Tuple k;
        bool null_key = false;
        for (auto i : l.left_idx) {
            null_key = null_key || is_null(t[i]);
            k.push_back(t[i]);
        }
        auto it = null_key ? index.end() : index.find(k);
        if (it == index.end()) {
            if (outer) {
                Tuple padded = t;
                padded.resize(t.size() + right_arity, Null{});
                out.insert(std::move(padded));
            }
            continue;
        }
        for (const Tuple* r : it->second) {
            Tuple joined = t;
            joined.insert(joined.end(), r->begin(), r->end());
            out.insert(std::move(joined));
        }
    }
    return out;
}

} // namespace

Relation join(const Relation& left, const Relation& right, const std::vector<JoinPair>& on) {
    return join_impl(left, right, on, false);
}

Relation left_join(const Relation& left, const Relation& right, const std::vector<JoinPair>& on) {
    return join_impl(left, right, on, true);
}

Relation union_of(const Relation& a, const Relation& b) {
    if (!(a.header() == b.header())) fail(ErrorCode::HeaderMismatch, "union of relations with different headers");
    Relation out = a;
    for (const auto& t : b) out.insert(t);
    return out;
}

Relation difference(const Relation& a, const Relation& b) {
    if (!(a.header() == b.header())) fail(ErrorCode::HeaderMismatch, "difference of relations with different headers");
    Relation out(a.header(), a.keys());
    for (const auto& t : a) {
        if (!b.contains(t)) out.insert(t);
    }
    return out;
}

std::string to_string(AggregateFn fn) {
    switch (fn) {
    case AggregateFn::Sum: return "SUM";
    case AggregateFn::Count: return "COUNT";
    case AggregateFn::Min: return "MIN";
    case AggregateFn::Max: return "MAX";
    case AggregateFn::Avg: return "AVG";
    }
    return "?";
}

Kind aggregate_kind(AggregateFn fn, const Kind& input) {
    switch (fn) {
    case AggregateFn::Count: return Kind::integer();
    case AggregateFn::Avg:
        if (!input.is_numeric()) break;
        return Kind::floating();
    case AggregateFn::Sum:
        if (!input.is_numeric()) break;
        return input;
    case AggregateFn::Min:
    case AggregateFn::Max:
        if (!input.is_numeric() && input.type != ScalarType::DateTime) break;
        return input;
    }
    fail(ErrorCode::KindMismatch, to_string(fn) + " is not defined for " + to_string(input));
}

namespace {

struct Accumulator {
    AggregateFn fn;
    std::int64_t count = 0;
    Value acc = Null{};
    double sum_f = 0;

    void add(const Value& v) {
        if (is_null(v)) return;
        ++count;
        switch (fn) {
        case AggregateFn::Count: break;
        case AggregateFn::Sum:
            if (is_null(acc)) {
                acc = v;
            } else if (std::holds_alternative<std::int64_t>(acc)) {
                std::int64_t r = 0;
                if (__builtin_add_overflow(std::get<std::int64_t>(acc), std::get<std::int64_t>(v), &r)) {
                    fail(ErrorCode::InvalidValue, "integer overflow in SUM");
                }
                acc = r;
            } else {
                acc = std::get<double>(acc) + std::get<double>(v);
            }
            break;
        case AggregateFn::Avg:
            sum_f += std::holds_alternative<double>(v) ? std::get<double>(v)
                                                       : static_cast<double>(std::get<std::int64_t>(v));
            break;
        case AggregateFn::Min:
            if (is_null(acc) || compare_values(v, acc) < 0) acc = v;
            break;
        case AggregateFn::Max:
            if (is_null(acc) || compare_values(v, acc) > 0) acc = v;
            break;
        }
    }

    Value result() const {
        switch (fn) {
        case AggregateFn::Count: return count;
        case AggregateFn::Avg:
            if (count == 0) return Null{};
            return sum_f / static_cast<double>(count);
        default: return acc;
        }
    }
};

} // namespace

Relation aggregate(const Relation& rel, const std::vector<std::string>& group_by,
                   const std::vector<AggregateSpec>& aggregates) {
    std::vector<Attribute> attrs;
    std::vector<std::size_t> group_idx;
    for (const auto& g : group_by) {
        group_idx.push_back(rel.header().index_of(g));
        attrs.push_back(rel.header()[group_idx.back()]);
    }
    std::vector<std::optional<std::size_t>> agg_idx;
    for (const auto& a : aggregates) {
        for (const auto& existing : attrs) {
            if (existing.name == a.out_name) fail(ErrorCode::DuplicateOutName, "duplicate output name " + a.out_name);
        }
        if (a.attribute.empty()) {
            if (a.fn != AggregateFn::Count) fail(ErrorCode::KindMismatch, to_string(a.fn) + " needs an attribute");
            agg_idx.push_back(std::nullopt);
            attrs.push_back({a.out_name, Kind::integer()});
        } else {
            auto i = rel.header().index_of(a.attribute);
            agg_idx.push_back(i);
            attrs.push_back({a.out_name, aggregate_kind(a.fn, rel.header()[i].kind)});
        }
    }
    std::map<Tuple, std::vector<Accumulator>, TupleLess> groups;
    auto fresh = [&] {
        std::vector<Accumulator> accs;
        for (const auto& a : aggregates) accs.push_back(Accumulator{a.fn});
        return accs;
    };
    if (group_by.empty()) groups.emplace(Tuple{}, fresh());
    for (const auto& t : rel) {
        Tuple key;
        for (auto i : group_idx) key.push_back(t[i]);
        auto it = groups.find(key);
        if (it == groups.end()) it = groups.emplace(std::move(key), fresh()).first;
        for (std::size_t j = 0; j < aggregates.size(); ++j) {
            it->second[j].add(agg_idx[j] ? t[*agg_idx[j]] : Value{true});
        }
    }
    Relation out{Header(std::move(attrs))};
    for (const auto& [key, accs] : groups) {
        Tuple row = key;
        for (const auto& a : accs) row.push_back(a.result());
        out.insert(std::move(row));
    }
    return out;
}

Relation extend(const Relation& rel, const std::string& name, const ExprPtr& expr, const std::optional<Kind>& kind) {
    BoundExpr bound(expr, rel.header());
    std::optional<Kind> k = kind ? kind : bound.kind();
    if (!k) fail(ErrorCode::KindMismatch, "cannot infer the kind of attribute " + name);
    if (kind && bound.kind() && !castable(*bound.kind(), *kind)) {
        fail(ErrorCode::KindMismatch, "expression of kind " + to_string(*bound.kind()) + " stored into " + name + ":" +
                                          to_string(*kind));
    }
    std::vector<Attribute> attrs = rel.header().attributes();
    attrs.push_back({name, *k});
    Relation out{Header(std::move(attrs))};
    const bool widen = k->type == ScalarType::Float;
    for (const auto& t : rel) {
        Tuple row = t;
        Value v = bound.evaluate(t);
        if (widen && std::holds_alternative<std::int64_t>(v)) v = static_cast<double>(std::get<std::int64_t>(v));
        row.push_back(std::move(v));
        out.insert(std::move(row));
    }
    return out;
}

Relation rename(const Relation& rel, const std::vector<std::pair<std::string, std::string>>& renames) {
    std::vector<Attribute> attrs = rel.header().attributes();
    for (const auto& [from, to] : renames) attrs[rel.header().index_of(from)].name = to;
    Relation out{Header(std::move(attrs))};
    for (const auto& t : rel) out.insert(t);
    return out;
}

Relation update(const Relation& rel, const ExprPtr& pred,
                const std::vector<std::pair<std::string, ExprPtr>>& assignments) {
    BoundExpr guard(pred, rel.header());
    std::vector<std::pair<std::size_t, BoundExpr>> bound;
    for (const auto& [name, e] : assignments) {
        auto i = rel.header().index_of(name);
        BoundExpr b(e, rel.header());
        if (b.kind() && !castable(*b.kind(), rel.header()[i].kind)) {
            fail(ErrorCode::KindMismatch, "cannot assign " + to_string(*b.kind()) + " to " + name + ":" +
                                              to_string(rel.header()[i].kind));
        }
        bound.emplace_back(i, std::move(b));
    }
    Relation out(rel.header(), rel.keys());
    for (const auto& t : rel) {
        if (!guard.test(t)) {
            out.insert(t);
            continue;
        }
        Tuple row = t;
        for (const auto& [i, b] : bound) {
            Value v = b.evaluate(t);
            if (rel.header()[i].kind.type == ScalarType::Float && std::holds_alternative<std::int64_t>(v)) {
                v = static_cast<double>(std::get<std::int64_t>(v));
            }
            row[i] = std::move(v);
        }
        out.insert(std::move(row));
    }
    return out;
}

Relation retype(const Relation& rel, const Header& header) {
    if (header.size() != rel.header().size()) {
        fail(ErrorCode::HeaderMismatch, "retype to a header of different arity");
    }
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!castable(rel.header()[i].kind, header[i].kind)) {
            fail(ErrorCode::KindMismatch, "attribute " + rel.header()[i].name + ":" + to_string(rel.header()[i].kind) +
                                              " cannot become " + header[i].name + ":" + to_string(header[i].kind));
        }
    }
    Relation out(header);
    for (const auto& t : rel) {
        Tuple row = t;
        for (std::size_t i = 0; i < row.size(); ++i) {
            if (header[i].kind.type == ScalarType::Float && std::holds_alternative<std::int64_t>(row[i])) {
                row[i] = static_cast<double>(std::get<std::int64_t>(row[i]));
            }
        }
        out.insert(std::move(row));
    }
    return out;
}

Relation number_rows(const Relation& rel, const std::string& name) {
    std::vector<Attribute> attrs = rel.header().attributes();
    attrs.push_back({name, Kind::integer()});
    Relation out{Header(std::move(attrs))};
    std::int64_t i = 0;
    for (Tuple t : rel.canonical_rows()) {
        t.push_back(i++);
        out.insert(std::move(t));
    }
    return out;
}

} // namespace rxo::kernel
