#include "rxo/kernel/store.hpp"

#include "rxo/kernel/algebra.hpp"

#include <set>

namespace rxo::kernel {

void RelationStore::create(StoredRelation rel) {
    if (relations_.count(rel.name)) fail(ErrorCode::DuplicateAttribute, "relation " + rel.name + " already exists");
    std::string name = rel.name;
    relations_.emplace(std::move(name), std::move(rel));
}

void RelationStore::drop(const std::string& name) {
    if (!relations_.erase(name)) fail(ErrorCode::UnknownRelation, "unknown relation " + name);
}

void RelationStore::replace(StoredRelation rel) {
    std::string name = rel.name;
    relations_.insert_or_assign(std::move(name), std::move(rel));
}

const StoredRelation& RelationStore::at(const std::string& name) const {
    auto it = relations_.find(name);
    if (it == relations_.end()) fail(ErrorCode::UnknownRelation, "unknown relation " + name);
    return it->second;
}

StoredRelation& RelationStore::at(const std::string& name) {
    auto it = relations_.find(name);
    if (it == relations_.end()) fail(ErrorCode::UnknownRelation, "unknown relation " + name);
    return it->second;
}

std::size_t RelationStore::apply_unchecked(const Mutation& m) {
    return std::visit(
        [&](const auto& op) -> std::size_t {
            using T = std::decay_t<decltype(op)>;
            Relation& rel = at(op.relation).relation;
            if constexpr (std::is_same_v<T, Insert>) {
                std::size_t n = 0;
                for (const auto& t : op.tuples) n += rel.insert(t) ? 1 : 0;
                return n;
            } else if constexpr (std::is_same_v<T, Delete>) {
                Relation doomed = select(rel, op.predicate);
                for (const auto& t : doomed) rel.erase(t);
                return doomed.size();
            } else {
                Relation hit = select(rel, op.predicate);
                Relation changed = kernel::update(hit, always_true(), op.assignments);
                for (const auto& t : hit) rel.erase(t);
                for (const auto& t : changed) rel.insert(t);
                return hit.size();
            }
        },
        m);
}

namespace {

std::set<Tuple, TupleLess> value_set(const Relation& rel, const std::vector<std::string>& attrs, bool& has_dup) {
    std::vector<std::size_t> idx;
    for (const auto& a : attrs) idx.push_back(rel.header().index_of(a));
    std::set<Tuple, TupleLess> out;
    has_dup = false;
    for (const auto& t : rel) {
        Tuple k;
        bool null = false;
        for (auto i : idx) {
            null = null || is_null(t[i]);
            k.push_back(t[i]);
        }
        if (null) continue;
        if (!out.insert(std::move(k)).second) has_dup = true;
    }
    return out;
}

} // namespace

std::vector<Error> RelationStore::violations() const {
    std::vector<Error> out;
    for (const auto& [name, stored] : relations_) {
        if (auto v = stored.relation.key_violation()) {
            out.emplace_back(ErrorCode::KeyViolation, name + ": " + *v);
        }
    }
    for (const auto& key : shared_keys_) {
        std::set<Tuple, TupleLess> seen;
        for (const auto& member : key.members) {
            auto it = relations_.find(member.relation);
            if (it == relations_.end()) continue;
            bool dup = false;
            for (auto& k : value_set(it->second.relation, member.attributes, dup)) {
                if (!seen.insert(k).second) dup = true;
            }
            if (dup) {
                out.emplace_back(ErrorCode::KeyViolation, key.label + ": duplicate key across " + member.relation);
                break;
            }
        }
    }
    for (const auto& [name, stored] : relations_) {
        for (const auto& fk : stored.foreign_keys) {
            std::set<Tuple, TupleLess> allowed;
            for (const auto& target : fk.targets) {
                auto it = relations_.find(target.relation);
                if (it == relations_.end()) continue;
                bool dup = false;
                auto vs = value_set(it->second.relation, target.attributes, dup);
                allowed.insert(vs.begin(), vs.end());
            }
            bool dup = false;
            for (const auto& k : value_set(stored.relation, fk.attributes, dup)) {
                if (!allowed.count(k)) {
                    out.emplace_back(ErrorCode::ForeignKeyViolation,
                                     (fk.label.empty() ? name : fk.label) + ": no target for " + format_tuple(k));
                    break;
                }
            }
        }
    }
    return out;
}

void RelationStore::check() const {
    auto v = violations();
    if (!v.empty()) throw v.front();
}

RelationStore apply_mutation(const RelationStore& store, const Mutation& m) {
    RelationStore next = store;
    next.apply_unchecked(m);
    next.check();
    return next;
}

std::size_t apply_mutations(RelationStore& store, std::span<const Mutation> ms) {
    RelationStore next = store;
    std::size_t n = 0;
    for (const auto& m : ms) n += next.apply_unchecked(m);
    next.check();
    store = std::move(next);
    return n;
}

} // namespace rxo::kernel
