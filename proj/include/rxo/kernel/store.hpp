#pragma once

#include "rxo/kernel/expr.hpp"
#include "rxo/kernel/relation.hpp"

#include <map>
#include <span>
#include <string>
#include <variant>
#include <vector>

namespace rxo::kernel {

struct RelationRef {
    std::string relation;
    std::vector<std::string> attributes;

    friend bool operator==(const RelationRef&, const RelationRef&) = default;
};

/// Every combination of `local` values without NULL must appear in at least
/// one of the targets.
struct ForeignKey {
    std::vector<std::string> attributes;
    std::vector<RelationRef> targets;
    std::string label;

    friend bool operator==(const ForeignKey&, const ForeignKey&) = default;
};

/// Uniqueness across several relations at once: the NULL-free value
/// combinations drawn from all members must be pairwise distinct.
struct SharedKey {
    std::vector<RelationRef> members;
    std::string label;

    friend bool operator==(const SharedKey&, const SharedKey&) = default;
};

struct StoredRelation {
    std::string name;
    Relation relation;
    std::vector<ForeignKey> foreign_keys;
};

struct Insert {
    std::string relation;
    std::vector<Tuple> tuples;
};

struct Delete {
    std::string relation;
    ExprPtr predicate;
};

struct Update {
    std::string relation;
    ExprPtr predicate;
    std::vector<std::pair<std::string, ExprPtr>> assignments;
};

using Mutation = std::variant<Insert, Delete, Update>;

/// Named relations plus the constraints binding them.
class RelationStore {
public:
    void create(StoredRelation rel);
    void drop(const std::string& name);
    void replace(StoredRelation rel);

    bool contains(const std::string& name) const { return relations_.count(name) > 0; }
    const StoredRelation& at(const std::string& name) const;
    StoredRelation& at(const std::string& name);
    const std::map<std::string, StoredRelation>& relations() const noexcept { return relations_; }

    const std::vector<SharedKey>& shared_keys() const noexcept { return shared_keys_; }
    void set_shared_keys(std::vector<SharedKey> keys) { shared_keys_ = std::move(keys); }

    /// Applies one mutation without checking constraints. Returns the number
    /// of tuples inserted, deleted or changed.
    std::size_t apply_unchecked(const Mutation& m);

    /// Full constraint re-scan. Each entry carries KeyViolation or
    /// ForeignKeyViolation.
    std::vector<Error> violations() const;

    /// Throws the first violation, if any.
    void check() const;

private:
    std::map<std::string, StoredRelation> relations_;
    std::vector<SharedKey> shared_keys_;
};

/// Returns the post-state of one mutation. On any error the input is left
/// as it was.
RelationStore apply_mutation(const RelationStore& store, const Mutation& m);

/// Applies a statement's mutations in order and checks constraints once at
/// the end. All or nothing: `store` is only modified on success.
std::size_t apply_mutations(RelationStore& store, std::span<const Mutation> ms);

} // namespace rxo::kernel
