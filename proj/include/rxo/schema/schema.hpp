#pragma once

#include "rxo/database.hpp"

#include <string>
#include <vector>

namespace rxo::schema {

inline constexpr const char* kOid = "#oid";

std::string root_relation(const std::string& cls);
std::string child_relation(const std::string& cls, const std::string& member);

/// Relational layout implied by a catalog. Relations are empty.
struct StorageSchema {
    std::vector<kernel::StoredRelation> relations;
    std::vector<kernel::SharedKey> shared_keys;
    catalog::NameTable names;
};

/// Layout of one exact class: its root relation (if any) and one child
/// relation per stored set-of member.
std::vector<kernel::StoredRelation> derive_storage(const catalog::Catalog& cat, const std::string& cls,
                                                   catalog::ClassStorage* names = nullptr);

/// Layout of the whole catalog; a pure function of it.
StorageSchema derive_storage(const catalog::Catalog& cat);

/// Relation (and attribute, for scalars and references) holding a stored member.
catalog::NameEntry storage_for(const Database& db, const std::string& cls, const std::string& member);

/// Whether objects of the exact class can exist.
bool has_root(const Database& db, const std::string& cls);

/// Re-derives storage after a catalog change and carries data over.
/// Throws StoredDataLoss when a relation or attribute holding data would vanish.
void rebuild(Database& db);

} // namespace rxo::schema
