#pragma once

#include "rxo/catalog/catalog.hpp"
#include "rxo/kernel/store.hpp"

#include <cstdint>

namespace rxo {

/// Catalog, stored relations and the OID counter: the whole persistent state.
struct Database {
    catalog::Catalog catalog;
    kernel::RelationStore store;
    std::uint64_t last_oid = 0;
};

} // namespace rxo
