#pragma once

#include "rxo/database.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace rxo::store {

inline constexpr std::string_view kMagic = "RXO-SNAPSHOT 1";

/// One tuple field: `\N` for NULL, `\t` `\n` `\\` escaped inside strings.
std::string encode_field(const Value& v);
Value decode_field(std::string_view text, const Kind& kind); // throws FormatError

/// Canonical snapshot text. Equal databases give byte-equal text.
std::string serialize(const Database& db);

/// Rebuilds a database from snapshot text. Constraints are checked once,
/// after all tuples are in.
Database deserialize(std::string_view text);

/// Writes through `<destination>.tmp` (created exclusively) and renames.
void save_snapshot(const Database& db, const std::filesystem::path& destination);
Database load_snapshot(const std::filesystem::path& source);

} // namespace rxo::store
