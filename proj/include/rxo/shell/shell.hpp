#pragma once

#include "rxo/database.hpp"
#include "rxo/syntax/ast.hpp"

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace rxo::shell {

enum class Format { Table, Tsv };

std::optional<Format> parse_format(std::string_view name);

/// Rows in canonical order. `Table` pads columns and ends with a row count;
/// `Tsv` uses the snapshot field encoding.
std::string format_relation(const kernel::Relation& rel, Format format);

/// Class names in definition order, one per line.
std::string list_classes(const Database& db);

struct Session {
    std::filesystem::path db_path; // empty: nothing is persisted
    Database db;
    bool autosave = true;
    Format format = Format::Table;
};

/// Loads `db_path` when it exists; otherwise starts empty.
Session open_session(std::filesystem::path db_path, bool autosave = true, Format format = Format::Table);

void save(Session& s);

/// Runs one statement and prints its result. Successful mutations are saved
/// when autosave is on.
void execute(Session& s, const syntax::Statement& st, std::ostream& out);

/// Executes statements in order, stopping at the first error. Returns 0 on
/// success and 1 after printing the error.
int run_source(Session& s, std::string_view source, std::ostream& out, std::ostream& err);

/// As run_source over a file; 2 when the file cannot be read.
int run_script(Session& s, const std::filesystem::path& script, std::ostream& out, std::ostream& err);

/// Reads statements until `\q` or end of input. Errors are printed and the
/// loop continues. Prompts are written only when `prompt` is set.
void repl(Session& s, std::istream& in, std::ostream& out, std::ostream& err, bool prompt = false);

} // namespace rxo::shell
