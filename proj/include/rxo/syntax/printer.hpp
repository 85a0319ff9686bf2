#pragma once

#include "rxo/syntax/ast.hpp"

#include <string>

namespace rxo::syntax {

// Canonical single-line source text; parsing it yields an equal tree.
std::string print(const Statement& st);
std::string print(const Expr& e);
std::string print(const Path& p);
std::string print(const Select& s);
std::string print(const Block& b);
std::string print_literal(const Value& v);

// Structural S-expression ignoring source positions.
std::string dump(const Statement& st);
std::string dump(const Expr& e);

} // namespace rxo::syntax
