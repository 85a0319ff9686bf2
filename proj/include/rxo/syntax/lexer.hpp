#pragma once

#include "rxo/error.hpp"

#include <string>
#include <string_view>
#include <vector>

namespace rxo::syntax {

enum class TokenKind {
    Identifier,
    Keyword,
    String,
    Integer,
    Float,
    DateTime,
    Punct,
    PathDot,
    AliasSigil,
};

std::string_view to_string(TokenKind kind);

struct Token {
    TokenKind kind;
    std::string text;     // exact source slice
    SourcePos pos;
    std::string leading;  // whitespace and comments before the token
    std::string trailing; // only set on the last token: trivia up to end of input

    /// Keyword text upper-cased; empty for other kinds.
    std::string keyword() const;
    bool is_keyword(std::string_view upper) const { return kind == TokenKind::Keyword && keyword() == upper; }
    bool is_punct(std::string_view p) const { return kind == TokenKind::Punct && text == p; }
};

bool is_reserved_word(std::string_view word);

/// Splits source text into tokens. `//` comments run to end of line and are
/// kept as trivia. Concatenating leading + text (+ trailing) of every token
/// reproduces the source.
std::vector<Token> tokenize(std::string_view source);

/// Decodes the body of a string literal token (quotes and escapes).
std::string unquote(const Token& t);

/// Encodes a string as a double-quoted literal.
std::string quote(std::string_view s);

} // namespace rxo::syntax
