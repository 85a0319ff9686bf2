#include "rxo/syntax/lexer.hpp"

#include "rxo/kernel/value.hpp"

#include <algorithm>
#include <array>
#include <cctype>

namespace rxo::syntax {

namespace {

constexpr std::array reserved = {
    "AND",    "ALTER",   "AS",      "BEGIN", "BOOLEAN", "BY",     "CLASS",  "CREATE",  "DATETIME", "DECLARE",
    "DELETE", "DESTROY", "DO",      "ELSE",  "END",     "EXEC",   "EXTEND", "FALSE",   "FLOAT",    "FOR",
    "FROM",   "GROUP",   "IF",      "INSERT", "INTEGER", "INTO",  "IS",     "KEY",     "LOOP",     "NEW",
    "NOT",    "NULL",    "OF",      "ON",    "OR",      "REALIZE", "REFERENCE", "REPEAT", "RETURN", "SELECT",
    "SET",    "STORED",  "STRING",  "THEN",  "TRUE",    "UPDATE", "VALUES", "WHERE",   "WHILE",    "WITH",
};

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return c >= '0' && c <= '9'; }

class Lexer {
public:
    explicit Lexer(std::string_view src) : src_(src) {}

    std::vector<Token> run() {
        std::vector<Token> out;
        while (true) {
            std::string trivia = skip_trivia();
            if (at_end()) {
                if (!out.empty()) out.back().trailing = std::move(trivia);
                return out;
            }
            Token t = next();
            t.leading = std::move(trivia);
            out.push_back(std::move(t));
        }
    }

private:
    bool at_end() const { return i_ >= src_.size(); }
    char peek(std::size_t ahead = 0) const { return i_ + ahead < src_.size() ? src_[i_ + ahead] : '\0'; }

    void advance(std::size_t n = 1) {
        for (std::size_t k = 0; k < n && i_ < src_.size(); ++k) {
            if (src_[i_] == '\n') {
                ++line_;
                col_ = 1;
            } else if ((static_cast<unsigned char>(src_[i_]) & 0xC0) != 0x80) {
                ++col_;
            }
            ++i_;
        }
    }

    std::string skip_trivia() {
        std::size_t start = i_;
        while (!at_end()) {
            char c = peek();
            if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
                advance();
            } else if (c == '/' && peek(1) == '/') {
                while (!at_end() && peek() != '\n') advance();
            } else {
                break;
            }
        }
        return std::string(src_.substr(start, i_ - start));
    }

    [[noreturn]] void error(const std::string& msg, SourcePos pos) const { throw Error(ErrorCode::LexError, msg, pos); }

    Token make(TokenKind kind, std::size_t start, SourcePos pos) const {
        return Token{kind, std::string(src_.substr(start, i_ - start)), pos, {}, {}};
    }

    Token next() {
        const std::size_t start = i_;
        const SourcePos pos{line_, col_};
        char c = peek();
        if (ident_start(c)) {
            while (ident_char(peek())) advance();
            Token t = make(TokenKind::Identifier, start, pos);
            if (is_reserved_word(t.text)) t.kind = TokenKind::Keyword;
            return t;
        }
        if (digit(c)) return number(start, pos);
        if (c == '"' || c == '\'') return string(start, pos);
        if (c == '.') {
            advance();
            return make(TokenKind::PathDot, start, pos);
        }
        if (c == '#') {
            advance();
            return make(TokenKind::AliasSigil, start, pos);
        }
        static constexpr std::array two = {":=", "<>", "!=", "<=", ">="};
        for (const char* p : two) {
            if (c == p[0] && peek(1) == p[1]) {
                advance(2);
                return make(TokenKind::Punct, start, pos);
            }
        }
        if (std::string_view("()[],;=<>+-*/").find(c) != std::string_view::npos) {
            advance();
            return make(TokenKind::Punct, start, pos);
        }
        error(std::string("illegal character '") + c + "'", pos);
    }

    Token number(std::size_t start, SourcePos pos) {
        // A bare ISO-8601 UTC timestamp lexes as a datetime literal.
        if (src_.size() - i_ >= 20 && parse_datetime(src_.substr(i_, 20)) && !ident_char(peek(20))) {
            advance(20);
            return make(TokenKind::DateTime, start, pos);
        }
        while (digit(peek())) advance();
        TokenKind kind = TokenKind::Integer;
        if (peek() == '.' && digit(peek(1))) {
            kind = TokenKind::Float;
            advance();
            while (digit(peek())) advance();
        }
        if ((peek() == 'e' || peek() == 'E') &&
            (digit(peek(1)) || ((peek(1) == '+' || peek(1) == '-') && digit(peek(2))))) {
            kind = TokenKind::Float;
            advance(2);
            while (digit(peek())) advance();
        }
        if (ident_char(peek())) error("malformed number", pos);
        Token t = make(kind, start, pos);
        if (kind == TokenKind::Integer && !parse_integer(t.text)) error("integer literal out of range", pos);
        if (kind == TokenKind::Float && !parse_float(t.text)) error("malformed float literal", pos);
        return t;
    }

    Token string(std::size_t start, SourcePos pos) {
        const char q = peek();
        advance();
        while (true) {
            if (at_end()) error("unterminated string literal", pos);
            char c = peek();
            if (c == '\\') {
                char e = peek(1);
                if (std::string_view("nt\\\"'r").find(e) == std::string_view::npos || e == '\0') {
                    error("invalid escape in string literal", SourcePos{line_, col_});
                }
                advance(2);
                continue;
            }
            advance();
            if (c == q) break;
        }
        return make(TokenKind::String, start, pos);
    }

    std::string_view src_;
    std::size_t i_ = 0;
    int line_ = 1;
    int col_ = 1;
};

} // namespace

std::string_view to_string(TokenKind kind) {
    switch (kind) {
    case TokenKind::Identifier: return "identifier";
    case TokenKind::Keyword: return "keyword";
    case TokenKind::String: return "string";
    case TokenKind::Integer: return "integer";
    case TokenKind::Float: return "float";
    case TokenKind::DateTime: return "datetime";
    case TokenKind::Punct: return "punctuation";
    case TokenKind::PathDot: return "'.'";
    case TokenKind::AliasSigil: return "'#'";
    }
    return "?";
}

std::string Token::keyword() const { return kind == TokenKind::Keyword ? upper(text) : std::string(); }

bool is_reserved_word(std::string_view word) {
    std::string u = upper(word);
    return std::find(reserved.begin(), reserved.end(), u) != reserved.end();
}

std::vector<Token> tokenize(std::string_view source) { return Lexer(source).run(); }

std::string unquote(const Token& t) {
    std::string out;
    for (std::size_t i = 1; i + 1 < t.text.size(); ++i) {
        char c = t.text[i];
        if (c != '\\') {
            out += c;
            continue;
        }
        char e = t.text[++i];
        switch (e) {
        case 'n': out += '\n'; break;
        case 't': out += '\t'; break;
        case 'r': out += '\r'; break;
        default: out += e; break;
        }
    }
    return out;
}

std::string quote(std::string_view s) {
    std::string out = "\"";
    for (char c : s) {
        switch (c) {
        case '\n': out += "\\n"; break;
        case '\t': out += "\\t"; break;
        case '\r': out += "\\r"; break;
        case '\\': out += "\\\\"; break;
        case '"': out += "\\\""; break;
        default: out += c; break;
        }
    }
    return out + "\"";
}

} // namespace rxo::syntax
