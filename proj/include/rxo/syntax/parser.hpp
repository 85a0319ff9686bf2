#pragma once

#include "rxo/syntax/ast.hpp"
#include "rxo/syntax/lexer.hpp"

#include <span>
#include <string_view>
#include <vector>

namespace rxo::syntax {

/// Incremental statement reader over an already tokenized script.
class Parser {
public:
    explicit Parser(std::span<const Token> tokens) : tokens_(tokens) {}

    bool at_end() const { return i_ >= tokens_.size(); }
    Statement next_statement();

    Path path();
    ExprPtr expression();
    std::span<const Token> tokens() const { return tokens_; }
    std::size_t position() const { return i_; }

private:
    friend struct ParserAccess;

    const Token* peek(std::size_t ahead = 0) const;
    const Token& advance();
    SourcePos here() const;
    bool accept_keyword(std::string_view kw);
    bool accept_punct(std::string_view p);
    void expect_keyword(std::string_view kw);
    void expect_punct(std::string_view p);
    std::string expect_identifier(std::string_view what);
    [[noreturn]] void error(const std::string& expected) const;

    Statement create_class();
    Statement alter();
    NewObject new_object();
    Statement destroy();
    Select select();
    Statement exec();
    Statement insert();
    Statement remove();
    Statement update();

    MemberDecl member();
    std::vector<MemberDecl> member_list();
    std::vector<std::string> name_list();
    std::vector<Param> params();
    Kind type_name();
    Initializer initializer();
    Block block();
    ProcStmt proc_statement();
    Block branch();
    void terminator();

    Path path_impl(bool stop_at_call);
    Segment segment();
    ExprPtr disjunction();
    ExprPtr conjunction();
    ExprPtr negation();
    ExprPtr comparison();
    ExprPtr additive();
    ExprPtr multiplicative();
    ExprPtr unary();
    ExprPtr primary();

    std::span<const Token> tokens_;
    std::size_t i_ = 0;
    int body_depth_ = 0;
};

/// Parses exactly one statement; anything after its terminator is an error.
Statement parse_statement(std::span<const Token> tokens);
Statement parse_statement(std::string_view source);

std::vector<Statement> parse_script(std::string_view source);

Path parse_path(std::string_view text);
ExprPtr parse_expression(std::string_view text);

} // namespace rxo::syntax
