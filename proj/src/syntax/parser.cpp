#include "rxo/syntax/parser.hpp"

#include <algorithm>
#include <cctype>

namespace rxo::syntax {

namespace {

std::string upper(std::string_view s) {
    std::string out(s);
    for (auto& c : out) c = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    return out;
}

std::optional<kernel::AggregateFn> aggregate_name(const std::string& text) {
    std::string u = upper(text);
    if (u == "SUM") return kernel::AggregateFn::Sum;
    if (u == "COUNT") return kernel::AggregateFn::Count;
    if (u == "MIN") return kernel::AggregateFn::Min;
    if (u == "MAX") return kernel::AggregateFn::Max;
    if (u == "AVG") return kernel::AggregateFn::Avg;
    return std::nullopt;
}

ExprPtr make(Expr::Literal n, SourcePos pos) { return std::make_shared<Expr>(Expr{std::move(n), pos}); }

template <typename Node>
ExprPtr make_expr(Node n, SourcePos pos) {
    return std::make_shared<Expr>(Expr{std::move(n), pos});
}

} // namespace

const Token* Parser::peek(std::size_t ahead) const {
    return i_ + ahead < tokens_.size() ? &tokens_[i_ + ahead] : nullptr;
}

const Token& Parser::advance() { return tokens_[i_++]; }

SourcePos Parser::here() const {
    if (auto t = peek()) return t->pos;
    if (tokens_.empty()) return {};
    SourcePos p = tokens_.back().pos;
    p.column += static_cast<int>(tokens_.back().text.size());
    return p;
}

bool Parser::accept_keyword(std::string_view kw) {
    if (auto t = peek(); t && t->is_keyword(kw)) {
        ++i_;
        return true;
    }
    return false;
}

bool Parser::accept_punct(std::string_view p) {
    if (auto t = peek(); t && t->is_punct(p)) {
        ++i_;
        return true;
    }
    return false;
}

void Parser::error(const std::string& expected) const {
    std::string found = peek() ? "'" + peek()->text + "'" : "end of input";
    throw Error(ErrorCode::ParseError, "expected " + expected + ", found " + found, here());
}

void Parser::expect_keyword(std::string_view kw) {
    if (!accept_keyword(kw)) error(std::string(kw));
}

void Parser::expect_punct(std::string_view p) {
    if (!accept_punct(p)) error("'" + std::string(p) + "'");
}

std::string Parser::expect_identifier(std::string_view what) {
    auto t = peek();
    if (!t || t->kind != TokenKind::Identifier) error(std::string(what));
    return advance().text;
}

void Parser::terminator() { expect_punct(";"); }

Statement Parser::next_statement() {
    auto t = peek();
    if (!t) error("a statement");
    SourcePos pos = t->pos;
    Statement st;
    if (t->is_keyword("CREATE")) {
        st = create_class();
    } else if (t->is_keyword("ALTER")) {
        st = alter();
    } else if (t->is_keyword("NEW")) {
        st.node = new_object();
        terminator();
    } else if (t->is_keyword("DESTROY")) {
        st = destroy();
    } else if (t->is_keyword("SELECT")) {
        st.node = select();
        terminator();
    } else if (t->is_keyword("EXEC")) {
        st = exec();
    } else if (t->is_keyword("INSERT")) {
        st = insert();
    } else if (t->is_keyword("DELETE")) {
        st = remove();
    } else if (t->is_keyword("UPDATE")) {
        st = update();
    } else {
        error("one of CREATE, ALTER, NEW, DESTROY, SELECT, EXEC, INSERT, DELETE, UPDATE");
    }
    st.pos = pos;
    return st;
}

Kind Parser::type_name() {
    auto t = peek();
    if (t && t->kind == TokenKind::Keyword) {
        if (auto k = parse_kind(t->keyword()); k && k->type != ScalarType::Ref) {
            ++i_;
            return *k;
        }
    }
    if (t && t->kind == TokenKind::Identifier) return Kind::ref(advance().text);
    error("a type (STRING, INTEGER, FLOAT, DATETIME, BOOLEAN or a class name)");
}

std::vector<Param> Parser::params() {
    std::vector<Param> out;
    expect_punct("(");
    if (accept_punct(")")) return out;
    do {
        Param p;
        p.name = expect_identifier("a parameter name");
        p.kind = type_name();
        out.push_back(std::move(p));
    } while (accept_punct(","));
    expect_punct(")");
    return out;
}

std::vector<std::string> Parser::name_list() {
    std::vector<std::string> out;
    expect_punct("(");
    do {
        if (auto t = peek(); t && t->kind == TokenKind::PathDot) ++i_;
        out.push_back(expect_identifier("an attribute name"));
    } while (accept_punct(","));
    expect_punct(")");
    return out;
}

MemberDecl Parser::member() {
    MemberDecl m;
    m.pos = here();
    m.name = expect_identifier("a member name");
    auto t = peek();
    if (t && t->is_keyword("SET")) {
        ++i_;
        expect_keyword("OF");
        m.form = MemberDecl::Form::SetOf;
        m.members = member_list();
        if (accept_keyword("KEY")) m.key = name_list();
        return m;
    }
    if (t && t->is_punct("(")) {
        m.form = MemberDecl::Form::Method;
        m.params = params();
        auto r = peek();
        if (r && (r->kind == TokenKind::Identifier || (r->kind == TokenKind::Keyword && parse_kind(r->keyword())))) {
            m.returns = type_name();
        }
        return m;
    }
    Kind k = type_name();
    if (k.type == ScalarType::Ref) {
        m.form = MemberDecl::Form::Reference;
        m.target = k.ref_class;
    } else {
        m.form = MemberDecl::Form::Scalar;
        m.scalar = k.type;
    }
    return m;
}

// Members are separated by ',' or ';' (both occur in class bodies).
std::vector<MemberDecl> Parser::member_list() {
    std::vector<MemberDecl> out;
    expect_punct("(");
    if (accept_punct(")")) return out;
    while (true) {
        out.push_back(member());
        if (accept_punct(",") || accept_punct(";")) {
            if (accept_punct(")")) break;
            continue;
        }
        expect_punct(")");
        break;
    }
    return out;
}

Statement Parser::create_class() {
    expect_keyword("CREATE");
    expect_keyword("CLASS");
    CreateClass c;
    c.name = expect_identifier("a class name");
    if (accept_keyword("EXTEND")) {
        do {
            c.parents.push_back(expect_identifier("a parent class name"));
        } while (accept_punct(","));
    }
    c.members = member_list();
    if (accept_keyword("KEY")) c.key = name_list();
    while (auto t = peek()) {
        if (!t->is_keyword("REFERENCE")) break;
        ++i_;
        ReferenceClause r;
        r.pos = here();
        r.component = expect_identifier("a component name");
        r.attributes = name_list();
        expect_keyword("ON");
        r.target_class = expect_identifier("a class name");
        r.target_attributes = name_list();
        c.references.push_back(std::move(r));
    }
    terminator();
    return Statement{std::move(c), {}};
}

Statement Parser::alter() {
    expect_keyword("ALTER");
    AlterRealize a;
    a.class_name = expect_identifier("a class name");
    expect_keyword("REALIZE");
    do {
        RealizeTarget t;
        t.pos = here();
        t.member = expect_identifier("a member name");
        if (auto p = peek(); p && p->is_punct("(")) t.params = params();
        a.targets.push_back(std::move(t));
    } while (accept_punct(","));
    expect_keyword("AS");
    ++body_depth_;
    if (accept_keyword("STORED")) {
        a.body = RealizationBody::Stored;
        terminator();
    } else if (auto t = peek(); t && t->is_keyword("SELECT")) {
        a.body = RealizationBody::Query;
        a.query = std::make_shared<const Select>(select());
        terminator();
    } else if (t && t->is_keyword("BEGIN")) {
        a.body = RealizationBody::Procedure;
        a.procedure = std::make_shared<const Block>(block());
        accept_punct(";");
    } else {
        error("STORED, SELECT or BEGIN");
    }
    --body_depth_;
    return Statement{std::move(a), {}};
}

Block Parser::block() {
    expect_keyword("BEGIN");
    Block out;
    while (true) {
        auto t = peek();
        if (!t) error("END");
        if (t->is_keyword("END")) {
            ++i_;
            break;
        }
        out.push_back(proc_statement());
    }
    return out;
}

Block Parser::branch() {
    if (auto t = peek(); t && t->is_keyword("BEGIN")) {
        Block b = block();
        accept_punct(";");
        return b;
    }
    Block b;
    b.push_back(proc_statement());
    return b;
}

ProcStmt Parser::proc_statement() {
    auto t = peek();
    if (!t) error("a procedure statement");
    SourcePos pos = t->pos;
    if (t->is_keyword("WHILE") || t->is_keyword("FOR") || t->is_keyword("LOOP") || t->is_keyword("REPEAT") ||
        t->is_keyword("DO")) {
        throw Error(ErrorCode::ParseError, "loops are not supported in procedure bodies", pos);
    }
    if (accept_keyword("DECLARE")) {
        ProcStmt::Declare d;
        d.name = expect_identifier("a variable name");
        d.kind = type_name();
        terminator();
        return {std::move(d), pos};
    }
    if (accept_keyword("IF")) {
        ProcStmt::If f;
        f.condition = expression();
        expect_keyword("THEN");
        f.then_branch = branch();
        if (accept_keyword("ELSE")) {
            f.has_else = true;
            f.else_branch = branch();
        }
        return {std::move(f), pos};
    }
    if (accept_keyword("RETURN")) {
        ProcStmt::Return r;
        if (auto n = peek(); n && !n->is_punct(";")) r.value = expression();
        terminator();
        return {std::move(r), pos};
    }
    if (t->kind == TokenKind::Identifier || t->kind == TokenKind::PathDot) {
        ProcStmt::Assign a;
        a.target = path();
        if (a.target.has_predicates()) throw Error(ErrorCode::ParseError, "assignment target cannot select", pos);
        expect_punct(":=");
        a.value = expression();
        terminator();
        return {std::move(a), pos};
    }
    error("DECLARE, IF, RETURN or an assignment");
}

Initializer Parser::initializer() {
    Initializer init;
    init.target = path();
    if (init.target.root == PathRoot::Alias || init.target.has_predicates()) {
        throw Error(ErrorCode::ParseError, "invalid assignment target", init.target.pos);
    }
    expect_punct(":=");
    init.value = expression();
    return init;
}

NewObject Parser::new_object() {
    NewObject n;
    n.pos = here();
    expect_keyword("NEW");
    n.class_name = expect_identifier("a class name");
    if (accept_keyword("WITH")) {
        expect_keyword("SET");
        do {
            n.initializers.push_back(initializer());
        } while (accept_punct(","));
    }
    return n;
}

Statement Parser::destroy() {
    expect_keyword("DESTROY");
    Destroy d{path()};
    terminator();
    return {std::move(d), {}};
}

Select Parser::select() {
    Select s;
    s.pos = here();
    expect_keyword("SELECT");
    do {
        SelectItem item;
        item.expr = expression();
        if (accept_keyword("AS")) item.alias = expect_identifier("an output name");
        s.items.push_back(std::move(item));
    } while (accept_punct(","));
    expect_keyword("FROM");
    s.from = path();
    if (s.from.root != PathRoot::Bare) throw Error(ErrorCode::ParseError, "FROM needs a relation name", s.from.pos);
    if (auto t = peek(); t && t->kind == TokenKind::AliasSigil) {
        if (body_depth_ == 0) {
            throw Error(ErrorCode::ParseError, "'#' aliases are only allowed inside realization bodies", t->pos);
        }
        ++i_;
        s.from_alias = expect_identifier("an alias name");
    }
    if (accept_keyword("WHERE")) s.where = expression();
    if (accept_keyword("GROUP")) {
        expect_keyword("BY");
        do {
            s.group_by.push_back(expression());
        } while (accept_punct(","));
    }
    return s;
}

Statement Parser::exec() {
    expect_keyword("EXEC");
    Path target = path_impl(true);
    auto t = peek();
    if (!t || t->kind != TokenKind::PathDot) error("'.' followed by a method call");
    ++i_;
    Exec e;
    e.target = std::move(target);
    e.method = expect_identifier("a method name");
    expect_punct("(");
    if (!accept_punct(")")) {
        do {
            e.args.push_back(expression());
        } while (accept_punct(","));
        expect_punct(")");
    }
    terminator();
    return {std::move(e), {}};
}

Statement Parser::insert() {
    expect_keyword("INSERT");
    expect_keyword("INTO");
    InsertRows ins;
    ins.target = path();
    expect_keyword("VALUES");
    do {
        expect_punct("(");
        std::vector<ExprPtr> row;
        do {
            row.push_back(expression());
        } while (accept_punct(","));
        expect_punct(")");
        ins.rows.push_back(std::move(row));
    } while (accept_punct(","));
    terminator();
    return {std::move(ins), {}};
}

Statement Parser::remove() {
    expect_keyword("DELETE");
    expect_keyword("FROM");
    DeleteRows d;
    d.target = path();
    if (accept_keyword("WHERE")) d.where = expression();
    terminator();
    return {std::move(d), {}};
}

Statement Parser::update() {
    expect_keyword("UPDATE");
    UpdateObjects u;
    u.target = path();
    expect_keyword("SET");
    do {
        u.assignments.push_back(initializer());
    } while (accept_punct(","));
    terminator();
    return {std::move(u), {}};
}

Path Parser::path() { return path_impl(false); }

Segment Parser::segment() {
    Segment s;
    s.pos = here();
    auto t = peek();
    if (t && t->kind == TokenKind::AliasSigil) {
        ++i_;
        s.name = "#";
    } else {
        s.name = expect_identifier("a component name");
    }
    if (accept_punct("[")) {
        s.predicate = expression();
        expect_punct("]");
    }
    return s;
}

Path Parser::path_impl(bool stop_at_call) {
    Path p;
    p.pos = here();
    auto t = peek();
    if (!t) error("a path");
    if (t->kind == TokenKind::PathDot) {
        ++i_;
        p.root = PathRoot::Dot;
        p.segments.push_back(segment());
    } else if (t->kind == TokenKind::AliasSigil) {
        if (body_depth_ == 0) {
            throw Error(ErrorCode::ParseError, "'#' aliases are only allowed inside realization bodies", t->pos);
        }
        ++i_;
        p.root = PathRoot::Alias;
        p.alias = expect_identifier("an alias name");
        auto d = peek();
        if (!d || d->kind != TokenKind::PathDot) error("'.' after alias");
    } else {
        p.segments.push_back(segment());
    }
    while (auto d = peek()) {
        if (d->kind != TokenKind::PathDot) break;
        if (stop_at_call) {
            const Token* name = peek(1);
            const Token* open = peek(2);
            if (name && name->kind == TokenKind::Identifier && open && open->is_punct("(")) break;
        }
        ++i_;
        p.segments.push_back(segment());
    }
    return p;
}

ExprPtr Parser::expression() { return disjunction(); }

ExprPtr Parser::disjunction() {
    ExprPtr lhs = conjunction();
    while (auto t = peek()) {
        if (!t->is_keyword("OR")) break;
        SourcePos pos = advance().pos;
        lhs = make_expr(Expr::Binary{BinaryOp::Or, lhs, conjunction()}, pos);
    }
    return lhs;
}

ExprPtr Parser::conjunction() {
    ExprPtr lhs = negation();
    while (auto t = peek()) {
        if (!t->is_keyword("AND")) break;
        SourcePos pos = advance().pos;
        lhs = make_expr(Expr::Binary{BinaryOp::And, lhs, negation()}, pos);
    }
    return lhs;
}

ExprPtr Parser::negation() {
    if (auto t = peek(); t && t->is_keyword("NOT")) {
        SourcePos pos = advance().pos;
        return make_expr(Expr::Unary{UnaryOp::Not, negation()}, pos);
    }
    return comparison();
}

ExprPtr Parser::comparison() {
    ExprPtr lhs = additive();
    while (auto t = peek()) {
        SourcePos pos = t->pos;
        if (t->is_keyword("IS")) {
            ++i_;
            bool negated = accept_keyword("NOT");
            expect_keyword("NULL");
            lhs = make_expr(Expr::IsNull{lhs, negated}, pos);
            continue;
        }
        if (t->kind != TokenKind::Punct) break;
        std::optional<BinaryOp> op;
        if (t->text == "=") op = BinaryOp::Eq;
        else if (t->text == "<>" || t->text == "!=") op = BinaryOp::Ne;
        else if (t->text == "<") op = BinaryOp::Lt;
        else if (t->text == "<=") op = BinaryOp::Le;
        else if (t->text == ">") op = BinaryOp::Gt;
        else if (t->text == ">=") op = BinaryOp::Ge;
        if (!op) break;
        ++i_;
        lhs = make_expr(Expr::Binary{*op, lhs, additive()}, pos);
    }
    return lhs;
}

ExprPtr Parser::additive() {
    ExprPtr lhs = multiplicative();
    while (auto t = peek()) {
        if (!t->is_punct("+") && !t->is_punct("-")) break;
        BinaryOp op = t->text == "+" ? BinaryOp::Add : BinaryOp::Sub;
        SourcePos pos = advance().pos;
        lhs = make_expr(Expr::Binary{op, lhs, multiplicative()}, pos);
    }
    return lhs;
}

ExprPtr Parser::multiplicative() {
    ExprPtr lhs = unary();
    while (auto t = peek()) {
        if (!t->is_punct("*") && !t->is_punct("/")) break;
        BinaryOp op = t->text == "*" ? BinaryOp::Mul : BinaryOp::Div;
        SourcePos pos = advance().pos;
        lhs = make_expr(Expr::Binary{op, lhs, unary()}, pos);
    }
    return lhs;
}

ExprPtr Parser::unary() {
    if (auto t = peek(); t && t->is_punct("-")) {
        SourcePos pos = advance().pos;
        return make_expr(Expr::Unary{UnaryOp::Neg, unary()}, pos);
    }
    return primary();
}

ExprPtr Parser::primary() {
    auto t = peek();
    if (!t) error("an expression");
    SourcePos pos = t->pos;
    switch (t->kind) {
    case TokenKind::String: return make(Expr::Literal{unquote(advance())}, pos);
    case TokenKind::Integer: {
        auto v = parse_integer(t->text);
        if (!v) throw Error(ErrorCode::LexError, "integer literal out of range: " + t->text, pos);
        ++i_;
        return make(Expr::Literal{*v}, pos);
    }
    case TokenKind::Float: {
        auto v = parse_float(t->text);
        if (!v) throw Error(ErrorCode::LexError, "invalid float literal: " + t->text, pos);
        ++i_;
        return make(Expr::Literal{*v}, pos);
    }
    case TokenKind::DateTime: {
        auto v = parse_datetime(t->text);
        if (!v) throw Error(ErrorCode::LexError, "invalid datetime literal: " + t->text, pos);
        ++i_;
        return make(Expr::Literal{*v}, pos);
    }
    default: break;
    }
    if (accept_keyword("TRUE")) return make(Expr::Literal{true}, pos);
    if (accept_keyword("FALSE")) return make(Expr::Literal{false}, pos);
    if (accept_keyword("NULL")) return make(Expr::Literal{Null{}}, pos);
    if (t->is_keyword("SELECT")) {
        return make_expr(Expr::Subquery{std::make_shared<const Select>(select())}, pos);
    }
    if (t->is_punct("(")) {
        ++i_;
        ExprPtr inner;
        if (auto n = peek(); n && n->is_keyword("NEW")) {
            inner = make_expr(Expr::New{std::make_shared<const NewObject>(new_object())}, pos);
        } else {
            inner = expression();
        }
        expect_punct(")");
        return inner;
    }
    if (t->kind == TokenKind::Identifier) {
        const Token* open = peek(1);
        if (auto fn = aggregate_name(t->text); fn && open && open->is_punct("(")) {
            i_ += 2;
            Expr::Aggregate agg{*fn, nullptr};
            if (!accept_punct("*")) agg.argument = expression();
            else if (*fn != kernel::AggregateFn::Count) error("an aggregate argument");
            expect_punct(")");
            return make_expr(std::move(agg), pos);
        }
    }
    if (t->kind == TokenKind::Identifier || t->kind == TokenKind::PathDot || t->kind == TokenKind::AliasSigil) {
        return make_expr(Expr::PathRef{path()}, pos);
    }
    error("an expression");
}

Statement parse_statement(std::span<const Token> tokens) {
    Parser p(tokens);
    Statement st = p.next_statement();
    if (!p.at_end()) {
        throw Error(ErrorCode::ParseError, "unexpected '" + tokens[p.position()].text + "' after statement",
                    tokens[p.position()].pos);
    }
    return st;
}

Statement parse_statement(std::string_view source) {
    auto tokens = tokenize(source);
    return parse_statement(tokens);
}

std::vector<Statement> parse_script(std::string_view source) {
    auto tokens = tokenize(source);
    Parser p(tokens);
    std::vector<Statement> out;
    while (!p.at_end()) out.push_back(p.next_statement());
    return out;
}

Path parse_path(std::string_view text) {
    auto tokens = tokenize(text);
    Parser p(tokens);
    Path path = p.path();
    if (!p.at_end()) {
        throw Error(ErrorCode::ParseError, "unexpected '" + tokens[p.position()].text + "' after path",
                    tokens[p.position()].pos);
    }
    return path;
}

ExprPtr parse_expression(std::string_view text) {
    auto tokens = tokenize(text);
    Parser p(tokens);
    ExprPtr e = p.expression();
    if (!p.at_end()) {
        throw Error(ErrorCode::ParseError, "unexpected '" + tokens[p.position()].text + "' after expression",
                    tokens[p.position()].pos);
    }
    return e;
}

} // namespace rxo::syntax
