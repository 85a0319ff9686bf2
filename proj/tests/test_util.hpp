#pragma once

#include "rxo/query/query.hpp"
#include "rxo/runtime/runtime.hpp"
#include "rxo/schema/schema.hpp"
#include "rxo/syntax/parser.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

namespace rxo::kernel {

// Readable relations in test failure messages.
inline void PrintTo(const Relation& r, std::ostream* os) {
    *os << "{";
    for (std::size_t i = 0; i < r.header().size(); ++i) *os << (i ? ", " : "") << r.header()[i].name << " " << to_string(r.header()[i].kind);
    *os << " |";
    for (const auto& t : r.canonical_rows()) *os << " " << format_tuple(t);
    *os << "}";
}

} // namespace rxo::kernel

namespace rxo::test {

inline std::string read_data(const std::string& name) {
    std::ifstream in(std::string(RXO_TEST_DATA_DIR) + "/" + name, std::ios::binary);
    if (!in) throw std::runtime_error("missing test data " + name);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

inline void run(Database& db, const std::string& source) {
    for (const auto& st : syntax::parse_script(source)) runtime::execute(db, st);
}

inline Database script(const std::string& source) {
    Database db;
    run(db, source);
    return db;
}

inline Database d0() {
    static const Database fixture = script(read_data("d0.rxo"));
    return fixture;
}

/// The schema of D0 without any objects.
inline Database ddl() {
    static const Database empty = [] {
        std::string src = read_data("d0.rxo");
        return script(src.substr(0, src.find("NEW CONTRACTORS")));
    }();
    return empty;
}

inline kernel::Relation select(const Database& db, const std::string& text) {
    auto st = syntax::parse_statement(text);
    return query::evaluate_select(db, std::get<syntax::Select>(st.node));
}

inline kernel::Relation stored(const Database& db, const std::string& relation) {
    return db.store.at(relation).relation;
}

/// OID of the object of exact class `cls` whose stored `attr` equals `value`.
inline Oid oid_of(const Database& db, const std::string& cls, const std::string& attr, const Value& value) {
    const auto& rel = db.store.at(schema::root_relation(cls)).relation;
    const auto i = rel.header().index_of(attr);
    for (const auto& t : rel) {
        if (values_equal(t[i], value)) return std::get<Oid>(t[0]);
    }
    throw std::runtime_error("no " + cls + " with " + attr + " = " + display(value));
}

inline kernel::Relation relation(const std::vector<kernel::Attribute>& attrs, const std::vector<Tuple>& rows) {
    kernel::Relation r{kernel::Header(attrs)};
    for (const auto& t : rows) r.insert(t);
    return r;
}

inline syntax::Path path(const std::string& text) { return syntax::parse_path(text); }
inline syntax::ExprPtr expr(const std::string& text) { return syntax::parse_expression(text); }

} // namespace rxo::test
