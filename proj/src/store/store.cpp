#include "rxo/store/store.hpp"

#include "rxo/runtime/runtime.hpp"
#include "rxo/schema/schema.hpp"
#include "rxo/syntax/parser.hpp"
#include "rxo/syntax/printer.hpp"

#include <charconv>
#include <set>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <system_error>

namespace rxo::store {

namespace {

[[noreturn]] void bad(std::size_t line, const std::string& msg) {
    throw Error(ErrorCode::FormatError, msg, SourcePos{static_cast<int>(line), 1});
}

std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        auto at = s.find(sep, start);
        out.push_back(s.substr(start, at == std::string_view::npos ? std::string_view::npos : at - start));
        if (at == std::string_view::npos) return out;
        start = at + 1;
    }
}

bool parse_count(std::string_view s, std::uint64_t& out) {
    if (s.empty()) return false;
    auto res = std::from_chars(s.data(), s.data() + s.size(), out);
    return res.ec == std::errc{} && res.ptr == s.data() + s.size();
}

class Lines {
public:
    explicit Lines(std::string_view text) {
        if (!text.empty() && text.back() == '\n') text.remove_suffix(1);
        if (!text.empty()) lines_ = split(text, '\n');
    }
    bool done() const { return next_ >= lines_.size(); }
    std::size_t number() const { return next_; } // 1-based number of the last line taken
    std::string_view take(const char* what) {
        if (done()) bad(lines_.size(), std::string("unexpected end of snapshot, expected ") + what);
        return lines_[next_++];
    }
    std::string_view peek() const { return lines_[next_]; }

private:
    std::vector<std::string_view> lines_;
    std::size_t next_ = 0;
};

} // namespace

std::string encode_field(const Value& v) {
    if (is_null(v)) return "\\N";
    if (const auto* s = std::get_if<std::string>(&v)) {
        std::string out;
        for (char c : *s) {
            switch (c) {
            case '\t': out += "\\t"; break;
            case '\n': out += "\\n"; break;
            case '\\': out += "\\\\"; break;
            default: out += c;
            }
        }
        return out;
    }
    if (const auto* b = std::get_if<bool>(&v)) return *b ? "TRUE" : "FALSE";
    return display(v);
}

Value decode_field(std::string_view text, const Kind& kind) {
    auto invalid = [&]() -> Value {
        fail(ErrorCode::FormatError, "bad " + to_string(kind) + " field '" + std::string(text) + "'");
    };
    if (text == "\\N") return Null{};
    switch (kind.type) {
    case ScalarType::String: {
        std::string out;
        for (std::size_t i = 0; i < text.size(); ++i) {
            if (text[i] != '\\') {
                out += text[i];
                continue;
            }
            if (++i == text.size()) return invalid();
            switch (text[i]) {
            case 't': out += '\t'; break;
            case 'n': out += '\n'; break;
            case '\\': out += '\\'; break;
            default: return invalid();
            }
        }
        return out;
    }
    case ScalarType::Integer:
        if (auto n = parse_integer(text)) return *n;
        return invalid();
    case ScalarType::Float:
        if (auto d = parse_float(text)) return *d;
        return invalid();
    case ScalarType::DateTime:
        if (auto ts = parse_datetime(text)) return *ts;
        return invalid();
    case ScalarType::Boolean:
        if (text == "TRUE") return true;
        if (text == "FALSE") return false;
        return invalid();
    case ScalarType::Ref: {
        std::uint64_t n = 0;
        if (!parse_count(text, n) || n == 0) return invalid();
        return Oid{n};
    }
    }
    return invalid();
}

std::string serialize(const Database& db) {
    std::string out(kMagic);
    out += "\n%CATALOG\n";
    for (const auto& st : db.catalog.ddl_log()) out += syntax::print(st) + "\n";
    out += "%DATA\n";
    for (const auto& [name, sr] : db.store.relations()) {
        const auto& rel = sr.relation;
        out += "RELATION " + name + " " + std::to_string(rel.size()) + "\n";
        std::string header;
        for (const auto& a : rel.header()) header += (header.empty() ? "" : "\t") + a.name;
        out += header + "\n";
        for (const auto& t : rel.canonical_rows()) {
            for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "\t" : "") + encode_field(t[i]);
            out += "\n";
        }
    }
    out += "%OID " + std::to_string(db.last_oid) + "\n";
    return out;
}

Database deserialize(std::string_view text) {
    Lines in(text);
    if (in.take("header") != kMagic) bad(1, "not an RxO snapshot (expected '" + std::string(kMagic) + "')");
    if (in.take("%CATALOG") != "%CATALOG") bad(in.number(), "expected %CATALOG");

    Database db;
    while (!in.done() && in.peek() != "%DATA") {
        std::string_view line = in.take("catalog statement");
        try {
            runtime::execute(db, syntax::parse_statement(line));
        } catch (const Error& e) {
            bad(in.number(), "catalog statement does not replay: " + e.describe());
        }
    }
    in.take("%DATA");

    std::set<std::string> seen;
    std::uint64_t max_oid = 0;
    while (!in.done() && !in.peek().starts_with("%OID")) {
        auto head = split(in.take("RELATION"), ' ');
        std::uint64_t count = 0;
        if (head.size() != 3 || head[0] != "RELATION" || !parse_count(head[2], count)) {
            bad(in.number(), "expected 'RELATION <name> <count>'");
        }
        const std::string name(head[1]);
        if (!db.store.contains(name)) bad(in.number(), "relation " + name + " is not part of the schema");
        if (!seen.insert(name).second) bad(in.number(), "relation " + name + " appears twice");
        auto& rel = db.store.at(name).relation;
        const auto& h = rel.header();

        std::string expected;
        for (const auto& a : h) expected += (expected.empty() ? "" : "\t") + a.name;
        if (in.take("header line") != expected) bad(in.number(), "header of " + name + " must be '" + expected + "'");

        for (std::uint64_t n = 0; n < count; ++n) {
            auto fields = split(in.take("tuple"), '\t');
            if (fields.size() != h.size()) {
                bad(in.number(), name + " tuples have " + std::to_string(h.size()) + " fields");
            }
            Tuple t;
            for (std::size_t i = 0; i < fields.size(); ++i) {
                try {
                    t.push_back(decode_field(fields[i], h[i].kind));
                } catch (const Error& e) {
                    bad(in.number(), e.what());
                }
                if (const auto* o = std::get_if<Oid>(&t.back())) max_oid = std::max(max_oid, o->value);
            }
            if (!rel.insert(std::move(t))) {
                throw Error(ErrorCode::ConstraintError, "duplicate tuple in " + name,
                            SourcePos{static_cast<int>(in.number()), 1});
            }
        }
    }
    for (const auto& [name, sr] : db.store.relations()) {
        if (!seen.count(name)) bad(in.number(), "relation " + name + " is missing from %DATA");
    }

    auto oid_line = split(in.take("%OID"), ' ');
    std::uint64_t counter = 0;
    if (oid_line.size() != 2 || oid_line[0] != "%OID" || !parse_count(oid_line[1], counter)) {
        bad(in.number(), "expected '%OID <n>'");
    }
    if (!in.done()) bad(in.number() + 1, "trailing content after %OID");

    try {
        db.store.check();
    } catch (const Error& e) {
        fail(ErrorCode::ConstraintError, std::string(to_string(e.code())) + ": " + e.what());
    }
    if (counter < max_oid) {
        fail(ErrorCode::CounterError,
             "OID counter " + std::to_string(counter) + " is below stored OID " + std::to_string(max_oid));
    }
    db.last_oid = counter;
    return db;
}

void save_snapshot(const Database& db, const std::filesystem::path& destination) {
    const std::string text = serialize(db);
    auto tmp = destination;
    tmp += ".tmp";
    std::FILE* f = std::fopen(tmp.c_str(), "wx");
    if (!f) fail(ErrorCode::IoError, "cannot create " + tmp.string() + " (a save may be in progress)");
    const bool written = std::fwrite(text.data(), 1, text.size(), f) == text.size();
    const bool closed = std::fclose(f) == 0;
    std::error_code ec;
    if (!written || !closed) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::IoError, "cannot write " + tmp.string());
    }
    std::filesystem::rename(tmp, destination, ec);
    if (ec) {
        std::filesystem::remove(tmp, ec);
        fail(ErrorCode::IoError, "cannot replace " + destination.string());
    }
}

Database load_snapshot(const std::filesystem::path& source) {
    std::ifstream in(source, std::ios::binary);
    if (!in) fail(ErrorCode::IoError, "cannot read " + source.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return deserialize(ss.str());
}

} // namespace rxo::store
