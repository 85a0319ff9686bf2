#include "rxo/shell/shell.hpp"

#include "rxo/runtime/runtime.hpp"
#include "rxo/store/store.hpp"
#include "rxo/syntax/lexer.hpp"
#include "rxo/syntax/parser.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>

namespace rxo::shell {

namespace {

std::size_t width(const std::string& s) {
    std::size_t n = 0;
    for (unsigned char c : s) n += (c & 0xC0) != 0x80;
    return n;
}

std::string cell(const Value& v) {
    std::string out;
    for (char c : display(v)) {
        if (c == '\n') out += "\\n";
        else if (c == '\t') out += "\\t";
        else out += c;
    }
    return out;
}

std::string rows_line(std::size_t n) { return std::to_string(n) + (n == 1 ? " row" : " rows"); }

bool mutates(const syntax::Statement& st) { return !std::holds_alternative<syntax::Select>(st.node); }

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string_view::npos) return "";
    return std::string(s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1));
}

} // namespace

std::optional<Format> parse_format(std::string_view name) {
    if (name == "table") return Format::Table;
    if (name == "tsv") return Format::Tsv;
    return std::nullopt;
}

std::string format_relation(const kernel::Relation& rel, Format format) {
    const auto rows = rel.canonical_rows();
    const auto names = rel.header().names();
    std::string out;
    if (format == Format::Tsv) {
        for (std::size_t i = 0; i < names.size(); ++i) out += (i ? "\t" : "") + names[i];
        out += "\n";
        for (const auto& t : rows) {
            for (std::size_t i = 0; i < t.size(); ++i) out += (i ? "\t" : "") + store::encode_field(t[i]);
            out += "\n";
        }
        return out;
    }

    std::vector<std::vector<std::string>> cells;
    std::vector<std::size_t> widths;
    for (const auto& n : names) widths.push_back(width(n));
    for (const auto& t : rows) {
        auto& line = cells.emplace_back();
        for (std::size_t i = 0; i < t.size(); ++i) {
            line.push_back(cell(t[i]));
            widths[i] = std::max(widths[i], width(line.back()));
        }
    }
    auto emit = [&](const std::vector<std::string>& line) {
        std::string text;
        for (std::size_t i = 0; i < line.size(); ++i) {
            if (i) text += " | ";
            text += line[i];
            if (i + 1 < line.size()) text.append(widths[i] - width(line[i]), ' ');
        }
        out += text + "\n";
    };
    if (!names.empty()) {
        emit(names);
        std::string rule;
        for (std::size_t i = 0; i < widths.size(); ++i) rule += (i ? "-+-" : "") + std::string(widths[i], '-');
        out += rule + "\n";
    }
    for (const auto& line : cells) emit(line);
    return out + rows_line(rows.size()) + "\n";
}

std::string list_classes(const Database& db) {
    std::string out;
    for (const auto& c : db.catalog.class_names()) out += c + "\n";
    return out;
}

Session open_session(std::filesystem::path db_path, bool autosave, Format format) {
    Session s;
    s.autosave = autosave;
    s.format = format;
    if (!db_path.empty() && std::filesystem::exists(db_path)) s.db = store::load_snapshot(db_path);
    s.db_path = std::move(db_path);
    return s;
}

void save(Session& s) {
    if (s.db_path.empty()) fail(ErrorCode::IoError, "no database file to save to");
    store::save_snapshot(s.db, s.db_path);
}

void execute(Session& s, const syntax::Statement& st, std::ostream& out) {
    auto r = runtime::execute(s.db, st);
    if (r.relation) out << format_relation(*r.relation, s.format);
    else out << r.message << "\n";
    if (s.autosave && mutates(st) && !s.db_path.empty()) save(s);
}

int run_source(Session& s, std::string_view source, std::ostream& out, std::ostream& err) {
    try {
        const auto tokens = syntax::tokenize(source);
        syntax::Parser p(tokens);
        while (!p.at_end()) execute(s, p.next_statement(), out);
    } catch (const Error& e) {
        err << e.describe() << "\n";
        return 1;
    }
    return 0;
}

int run_script(Session& s, const std::filesystem::path& script, std::ostream& out, std::ostream& err) {
    std::ifstream in(script, std::ios::binary);
    if (!in) {
        err << "cannot read " << script.string() << "\n";
        return 2;
    }
    std::stringstream ss;
    ss << in.rdbuf();
    return run_source(s, ss.str(), out, err);
}

void repl(Session& s, std::istream& in, std::ostream& out, std::ostream& err, bool prompt) {
    std::string buffer;
    int buffer_line = 1; // input line where `buffer` starts
    int line_no = 0;
    auto report = [&](const Error& e) {
        if (!e.position()) {
            err << e.describe() << "\n";
            return;
        }
        SourcePos pos = *e.position();
        pos.line += buffer_line - 1;
        err << Error(e.code(), e.what(), pos).describe() << "\n";
    };
    // Runs every complete statement in the buffer and keeps an unfinished tail.
    auto drain = [&](bool final) {
        std::vector<syntax::Token> tokens;
        try {
            tokens = syntax::tokenize(buffer);
        } catch (const Error& e) {
            report(e);
            buffer.clear();
            return;
        }
        syntax::Parser p(tokens);
        std::size_t done = 0;
        while (!p.at_end()) {
            syntax::Statement st;
            try {
                st = p.next_statement();
            } catch (const Error& e) {
                if (!final && e.code() == ErrorCode::ParseError && p.at_end()) {
                    std::string rest;
                    for (std::size_t i = done; i < tokens.size(); ++i) rest += tokens[i].leading + tokens[i].text;
                    buffer_line += tokens[done].pos.line - 1;
                    // Leading trivia may span lines of its own.
                    buffer_line -= static_cast<int>(std::count(tokens[done].leading.begin(), tokens[done].leading.end(), '\n'));
                    buffer = rest + tokens.back().trailing;
                    return;
                }
                report(e);
                break;
            }
            done = p.position();
            try {
                execute(s, st, out);
            } catch (const Error& e) {
                report(e);
            }
        }
        buffer.clear();
    };

    std::string line;
    for (;;) {
        if (prompt) out << (trim(buffer).empty() ? "rxo> " : "...> ") << std::flush;
        if (!std::getline(in, line)) break;
        ++line_no;
        if (trim(buffer).empty()) {
            buffer.clear();
            buffer_line = line_no;
        }
        const std::string cmd = trim(line);
        if (buffer.empty() && cmd.starts_with("\\")) {
            if (cmd == "\\q") return;
            try {
                if (cmd == "\\save") {
                    save(s);
                    out << "OK (saved to " << s.db_path.string() << ")\n";
                } else if (cmd == "\\classes") {
                    out << list_classes(s.db);
                } else {
                    err << "unknown command " << cmd << " (try \\q, \\save, \\classes)\n";
                }
            } catch (const Error& e) {
                err << e.describe() << "\n";
            }
            continue;
        }
        buffer += line + "\n";
        drain(false);
    }
    if (!trim(buffer).empty()) drain(true);
}

} // namespace rxo::shell
