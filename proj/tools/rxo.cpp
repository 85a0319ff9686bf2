#include "rxo/shell/shell.hpp"

#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>
#include <unistd.h>

namespace {

constexpr int kUsageError = 2;

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"rxo: an object-oriented language on a relational machine"};
    app.require_subcommand(1);

    std::string db_path;
    if (const char* env = std::getenv("RXO_DB")) db_path = env;

    auto add_db = [&](CLI::App* cmd) {
        cmd->add_option("--db", db_path, "Database snapshot file (default: $RXO_DB)");
    };

    bool no_autosave = false;
    auto* repl = app.add_subcommand("repl", "Interactive session");
    add_db(repl);
    repl->add_flag("--no-autosave", no_autosave, "Save only on \\save");

    std::string script;
    auto* run = app.add_subcommand("run", "Execute a script");
    run->add_option("script", script, "Script file")->required();
    add_db(run);

    std::string statement, format_name = "table";
    auto* query = app.add_subcommand("query", "Execute statements given on the command line");
    query->add_option("statement", statement, "Statement text")->required();
    add_db(query);
    query->add_option("--format", format_name, "table or tsv")->check(CLI::IsMember({"table", "tsv"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : kUsageError;
    }
    if (db_path.empty()) {
        std::cerr << "no database: pass --db <file> or set RXO_DB\n";
        return kUsageError;
    }

    rxo::shell::Session session;
    try {
        session = rxo::shell::open_session(db_path, !no_autosave, *rxo::shell::parse_format(format_name));
    } catch (const rxo::Error& e) {
        std::cerr << db_path << ": " << e.describe() << "\n";
        return 1;
    }

    if (*repl) {
        rxo::shell::repl(session, std::cin, std::cout, std::cerr, isatty(STDIN_FILENO) != 0);
        return 0;
    }
    if (*run) return rxo::shell::run_script(session, script, std::cout, std::cerr);
    return rxo::shell::run_source(session, statement, std::cout, std::cerr);
}
