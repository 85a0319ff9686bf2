#include "test_util.hpp"

#include "rxo/shell/shell.hpp"
#include "rxo/store/store.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>
#include <random>
#include <sys/wait.h>
#include <unistd.h>

using namespace rxo;

namespace {

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rxo_shell_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::filesystem::remove(p);
    return p;
}

shell::Session memory_session(Database db) {
    shell::Session s;
    s.db = std::move(db);
    return s;
}

std::string repl_output(shell::Session& s, const std::string& input, std::string* errors = nullptr) {
    std::istringstream in(input);
    std::ostringstream out, err;
    shell::repl(s, in, out, err);
    if (errors) *errors = err.str();
    return out.str();
}

int cli(const std::string& args, std::string* output = nullptr, const std::string& env = "") {
    const auto out = scratch("cli.out");
    const std::string cmd = env + " " + std::string(RXO_CLI_PATH) + " " + args + " > " + out.string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    if (output) {
        std::ifstream in(out);
        *output = std::string(std::istreambuf_iterator<char>(in), {});
    }
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

} // namespace

TEST(Format, EmptyRelation) {
    const auto empty = test::relation({{".Name", Kind::string()}}, {});
    EXPECT_EQ(shell::format_relation(empty, shell::Format::Table), ".Name\n-----\n0 rows\n");
    EXPECT_EQ(shell::format_relation(empty, shell::Format::Tsv), ".Name\n");
}

TEST(Format, ContractorNamesAsTsv) {
    const Database db = test::d0();
    EXPECT_EQ(shell::format_relation(test::select(db, "SELECT .Name FROM CONTRACTORS;"), shell::Format::Tsv),
              ".Name\nOtherCo\nTheShop\n");
}

TEST(Format, NullsAndEscapes) {
    const auto rel = test::relation({{"A", Kind::string()}, {"B", Kind::integer()}},
                                    {{Value{Null{}}, Value{std::int64_t{7}}}, {Value{std::string("x\ty")}, Value{Null{}}}});
    EXPECT_EQ(shell::format_relation(rel, shell::Format::Table), "A    | B\n-----+-----\nNULL | 7\nx\\ty | NULL\n2 rows\n");
    EXPECT_EQ(shell::format_relation(rel, shell::Format::Tsv), "A\tB\n\\N\t7\nx\\ty\t\\N\n");
}

TEST(Format, UnicodeWidth) {
    const auto rel = test::relation({{"N", Kind::string()}}, {{Value{std::string("\xc3\xa9t\xc3\xa9")}}, {Value{std::string("abcd")}}});
    EXPECT_EQ(shell::format_relation(rel, shell::Format::Table), "N\n----\nabcd\n\xc3\xa9t\xc3\xa9\n2 rows\n");
}

TEST(Repl, TurnoverContractorsTable) {
    auto s = memory_session(test::d0());
    EXPECT_EQ(repl_output(s, "SELECT .Name, .Bank.Name FROM GOODS.Turnover.Cntr;\n"),
              ".Name   | .Bank.Name\n"
              "--------+-----------\n"
              "OtherCo | TheBank\n"
              "TheShop | TheBank\n"
              "2 rows\n");
}

TEST(Repl, ClassesAfterScenario) {
    auto s = memory_session({});
    std::ostringstream out, err;
    ASSERT_EQ(shell::run_source(s, test::read_data("scenario.rxo"), out, err), 0) << err.str();
    EXPECT_EQ(repl_output(s, "\\classes\n"), "BANKS\nCONTRACTORS\nGOODS\nDOCS\nVALUERECORDS\nSALES\n");
}

TEST(Repl, QuitStopsReading) {
    auto s = memory_session(test::ddl());
    repl_output(s, "NEW BANKS;\n\\q\nNEW BANKS;\n");
    EXPECT_EQ(s.db.last_oid, 1u);
}

TEST(Repl, MultiLineStatementsAndErrors) {
    auto s = memory_session(test::d0());
    std::string err;
    const auto out = repl_output(s,
                                 "SELECT .Art\n"
                                 "FROM GOODS\n"
                                 "WHERE .Pieces > 4;\n"
                                 "NEW GOODS WITH SET .Art := \"A1\"; SELECT COUNT(*) AS N FROM GOODS;\n"
                                 "ALTER GOODS REALIZE Art AS\n"
                                 "  STORED;\n"
                                 "SELECT FROM;\n"
                                 "\\bogus\n"
                                 "UPDATE DOCS[.DocN = \"D1\"]\n"
                                 "  SET .Comment := \"c\";\n",
                                 &err);
    EXPECT_EQ(out, ".Art\n----\nA1\n1 row\nN\n-\n2\n1 row\nOK (1 row affected)\n");
    EXPECT_NE(err.find("line 4, column"), std::string::npos) << err;
    EXPECT_NE(err.find("KeyViolation"), std::string::npos) << err;
    EXPECT_NE(err.find("line 5, column"), std::string::npos) << err;
    EXPECT_NE(err.find("AlreadyStored"), std::string::npos) << err;
    EXPECT_NE(err.find("line 7, column 8: ParseError"), std::string::npos) << err;
    EXPECT_NE(err.find("unknown command \\bogus"), std::string::npos) << err;
}

TEST(Repl, UnfinishedInputIsReported) {
    auto s = memory_session(test::d0());
    std::string err;
    repl_output(s, "SELECT .Art FROM GOODS\n", &err);
    EXPECT_NE(err.find("ParseError"), std::string::npos);
}

TEST(Script, Examples) {
    auto s = memory_session(test::d0());
    const std::string before = store::serialize(s.db);
    std::ostringstream out, err;
    EXPECT_EQ(shell::run_source(s, "", out, err), 0);
    EXPECT_EQ(store::serialize(s.db), before);

    EXPECT_EQ(shell::run_source(s, "NEW BANKS;\nSELECT .Name\nFROM;\nNEW BANKS;", out, err), 1);
    EXPECT_NE(err.str().find("line 3"), std::string::npos) << err.str();
    EXPECT_EQ(s.db.last_oid, 9u);

    auto fresh = memory_session({});
    std::ostringstream out2, err2;
    EXPECT_EQ(shell::run_script(fresh, std::filesystem::path(RXO_TEST_DATA_DIR) / "scenario.rxo", out2, err2), 0)
        << err2.str();
    EXPECT_EQ(shell::run_script(fresh, scratch("missing.rxo"), out2, err2), 2);
}

TEST(Session, AutosaveAndExplicitSave) {
    const auto path = scratch("auto.db");
    {
        auto s = shell::open_session(path);
        EXPECT_EQ(s.db.catalog.size(), 0u);
        std::ostringstream out, err;
        EXPECT_EQ(shell::run_source(s, "NEW NOPE;", out, err), 1);
        EXPECT_FALSE(std::filesystem::exists(path));
        ASSERT_EQ(shell::run_source(s, test::read_data("d0.rxo"), out, err), 0) << err.str();
        EXPECT_EQ(store::serialize(store::load_snapshot(path)), store::serialize(s.db));
    }
    {
        auto s = shell::open_session(path, false);
        EXPECT_EQ(s.db.last_oid, 8u);
        repl_output(s, "NEW BANKS;\n");
        EXPECT_EQ(store::load_snapshot(path).last_oid, 8u);
        EXPECT_EQ(repl_output(s, "\\save\n"), "OK (saved to " + path.string() + ")\n");
        EXPECT_EQ(store::load_snapshot(path).last_oid, 9u);
    }
    auto s = memory_session({});
    std::string err;
    repl_output(s, "\\save\n", &err);
    EXPECT_NE(err.find("IoError"), std::string::npos);
}

TEST(ShellProperty, ReplMatchesScriptAndIsDeterministic) {
    const std::vector<std::string> pool{
        "SELECT .Name, .Bank.Name FROM GOODS.Turnover.Cntr;",
        "SELECT .Art, .Pieces FROM GOODS;",
        "NEW GOODS WITH SET .Art := \"A3\";",
        "INSERT INTO DOCS[.DocN = \"D1\"].Items VALUES (\"A2\", 4);",
        "EXEC DOCS[.DocN = \"D2\"].DoShip('2024-01-02T00:00:00Z');",
        "SELECT .DocN, .Date, .Comment FROM DOCS;",
        "DELETE FROM DOCS.Items WHERE .Pieces < 3;",
        "UPDATE CONTRACTORS[.ID = \"CoID002\"] SET .Name := \"Renamed\";",
        "DESTROY DOCS[.DocN = \"D3\"];",
        "SELECT .Cntr.Name, SUM(.Items.Pieces) AS P FROM DOCS GROUP BY .Cntr.Name;",
        "NEW GOODS WITH SET .Art := \"A1\";",
    };
    std::mt19937 rng(9);
    for (int round = 0; round < 40; ++round) {
        std::string script;
        for (int n = 0; n < 6; ++n) script += pool[rng() % pool.size()] + "\n";
        auto a = memory_session(test::d0());
        auto b = memory_session(test::d0());
        auto c = memory_session(test::d0());
        std::ostringstream out_a, err_a, out_c, err_c;
        // The script runner stops at the first error; feed it statement by statement.
        std::istringstream lines(script);
        for (std::string line; std::getline(lines, line);) {
            std::ostringstream ignored;
            shell::run_source(a, line, out_a, ignored);
            shell::run_source(c, line, out_c, err_c);
        }
        EXPECT_EQ(repl_output(b, script), out_a.str()) << script;
        EXPECT_EQ(out_a.str(), out_c.str());
        EXPECT_EQ(store::serialize(a.db), store::serialize(b.db));
    }
}

TEST(Cli, Commands) {
    const auto db = scratch("cli.db");
    const std::string script = (std::filesystem::path(RXO_TEST_DATA_DIR) / "d0.rxo").string();
    EXPECT_EQ(cli("run " + script + " --db " + db.string()), 0);
    std::string out;
    EXPECT_EQ(cli("query 'SELECT .Name FROM CONTRACTORS;' --format tsv --db " + db.string(), &out), 0);
    EXPECT_EQ(out, ".Name\nOtherCo\nTheShop\n");
    EXPECT_EQ(cli("query 'SELECT .Name FROM;' --db " + db.string(), &out), 1);
    EXPECT_NE(out.find("ParseError"), std::string::npos);
    EXPECT_EQ(cli("query 'NEW BANKS;' --db " + db.string()), 0);
    EXPECT_EQ(store::load_snapshot(db).last_oid, 9u);
    EXPECT_EQ(cli("query 'SELECT COUNT(*) AS N FROM BANKS;' --format tsv", &out, "RXO_DB=" + db.string()), 0);
    EXPECT_EQ(out, "N\n2\n");
    EXPECT_EQ(cli("query x"), 2);
    EXPECT_EQ(cli("frobnicate"), 2);
    EXPECT_EQ(cli("query 'SELECT .Name FROM BANKS;' --format xml --db " + db.string()), 2);
    EXPECT_EQ(cli("run " + scratch("none.rxo").string() + " --db " + db.string()), 2);
    EXPECT_EQ(cli("repl --db " + db.string() + " < /dev/null"), 0);
}
