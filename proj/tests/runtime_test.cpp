#include "method_gen.hpp"
#include "oracle.hpp"
#include "rxo/syntax/printer.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <functional>

using namespace rxo;
using kernel::Relation;

namespace {

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::InvalidValue;
}

Value s(const char* v) { return std::string(v); }
Value i(std::int64_t v) { return v; }

runtime::StatementResult exec(Database& db, const std::string& text) {
    return runtime::execute(db, syntax::parse_statement(text));
}

Value stored_attr(const Database& db, const std::string& cls, Oid oid, const std::string& attr) {
    const auto& rel = db.store.at(schema::root_relation(cls)).relation;
    const auto idx = rel.header().index_of(attr);
    for (const auto& t : rel) {
        if (std::get<Oid>(t[0]) == oid) return t[idx];
    }
    throw std::runtime_error("no such object");
}

bool same_state(const Database& a, const Database& b) {
    if (a.last_oid != b.last_oid || a.store.relations().size() != b.store.relations().size()) return false;
    for (const auto& [name, sr] : a.store.relations()) {
        if (!b.store.contains(name) || !(b.store.at(name).relation == sr.relation)) return false;
    }
    return true;
}

} // namespace

TEST(Lifecycle, NewObjects) {
    Database db = test::ddl();
    auto r = exec(db, "NEW BANKS WITH SET .Name := \"TheBank\";");
    EXPECT_EQ(r.affected, 1u);
    EXPECT_EQ(test::stored(db, "BANKS@obj").size(), 1u);

    exec(db, "NEW CONTRACTORS WITH SET .Name := \"TheShop\", .Bank := (NEW BANKS WITH SET .Name := \"Inner\"), .ID := \"C1\";");
    const Oid inner = test::oid_of(db, "BANKS", "Name", s("Inner"));
    const Oid shop = test::oid_of(db, "CONTRACTORS", "ID", s("C1"));
    EXPECT_TRUE(values_equal(stored_attr(db, "CONTRACTORS", shop, "Bank"), inner));
    // The nested object is created first.
    EXPECT_LT(inner.value, shop.value);
    EXPECT_EQ(db.last_oid, 3u);
}

TEST(Lifecycle, D0Oids) {
    const Database db = test::d0();
    EXPECT_EQ(test::oid_of(db, "BANKS", "Name", s("TheBank")).value, 1u);
    EXPECT_EQ(test::oid_of(db, "CONTRACTORS", "ID", s("CoID001")).value, 2u);
    EXPECT_EQ(test::oid_of(db, "DOCS", "DocN", s("D3")).value, 8u);
}

TEST(Lifecycle, KeyConflictAtStatementBoundary) {
    Database db = test::ddl();
    exec(db, "NEW GOODS;");
    exec(db, "NEW GOODS;");
    EXPECT_EQ(test::stored(db, "GOODS@obj").size(), 2u);
    const Database before = db;
    EXPECT_EQ(code_of([&] { exec(db, "UPDATE GOODS SET .Art := \"A1\";"); }), ErrorCode::KeyViolation);
    EXPECT_TRUE(same_state(db, before));
}

TEST(Lifecycle, NewErrors) {
    Database db = test::d0();
    const Database before = db;
    EXPECT_EQ(code_of([&] { exec(db, "NEW GOODS WITH SET .Nope := 1;"); }), ErrorCode::UnknownComponent);
    EXPECT_EQ(code_of([&] { exec(db, "NEW GOODS WITH SET .Pieces := 1;"); }), ErrorCode::AssignToCalculated);
    EXPECT_EQ(code_of([&] { exec(db, "NEW GOODS WITH SET .Art := 5;"); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "NEW GOODS WITH SET .Art := \"A1\";"); }), ErrorCode::KeyViolation);
    EXPECT_EQ(code_of([&] { exec(db, "NEW DOCS WITH SET .Items := 1;"); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "NEW NOPE;"); }), ErrorCode::UnknownClass);
    EXPECT_EQ(code_of([&] { exec(db, "NEW DOCS WITH SET .Cntr := (NEW BANKS);"); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "NEW DOCS WITH SET .Cntr := CONTRACTORS;"); }), ErrorCode::Cardinality);
    // A failing nested NEW leaves no object behind and consumes no OID.
    EXPECT_EQ(code_of([&] { exec(db, "NEW CONTRACTORS WITH SET .Bank := (NEW BANKS), .ID := \"CoID001\";"); }),
              ErrorCode::KeyViolation);
    EXPECT_TRUE(same_state(db, before));
}

TEST(Lifecycle, DestroyEmptySelection) {
    Database db = test::d0();
    const Database before = db;
    EXPECT_EQ(exec(db, "DESTROY CONTRACTORS[.ID = \"nobody\"];").affected, 0u);
    EXPECT_TRUE(same_state(db, before));
}

TEST(Lifecycle, DestroyNullsReferences) {
    Database db = test::d0();
    const Oid d1 = test::oid_of(db, "DOCS", "DocN", s("D1"));
    const Oid d2 = test::oid_of(db, "DOCS", "DocN", s("D2"));
    const Oid d3 = test::oid_of(db, "DOCS", "DocN", s("D3"));
    EXPECT_EQ(exec(db, "DESTROY CONTRACTORS[.ID=\"CoID001\"];").affected, 1u);
    EXPECT_EQ(test::stored(db, "CONTRACTORS@obj").size(), 1u);
    EXPECT_TRUE(is_null(stored_attr(db, "DOCS", d1, "Cntr")));
    EXPECT_TRUE(is_null(stored_attr(db, "DOCS", d3, "Cntr")));
    EXPECT_FALSE(is_null(stored_attr(db, "DOCS", d2, "Cntr")));
    EXPECT_EQ(test::select(db, "SELECT .Name FROM GOODS.Turnover.Cntr;"),
              test::relation({{".Name", Kind::string()}}, {{s("OtherCo")}}));
}

TEST(Lifecycle, DestroyEverything) {
    Database db = test::d0();
    for (const char* cls : {"DOCS", "GOODS", "CONTRACTORS", "BANKS"}) exec(db, std::string("DESTROY ") + cls + ";");
    for (const auto& [name, sr] : db.store.relations()) EXPECT_TRUE(sr.relation.empty()) << name;
    EXPECT_EQ(db.catalog.size(), 6u);
    EXPECT_EQ(db.last_oid, 8u);
    exec(db, "NEW BANKS;");
    EXPECT_EQ(db.last_oid, 9u);
}

TEST(Lifecycle, DestroyedOidsVanishFromViews) {
    std::mt19937 rng(3);
    for (int round = 0; round < 30; ++round) {
        Database db = test::ddl();
        test::run(db, oracle::random_population(rng));
        const char* victims[] = {"CONTRACTORS[.Name = \"TheShop\"]", "GOODS[.Art = \"A0\"]", "DOCS[.Items.Pieces > 3]",
                                 "BANKS"};
        std::string target = victims[rng() % 4];
        auto sel = runtime::select_objects(db, test::path(target));
        const auto max_before = db.last_oid;
        const Database before = db;
        try {
            runtime::destroy_objects(db, sel);
        } catch (const Error& e) {
            // An article still named by item rows cannot go.
            EXPECT_EQ(e.code(), ErrorCode::ForeignKeyViolation);
            EXPECT_TRUE(same_state(db, before));
            continue;
        }
        for (const auto& cls : db.catalog.class_names()) {
            auto view = query::resolve_oview(db, test::path(cls));
            for (const auto& t : view.relation) {
                for (std::size_t k = 0; k < t.size(); ++k) {
                    if (view.relation.header()[k].kind.type == ScalarType::Ref) EXPECT_FALSE(sel.oids.count(t[k])) << cls;
                }
            }
        }
        exec(db, "NEW BANKS;");
        EXPECT_EQ(db.last_oid, max_before + 1);
        for (const auto& o : sel.oids) EXPECT_LT(std::get<Oid>(o).value, db.last_oid);
    }
}

TEST(Assign, Examples) {
    Database db = test::d0();
    const Database before = db;
    EXPECT_EQ(exec(db, "UPDATE DOCS[.DocN = \"none\"] SET .Comment := \"X\";").affected, 0u);
    EXPECT_TRUE(same_state(db, before));

    auto sel = runtime::select_objects(db, test::path("DOCS[.DocN=\"D1\"]"));
    EXPECT_EQ(runtime::assign_components(db, sel, {{"Comment", test::expr("\"X\"")}}), 1u);
    std::size_t changed = 0;
    for (const auto& t : test::stored(db, "DOCS@obj")) {
        if (!before.store.at("DOCS@obj").relation.contains(t)) ++changed;
    }
    EXPECT_EQ(changed, 1u);
    EXPECT_TRUE(values_equal(stored_attr(db, "DOCS", test::oid_of(db, "DOCS", "DocN", s("D1")), "Comment"), s("X")));

    EXPECT_EQ(code_of([&] { exec(db, "UPDATE GOODS SET .Art := 5;"); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "UPDATE GOODS SET .Pieces := 5;"); }), ErrorCode::AssignToCalculated);
    EXPECT_EQ(code_of([&] { exec(db, "UPDATE GOODS SET .Nope := 5;"); }), ErrorCode::UnknownComponent);
}

TEST(Assign, SimultaneousAndSelfReferencing) {
    Database db = test::d0();
    exec(db, "UPDATE DOCS SET .Comment := .DocN, .DocN := .DocN + \"x\";");
    EXPECT_EQ(test::select(db, "SELECT .DocN, .Comment FROM DOCS;"),
              test::relation({{".DocN", Kind::string()}, {".Comment", Kind::string()}},
                             {{s("D1x"), s("D1")}, {s("D2x"), s("D2")}, {s("D3x"), s("D3")}}));
    exec(db, "UPDATE DOCS[.DocN = \"D1x\"] SET .Cntr := CONTRACTORS[.ID = \"CoID002\"], .Date := '2024-03-01T10:00:00Z';");
    EXPECT_EQ(test::select(db, "SELECT .Cntr.Name FROM DOCS[.Date > '2024-01-01T00:00:00Z'];"),
              test::relation({{".Cntr.Name", Kind::string()}}, {{s("OtherCo")}}));
}

TEST(SetComponents, InsertAndDelete) {
    Database db = test::ddl();
    test::run(db, "NEW GOODS WITH SET .Art := \"A1\"; NEW DOCS WITH SET .DocN := \"D1\";");
    exec(db, "INSERT INTO DOCS[.DocN = \"D1\"].Items VALUES (\"A1\", 5);");
    const Oid d1 = test::oid_of(db, "DOCS", "DocN", s("D1"));
    EXPECT_EQ(test::stored(db, "DOCS@Items"),
              test::relation({{"#oid", Kind::ref("DOCS")}, {"Art", Kind::string()}, {"Pieces", Kind::integer()}},
                             {{d1, s("A1"), i(5)}}));
    const Database before = db;
    EXPECT_EQ(code_of([&] { exec(db, "INSERT INTO DOCS[.DocN = \"D1\"].Items VALUES (\"A1\", 6);"); }),
              ErrorCode::KeyViolation);
    EXPECT_EQ(code_of([&] { exec(db, "INSERT INTO DOCS[.DocN = \"D1\"].Items VALUES (\"A7\", 6);"); }),
              ErrorCode::ForeignKeyViolation);
    EXPECT_EQ(code_of([&] { exec(db, "INSERT INTO DOCS[.DocN = \"D1\"].Items VALUES (\"A1\");"); }),
              ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "INSERT INTO GOODS.Turnover VALUES (\"D1\", 1, 1);"); }),
              ErrorCode::AssignToCalculated);
    EXPECT_EQ(exec(db, "DELETE FROM DOCS.Items WHERE .Pieces > 100;").affected, 0u);
    EXPECT_TRUE(same_state(db, before));
    EXPECT_EQ(exec(db, "DELETE FROM DOCS[.DocN = \"D1\"].Items WHERE .Art = \"A1\";").affected, 1u);
    EXPECT_TRUE(test::stored(db, "DOCS@Items").empty());
}

TEST(SetComponents, AtomicMultiRowInsert) {
    Database db = test::d0();
    const Database before = db;
    EXPECT_EQ(code_of([&] { exec(db, "INSERT INTO DOCS[.DocN = \"D3\"].Items VALUES (\"A1\", 1), (\"ZZ\", 1);"); }),
              ErrorCode::ForeignKeyViolation);
    EXPECT_TRUE(same_state(db, before));
}

TEST(Methods, DoShipCompilesToTwoGuardedSteps) {
    const Database db = test::d0();
    auto proc = runtime::compile_method(db, "DOCS", "DoShip");
    auto steps = proc.assignments();
    ASSERT_EQ(steps.size(), 2u);
    EXPECT_EQ(steps[0]->name, "Date");
    EXPECT_EQ(steps[1]->name, "Comment");
    for (const auto* st : steps) {
        EXPECT_TRUE(st->component);
        ASSERT_EQ(st->guards.size(), 1u);
        EXPECT_TRUE(st->guards[0].polarity);
        EXPECT_EQ(syntax::dump(*st->guards[0].condition), syntax::dump(*test::expr("Date IS NULL")));
    }
    EXPECT_EQ(proc.writes, std::vector<std::string>({"Date", "Comment"}));
}

TEST(Methods, EmptyBodyIsIdentity) {
    Database db = test::d0();
    test::run(db, "ALTER DOCS REALIZE DoShip(inDate DATETIME) AS BEGIN END");
    EXPECT_TRUE(runtime::compile_method(db, "DOCS", "DoShip").steps.empty());
    const Database before = db;
    exec(db, "EXEC DOCS.DoShip('2024-01-02T00:00:00Z');");
    EXPECT_TRUE(same_state(db, before));
}

TEST(Methods, NonCompilableBodies) {
    Database db = test::script(
        "CREATE CLASS OWNER (Rate INTEGER); ALTER OWNER REALIZE Rate AS STORED;"
        "CREATE CLASS ACC (Name STRING, Bal INTEGER, Peer ACC, Owner OWNER, Calc INTEGER, Rows SET OF (V INTEGER), M());"
        "ALTER ACC REALIZE Name, Bal, Peer, Owner, Rows AS STORED;"
        "ALTER ACC REALIZE Calc AS BEGIN RETURN Bal + 1; END");
    auto body = [&](const std::string& b) {
        return code_of([&] { test::run(db, "ALTER ACC REALIZE M() AS BEGIN " + b + " END"); });
    };
    EXPECT_EQ(body("Calc := 1;"), ErrorCode::NonCompilableBody);
    EXPECT_EQ(body("Rows := 1;"), ErrorCode::NonCompilableBody);
    EXPECT_EQ(body("Peer.Bal := 1;"), ErrorCode::NonCompilableBody);
    EXPECT_EQ(body("Bal := Peer.Bal;"), ErrorCode::NonCompilableBody);
    EXPECT_EQ(body("Bal := Rows.V;"), ErrorCode::NonCompilableBody);
    EXPECT_EQ(body("Bal := SUM(Bal);"), ErrorCode::AggregateMisuse);
    EXPECT_EQ(body("Nope := 1;"), ErrorCode::UnknownName);
    EXPECT_EQ(body("DECLARE v INTEGER; DECLARE v STRING;"), ErrorCode::MemberCollision);
    // Unrelated classes and snapshot SELECTs may be read.
    test::run(db, "ALTER ACC REALIZE M() AS BEGIN Bal := Owner.Rate; Bal := (SELECT MAX(#p.Bal) FROM ACC #p); END");
    test::run(db, "ALTER ACC REALIZE M() AS BEGIN Peer := Peer; END");
    EXPECT_EQ(body("Name := Peer.Name;"), ErrorCode::NonCompilableBody);
}

TEST(Methods, ExecDoShip) {
    Database db = test::d0();
    auto r = exec(db, "EXEC DOCS[.Date IS NULL].DoShip('2024-01-02T00:00:00Z');");
    EXPECT_EQ(r.affected, 3u);
    const Value when = *parse_datetime("2024-01-02T00:00:00Z");
    for (const auto& t : test::stored(db, "DOCS@obj")) {
        EXPECT_TRUE(values_equal(t[2], when));
        EXPECT_TRUE(values_equal(t[3], s("Shipped!")));
    }
    const Database shipped = db;
    exec(db, "EXEC DOCS[.Date >= '2024-01-01T00:00:00Z'].DoShip('2024-02-01T00:00:00Z');");
    EXPECT_TRUE(same_state(db, shipped));
    EXPECT_EQ(exec(db, "EXEC DOCS[.DocN = \"none\"].DoShip('2024-02-01T00:00:00Z');").affected, 0u);
    EXPECT_TRUE(same_state(db, shipped));
    EXPECT_EQ(code_of([&] { exec(db, "EXEC DOCS.DoShip(5);"); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "EXEC DOCS.DoShip();"); }), ErrorCode::KindMismatch);
    EXPECT_EQ(code_of([&] { exec(db, "EXEC DOCS.Nope();"); }), ErrorCode::UnknownMember);
}

TEST(Methods, InheritedMethodRunsOnSubclassStorage) {
    Database db = test::d0();
    exec(db, "NEW SALES WITH SET .DocN := \"S1\";");
    exec(db, "EXEC DOCS[.DocN = \"S1\" OR .DocN = \"D1\"].DoShip('2024-05-05T00:00:00Z');");
    EXPECT_EQ(test::select(db, "SELECT .DocN FROM DOCS[.Comment = \"Shipped!\"];"),
              test::relation({{".DocN", Kind::string()}}, {{s("D1")}, {s("S1")}}));
}


TEST(MethodsProperty, Confluence) {
    std::mt19937 rng(2024);
    int nonempty = 0;
    for (int round = 0; round < 200; ++round) {
        bool hit = false;
        ASSERT_EQ(gen::confluence_round(rng, 6, &hit), "") << "round " << round;
        nonempty += hit;
    }
    EXPECT_GT(nonempty, 100);
}

TEST(Atomicity, FailingStatementsLeaveQueriesUnchanged) {
    Database db = test::d0();
    const Database before = db;
    const std::vector<std::string> failing{
        "NEW GOODS WITH SET .Art := \"A1\";",
        "UPDATE DOCS SET .DocN := \"same\";",
        "INSERT INTO DOCS.Items VALUES (\"A2\", 1);",
        "DESTROY GOODS[.Art = \"A1\"];",
        "EXEC DOCS.DoShip('not a date');",
        "ALTER GOODS REALIZE Art AS SELECT \"x\" FROM Turnover;",
        "CREATE CLASS GOODS (X STRING);",
    };
    const std::vector<std::string> probes{"SELECT .Name, .Bank.Name FROM GOODS.Turnover.Cntr;",
                                          "SELECT .Art, .Pieces FROM GOODS;", "SELECT .DocN, .Date, .Comment FROM DOCS;"};
    for (const auto& stmt : failing) {
        EXPECT_THROW(exec(db, stmt), Error) << stmt;
        EXPECT_TRUE(same_state(db, before)) << stmt;
        for (const auto& p : probes) EXPECT_EQ(test::select(db, p), test::select(before, p)) << stmt;
    }
}
