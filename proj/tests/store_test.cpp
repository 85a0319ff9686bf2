#include "suite.hpp"

#include "rxo/store/store.hpp"

#include <gtest/gtest.h>

#include <cstdlib>
#include <fstream>

using namespace rxo;

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

std::string d0_text() { return store::serialize(test::d0()); }

std::string replace_once(std::string text, const std::string& from, const std::string& to) {
    auto at = text.find(from);
    EXPECT_NE(at, std::string::npos) << from;
    return at == std::string::npos ? text : text.replace(at, from.size(), to);
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / ("rxo_store_test_" + std::to_string(::getpid()));
    std::filesystem::create_directories(dir);
    auto p = dir / name;
    std::filesystem::remove(p);
    std::filesystem::remove(p.string() + ".tmp");
    return p;
}

} // namespace

TEST(Snapshot, EmptyDatabase) {
    const std::string text = store::serialize(Database{});
    EXPECT_EQ(text, "RXO-SNAPSHOT 1\n%CATALOG\n%DATA\n%OID 0\n");
    Database back = store::deserialize(text);
    EXPECT_EQ(back.catalog.size(), 0u);
    EXPECT_TRUE(back.store.relations().empty());
    EXPECT_EQ(back.last_oid, 0u);
}

TEST(Snapshot, GoodsSectionIsSortedByArt) {
    const std::string text = d0_text();
    EXPECT_NE(text.find("RELATION GOODS@obj 2\n#oid\tArt\n4\tA1\n5\tA2\n"), std::string::npos) << text;
    EXPECT_TRUE(text.starts_with("RXO-SNAPSHOT 1\n%CATALOG\nCREATE CLASS BANKS"));
    EXPECT_TRUE(text.ends_with("%OID 8\n"));
}

TEST(Snapshot, FieldEscapes) {
    EXPECT_EQ(store::encode_field(Value{std::string("a\tb\nc\\d")}), "a\\tb\\nc\\\\d");
    EXPECT_EQ(store::encode_field(Value{Null{}}), "\\N");
    EXPECT_EQ(store::encode_field(Value{std::string("\\N")}), "\\\\N");
    EXPECT_EQ(store::encode_field(Value{Oid{42}}), "42");
    EXPECT_EQ(store::encode_field(Value{true}), "TRUE");
    EXPECT_EQ(store::encode_field(Value{0.1}), "0.1");
    EXPECT_EQ(store::encode_field(*parse_datetime("2024-01-02T03:04:05Z")), "2024-01-02T03:04:05Z");
    EXPECT_TRUE(is_null(store::decode_field("\\N", Kind::string())));
    EXPECT_EQ(code_of([] { store::decode_field("a\\x", Kind::string()); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([] { store::decode_field("1.5", Kind::integer()); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([] { store::decode_field("0", Kind::ref("BANKS")); }), ErrorCode::FormatError);
    EXPECT_EQ(code_of([] { store::decode_field("yes", Kind::boolean()); }), ErrorCode::FormatError);
}

TEST(Snapshot, TabInsideStringRoundTrips) {
    Database db = test::d0();
    test::run(db, "UPDATE DOCS[.DocN = \"D1\"] SET .Comment := \"left\\tright\\nnext \\\\ end\";");
    const std::string text = store::serialize(db);
    EXPECT_NE(text.find("left\\tright\\nnext \\\\ end"), std::string::npos);
    Database back = store::deserialize(text);
    EXPECT_EQ(test::select(back, "SELECT .Comment FROM DOCS[.DocN = \"D1\"];"),
              test::relation({{".Comment", Kind::string()}}, {{Value{std::string("left\tright\nnext \\ end")}}}));
}

TEST(Snapshot, D0RoundTrip) {
    const Database db = test::d0();
    const std::string text = store::serialize(db);
    const Database back = store::deserialize(text);
    EXPECT_EQ(store::serialize(back), text);
    EXPECT_EQ(suite::results(back), suite::results(db));
    EXPECT_EQ(back.last_oid, 8u);
    for (const char* q : {"SELECT .DocN, .Pieces FROM GOODS[.Art = \"A1\"].Turnover;", "SELECT .Art, .Pieces FROM GOODS;"}) {
        EXPECT_EQ(test::select(back, q), test::select(db, q)) << q;
    }
    // Methods and procedures come back too.
    Database a = db, b = back;
    test::run(a, "EXEC DOCS.DoShip('2024-01-02T00:00:00Z');");
    test::run(b, "EXEC DOCS.DoShip('2024-01-02T00:00:00Z');");
    EXPECT_EQ(store::serialize(a), store::serialize(b));
}

TEST(Snapshot, Tampering) {
    const std::string text = d0_text();
    auto code = [](const std::string& t) { return code_of([&] { store::deserialize(t); }); };
    EXPECT_EQ(code(replace_once(text, "RELATION GOODS@obj 2\n#oid\tArt\n4\tA1\n",
                                "RELATION GOODS@obj 3\n#oid\tArt\n4\tA1\n9\tA1\n")),
              ErrorCode::ConstraintError);
    EXPECT_EQ(code(replace_once(text, "%OID 8", "%OID 9") + "\n9\tA1"), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "%OID 8", "%OID 7")), ErrorCode::CounterError);
    EXPECT_EQ(code(replace_once(text, "RXO-SNAPSHOT 1", "RXO-SNAPSHOT 2")), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "%DATA\n", "")), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "#oid\tArt", "#oid\tArticle")), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "RELATION GOODS@obj 2", "RELATION GOODS@obj 3")), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "RELATION GOODS@obj 2", "RELATION GOODS@nope 2")), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "4\tA1\n", "4\tA1\textra\n")), ErrorCode::FormatError);
    EXPECT_EQ(code(replace_once(text, "CREATE CLASS BANKS", "CREATE CLAS BANKS")), ErrorCode::FormatError);
    EXPECT_EQ(code(text.substr(0, text.find("%OID"))), ErrorCode::FormatError);
    // An item naming an article that is not there.
    EXPECT_EQ(code(replace_once(text, "4\tA1\n", "4\tA9\n")), ErrorCode::ConstraintError);
}

TEST(Snapshot, Files) {
    const auto path = scratch("d0.snap");
    const Database db = test::d0();
    store::save_snapshot(db, path);
    EXPECT_FALSE(std::filesystem::exists(path.string() + ".tmp"));
    EXPECT_EQ(store::serialize(store::load_snapshot(path)), store::serialize(db));
    // Overwrites the previous snapshot.
    Database changed = db;
    test::run(changed, "NEW BANKS WITH SET .Name := \"Second\";");
    store::save_snapshot(changed, path);
    EXPECT_EQ(store::load_snapshot(path).last_oid, 9u);

    std::ofstream(path.string() + ".tmp") << "busy";
    EXPECT_EQ(code_of([&] { store::save_snapshot(db, path); }), ErrorCode::IoError);
    EXPECT_EQ(store::load_snapshot(path).last_oid, 9u);
    EXPECT_EQ(code_of([&] { store::load_snapshot(scratch("missing.snap")); }), ErrorCode::IoError);
}

TEST(SnapshotProperty, RandomRoundTrips) {
    std::mt19937 rng(77);
    for (int round = 0; round < 50; ++round) {
        Database db = test::ddl();
        test::run(db, oracle::random_population(rng));
        if (round % 3 == 0) test::run(db, "EXEC DOCS[.Items.Pieces > 2].DoShip('2024-06-01T12:00:00Z');");
        if (round % 4 == 1) test::run(db, "DESTROY DOCS[.Items.Pieces < 3];");
        const std::string text = store::serialize(db);
        Database back = store::deserialize(text);
        ASSERT_EQ(store::serialize(back), text) << "round " << round;
        EXPECT_EQ(suite::results(back), suite::results(db)) << "round " << round;
        // No OID handed out after loading collides with a stored one.
        const auto before = back.last_oid;
        test::run(back, "NEW BANKS;");
        EXPECT_GT(back.last_oid, before);
    }
}

TEST(SnapshotProperty, FieldRoundTrip) {
    std::mt19937 rng(8);
    const std::string alphabet = "ab\\\tN\n x";
    for (int n = 0; n < 500; ++n) {
        std::string s;
        for (int k = static_cast<int>(rng() % 8); k > 0; --k) s += alphabet[rng() % alphabet.size()];
        const auto enc = store::encode_field(Value{s});
        EXPECT_EQ(enc.find('\t'), std::string::npos);
        EXPECT_EQ(enc.find('\n'), std::string::npos);
        EXPECT_TRUE(values_equal(store::decode_field(enc, Kind::string()), Value{s})) << s;
        const double d = std::ldexp(static_cast<double>(rng()), -static_cast<int>(rng() % 60)) * (n % 2 ? -1 : 1);
        EXPECT_EQ(std::get<double>(store::decode_field(store::encode_field(Value{d}), Kind::floating())), d);
        const std::int64_t i = static_cast<std::int64_t>(rng()) * (n % 2 ? -1 : 1) * 1000003;
        EXPECT_EQ(std::get<std::int64_t>(store::decode_field(store::encode_field(Value{i}), Kind::integer())), i);
    }
}
