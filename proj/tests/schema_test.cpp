#include "test_util.hpp"

#include <gtest/gtest.h>

#include <set>

using namespace rxo;

namespace {

std::vector<std::string> header_names(const kernel::Relation& r) { return r.header().names(); }

const kernel::StoredRelation* find(const std::vector<kernel::StoredRelation>& rels, const std::string& name) {
    for (const auto& r : rels) {
        if (r.name == name) return &r;
    }
    return nullptr;
}

ErrorCode code_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.code();
    }
    ADD_FAILURE() << "no error";
    return ErrorCode::InvalidValue;
}

} // namespace

TEST(Schema, DocsLayout) {
    const Database db = test::ddl();
    auto rels = schema::derive_storage(db.catalog, "DOCS");
    ASSERT_EQ(rels.size(), 2u);
    const auto* root = find(rels, "DOCS@obj");
    ASSERT_TRUE(root);
    EXPECT_EQ(header_names(root->relation), std::vector<std::string>({"#oid", "DocN", "Date", "Comment", "Cntr"}));
    EXPECT_EQ(root->relation.header()[4].kind, Kind::ref("CONTRACTORS"));
    ASSERT_EQ(root->relation.keys().size(), 2u);
    EXPECT_EQ(root->relation.keys()[0], (kernel::Key{{"DocN"}, true}));
    EXPECT_EQ(root->relation.keys()[1], (kernel::Key{{"#oid"}, false}));

    const auto* items = find(rels, "DOCS@Items");
    ASSERT_TRUE(items);
    EXPECT_EQ(header_names(items->relation), std::vector<std::string>({"#oid", "Art", "Pieces"}));
    ASSERT_EQ(items->relation.keys().size(), 1u);
    EXPECT_EQ(items->relation.keys()[0].attributes, std::vector<std::string>({"#oid", "Art"}));

    bool owner = false, goods = false;
    for (const auto& fk : items->foreign_keys) {
        if (fk.attributes == std::vector<std::string>{"#oid"}) {
            owner = fk.targets == std::vector<kernel::RelationRef>{{"DOCS@obj", {"#oid"}}};
        }
        if (fk.attributes == std::vector<std::string>{"Art"}) {
            goods = fk.targets == std::vector<kernel::RelationRef>{{"GOODS@obj", {"Art"}}};
        }
    }
    EXPECT_TRUE(owner);
    EXPECT_TRUE(goods);
}

TEST(Schema, BanksHasOnlyRoot) {
    const Database db = test::ddl();
    auto rels = schema::derive_storage(db.catalog, "BANKS");
    ASSERT_EQ(rels.size(), 1u);
    EXPECT_EQ(rels[0].name, "BANKS@obj");
    EXPECT_EQ(header_names(rels[0].relation), std::vector<std::string>({"#oid", "Name"}));
}

TEST(Schema, ReferencesBecomeForeignKeys) {
    const Database db = test::ddl();
    const auto& cntr = db.store.at("CONTRACTORS@obj");
    ASSERT_EQ(cntr.foreign_keys.size(), 1u);
    EXPECT_EQ(cntr.foreign_keys[0].attributes, std::vector<std::string>({"Bank"}));
    EXPECT_EQ(cntr.foreign_keys[0].targets, (std::vector<kernel::RelationRef>{{"BANKS@obj", {"#oid"}}}));
    // DOCS.Cntr may point at any contractor; SALES objects are DOCS too.
    const auto& docs = db.store.at("DOCS@obj");
    EXPECT_EQ(docs.foreign_keys[0].targets, (std::vector<kernel::RelationRef>{{"CONTRACTORS@obj", {"#oid"}}}));
}

TEST(Schema, StorageFor) {
    const Database db = test::ddl();
    auto date = schema::storage_for(db, "DOCS", "Date");
    EXPECT_EQ(date.relation, "DOCS@obj");
    EXPECT_EQ(date.attribute, "Date");
    auto comment = schema::storage_for(db, "SALES", "Comment");
    EXPECT_EQ(comment.relation, "SALES@obj");
    EXPECT_EQ(schema::storage_for(db, "SALES", "SaledItems").relation, "SALES@SaledItems");
    EXPECT_EQ(code_of([&] { schema::storage_for(db, "GOODS", "Turnover"); }), ErrorCode::NotStored);
    EXPECT_EQ(code_of([&] { schema::storage_for(db, "SALES", "Items"); }), ErrorCode::NotStored);
    EXPECT_EQ(code_of([&] { schema::storage_for(db, "GOODS", "Nope"); }), ErrorCode::UnknownMember);
}

TEST(Schema, NoStorageBeforeStored) {
    Database db = test::script("CREATE CLASS BANKS (Name STRING);");
    EXPECT_TRUE(db.store.relations().empty());
    EXPECT_FALSE(schema::has_root(db, "BANKS"));
    test::run(db, "ALTER BANKS REALIZE Name AS STORED;");
    EXPECT_TRUE(schema::has_root(db, "BANKS"));
    EXPECT_TRUE(db.store.contains("BANKS@obj"));
}

TEST(Schema, Determinism) {
    const Database db = test::ddl();
    auto a = schema::derive_storage(db.catalog);
    auto b = schema::derive_storage(db.catalog);
    ASSERT_EQ(a.relations.size(), b.relations.size());
    for (std::size_t i = 0; i < a.relations.size(); ++i) {
        EXPECT_EQ(a.relations[i].name, b.relations[i].name);
        EXPECT_EQ(a.relations[i].relation.header(), b.relations[i].relation.header());
        EXPECT_EQ(a.relations[i].relation.keys(), b.relations[i].relation.keys());
        EXPECT_EQ(a.relations[i].foreign_keys, b.relations[i].foreign_keys);
    }
    EXPECT_EQ(a.shared_keys, b.shared_keys);
    // The live store matches a fresh derivation.
    for (const auto& r : a.relations) EXPECT_EQ(db.store.at(r.name).relation.header(), r.relation.header());
}

TEST(Schema, ClassKeySpansTheExtent) {
    Database db = test::ddl();
    test::run(db, "NEW DOCS WITH SET .DocN := \"X\";");
    EXPECT_EQ(code_of([&] { test::run(db, "NEW SALES WITH SET .DocN := \"X\";"); }), ErrorCode::KeyViolation);
    test::run(db, "NEW SALES WITH SET .DocN := \"Y\";");
    EXPECT_EQ(db.store.at("SALES@obj").relation.size(), 1u);
}

TEST(Schema, OrphanChildRowsRejected) {
    Database db = test::d0();
    kernel::Insert ins{"DOCS@Items", {{Oid{999}, std::string("A1"), std::int64_t{1}}}};
    std::vector<kernel::Mutation> ms{ins};
    EXPECT_EQ(code_of([&] { kernel::apply_mutations(db.store, ms); }), ErrorCode::ForeignKeyViolation);
}

TEST(Schema, DataLossGuard) {
    Database db = test::d0();
    test::run(db, "NEW SALES WITH SET .DocN := \"S1\";");
    test::run(db, "INSERT INTO SALES[.DocN = \"S1\"].SaledItems VALUES (\"A1\", 2.5, 3);");
    EXPECT_EQ(code_of([&] { test::run(db, "ALTER SALES REALIZE SaledItems AS SELECT Art, 1.0, 1 FROM Items;"); }),
              ErrorCode::StoredDataLoss);
    EXPECT_EQ(db.store.at("SALES@SaledItems").relation.size(), 1u);
    // An empty relation may be replaced.
    test::run(db, "DELETE FROM SALES[.DocN = \"S1\"].SaledItems;");
    test::run(db, "ALTER SALES REALIZE SaledItems AS SELECT .Art, 1.0, 1 FROM GOODS;");
    EXPECT_FALSE(db.store.contains("SALES@SaledItems"));
}

// Every O-view over a class root exposes each non-method member: stored
// members through storage, calculated ones through their declared shape.
TEST(SchemaProperty, Reconstruction) {
    const Database db = test::d0();
    for (const auto& cls : db.catalog.class_names()) {
        auto view = query::resolve_oview(db, test::path(cls));
        std::set<std::string> reached;
        for (const auto& n : view.relation.header().names()) {
            auto dot = n.find('.', 1);
            std::string first = n.substr(1, dot == std::string::npos ? std::string::npos : dot - 1);
            if (first != "#") reached.insert(first);
        }
        std::set<std::string> expected;
        for (const auto& rm : db.catalog.resolve_interface(cls)) {
            if (rm.form() != syntax::MemberDecl::Form::Method) expected.insert(rm.name());
        }
        EXPECT_EQ(reached, expected) << cls;
    }
}
