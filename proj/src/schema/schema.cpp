#include "rxo/schema/schema.hpp"

#include <algorithm>
#include <set>

namespace rxo::schema {

namespace {

using catalog::Catalog;
using catalog::MemberDecl;
using Form = MemberDecl::Form;
using kernel::Attribute;
using kernel::ForeignKey;
using kernel::RelationRef;

Kind attribute_kind(const MemberDecl& m) {
    return m.form == Form::Reference ? Kind::ref(m.target) : Kind{m.scalar, {}};
}

bool stored(const Catalog& cat, const std::string& cls, const std::string& member) {
    auto a = cat.active(cls, member);
    return a && a->realization->body == syntax::RealizationBody::Stored;
}

bool root_exists(const Catalog& cat, const std::string& cls) {
    for (const auto& rm : cat.resolve_interface(cls)) {
        if (rm.form() != Form::Method && stored(cat, cls, rm.name())) return true;
    }
    return cat.fully_realized(cls);
}

// Stored attributes of an exact class's root relation, in interface order.
std::vector<const MemberDecl*> root_members(const Catalog& cat, const std::string& cls) {
    std::vector<const MemberDecl*> out;
    for (const auto& rm : cat.resolve_interface(cls)) {
        if ((rm.form() == Form::Scalar || rm.form() == Form::Reference) && stored(cat, cls, rm.name())) {
            out.push_back(rm.decl);
        }
    }
    return out;
}

// Roots of every exact class in the extent of `cls` that carry all `attrs`.
std::vector<RelationRef> extent_roots(const Catalog& cat, const std::string& cls, const std::vector<std::string>& attrs,
                                      const std::vector<std::string>& as) {
    std::vector<RelationRef> out;
    if (!cat.contains(cls)) return out;
    for (const auto& e : cat.extent_classes(cls)) {
        if (!root_exists(cat, e)) continue;
        bool all = true;
        for (const auto& a : attrs) {
            if (a != kOid && !stored(cat, e, a)) all = false;
        }
        if (all) out.push_back({root_relation(e), as});
    }
    return out;
}

ForeignKey reference_key(const Catalog& cat, const std::string& attr, const std::string& target, const std::string& label) {
    return {{attr}, extent_roots(cat, target, {kOid}, {kOid}), label};
}

} // namespace

std::string root_relation(const std::string& cls) { return cls + "@obj"; }
std::string child_relation(const std::string& cls, const std::string& member) { return cls + "@" + member; }

std::vector<kernel::StoredRelation> derive_storage(const Catalog& cat, const std::string& cls, catalog::ClassStorage* names) {
    std::vector<kernel::StoredRelation> out;
    catalog::ClassStorage cs;
    if (!root_exists(cat, cls)) {
        if (names) *names = cs;
        return out;
    }
    const std::string root = root_relation(cls);
    cs.root = root;

    std::vector<Attribute> attrs{{kOid, Kind::ref(cls)}};
    std::vector<ForeignKey> fks;
    std::set<std::string> present;
    for (const MemberDecl* m : root_members(cat, cls)) {
        attrs.push_back({m->name, attribute_kind(*m)});
        present.insert(m->name);
        cs.members[m->name] = {root, m->name};
        if (m->form == Form::Reference) fks.push_back(reference_key(cat, m->name, m->target, root + "." + m->name));
    }
    std::vector<kernel::Key> keys;
    for (const auto& c : cat.lineage(cls)) {
        const auto& k = cat.at(c).key;
        if (k.empty()) continue;
        bool all = std::all_of(k.begin(), k.end(), [&](const std::string& a) { return present.count(a) > 0; });
        kernel::Key key{k, true};
        if (all && std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);
    }
    keys.push_back({{kOid}, false});
    kernel::Relation rel{kernel::Header(attrs), keys};
    out.push_back({root, std::move(rel), std::move(fks)});

    for (const auto& rm : cat.resolve_interface(cls)) {
        if (rm.form() != Form::SetOf || !stored(cat, cls, rm.name())) continue;
        const MemberDecl& m = *rm.decl;
        const std::string name = child_relation(cls, m.name);
        std::vector<Attribute> cattrs{{kOid, Kind::ref(cls)}};
        std::vector<ForeignKey> cfks{{{kOid}, {{root, {kOid}}}, name + ".#oid"}};
        for (const auto& n : m.members) {
            cattrs.push_back({n.name, attribute_kind(n)});
            if (n.form == Form::Reference) cfks.push_back(reference_key(cat, n.name, n.target, name + "." + n.name));
        }
        for (const auto& c : cat.lineage(cls)) {
            for (const auto& r : cat.at(c).references) {
                if (r.component != m.name) continue;
                cfks.push_back({r.attributes, extent_roots(cat, r.target_class, r.target_attributes, r.target_attributes),
                                name + "(" + r.attributes.front() + ") -> " + r.target_class});
            }
        }
        std::vector<kernel::Key> ckeys;
        if (!m.key.empty()) {
            std::vector<std::string> k{kOid};
            k.insert(k.end(), m.key.begin(), m.key.end());
            ckeys.push_back({k, false});
        }
        out.push_back({name, kernel::Relation(kernel::Header(cattrs), ckeys), std::move(cfks)});
        cs.members[m.name] = {name, ""};
    }
    if (names) *names = std::move(cs);
    return out;
}

StorageSchema derive_storage(const Catalog& cat) {
    StorageSchema s;
    for (const auto& cls : cat.class_names()) {
        catalog::ClassStorage cs;
        auto rels = derive_storage(cat, cls, &cs);
        for (auto& r : rels) s.relations.push_back(std::move(r));
        s.names[cls] = std::move(cs);
    }
    for (const auto& cls : cat.class_names()) {
        const auto& key = cat.at(cls).key;
        if (key.empty()) continue;
        auto members = extent_roots(cat, cls, key, key);
        if (members.size() > 1) s.shared_keys.push_back({std::move(members), cls + " key"});
    }
    return s;
}

catalog::NameEntry storage_for(const Database& db, const std::string& cls, const std::string& member) {
    if (!db.catalog.find_member(cls, member)) fail(ErrorCode::UnknownMember, "class " + cls + " has no member " + member);
    auto it = db.catalog.names().find(cls);
    if (it != db.catalog.names().end()) {
        auto m = it->second.members.find(member);
        if (m != it->second.members.end()) return m->second;
    }
    fail(ErrorCode::NotStored, cls + "." + member + " is not stored");
}

bool has_root(const Database& db, const std::string& cls) {
    auto it = db.catalog.names().find(cls);
    return it != db.catalog.names().end() && !it->second.root.empty();
}

void rebuild(Database& db) {
    StorageSchema next = derive_storage(db.catalog);
    std::set<std::string> wanted;
    for (const auto& r : next.relations) wanted.insert(r.name);

    for (const auto& [name, old] : db.store.relations()) {
        if (!wanted.count(name) && !old.relation.empty()) {
            fail(ErrorCode::StoredDataLoss, "relation " + name + " holds data and would be dropped");
        }
    }
    kernel::RelationStore fresh;
    for (auto& r : next.relations) {
        if (db.store.contains(r.name)) {
            const auto& old = db.store.at(r.name).relation;
            const auto& h = r.relation.header();
            std::vector<std::optional<std::size_t>> from;
            for (const auto& a : h) from.push_back(old.header().find(a.name));
            for (std::size_t i = 0; i < old.header().size(); ++i) {
                if (h.contains(old.header()[i].name)) continue;
                for (const auto& t : old) {
                    if (!is_null(t[i])) {
                        fail(ErrorCode::StoredDataLoss,
                             "attribute " + r.name + "." + old.header()[i].name + " holds data and would be dropped");
                    }
                }
            }
            for (const auto& t : old) {
                Tuple nt;
                for (const auto& f : from) nt.push_back(f ? t[*f] : Value{Null{}});
                r.relation.insert(std::move(nt));
            }
        }
        fresh.create(std::move(r));
    }
    fresh.set_shared_keys(std::move(next.shared_keys));
    fresh.check();
    db.store = std::move(fresh);
    db.catalog.set_names(std::move(next.names));
}

} // namespace rxo::schema
