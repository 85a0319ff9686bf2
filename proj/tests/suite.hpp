#pragma once

// D0 query templates with oracle-computed expectations, shared by the query
// tests, the store tests and the acceptance run.

#include "oracle.hpp"

#include <functional>

namespace rxo::suite {

using kernel::Relation;
using Form = syntax::MemberDecl::Form;

inline const Kind kStr = Kind::string();
inline const Kind kInt = Kind::integer();

struct Template {
    std::string text;
    std::function<Relation(const oracle::Graph&)> expected;
};

inline const oracle::Object* obj(const oracle::Graph& g, const Value& ref) { return g.get(ref); }

inline std::vector<Template> templates() {
    std::vector<Template> out;
    for (const char* art : {"A0", "A1"}) {
        out.push_back({std::string("SELECT .Name, .Bank.Name FROM GOODS[.Art = \"") + art + "\"].Turnover.Cntr;",
                       [art](const oracle::Graph& g) {
                           Relation r{kernel::Header({{".Name", kStr}, {".Bank.Name", kStr}})};
                           for (auto gd : g.goods()) {
                               if (!values_equal(g.objects.at(gd).attrs.at("Art"), oracle::text(art))) continue;
                               for (const auto& row : g.turnover(gd)) {
                                   const auto* c = obj(g, row.at("Cntr"));
                                   if (!c) continue;
                                   r.insert({c->attrs.at("Name"), g.attr(c->attrs.at("Bank"), "Name")});
                               }
                           }
                           return r;
                       }});
    }
    for (const char* name : {"TheShop", "Third"}) {
        out.push_back({std::string("SELECT .Art, .Pieces FROM GOODS[.Turnover.Cntr.Name = \"") + name + "\"];",
                       [name](const oracle::Graph& g) {
                           Relation r{kernel::Header({{".Art", kStr}, {".Pieces", kInt}})};
                           for (auto gd : g.goods()) {
                               bool hit = false;
                               for (const auto& row : g.turnover(gd)) {
                                   hit = hit || values_equal(g.attr(row.at("Cntr"), "Name"), oracle::text(name));
                               }
                               if (hit) r.insert({g.objects.at(gd).attrs.at("Art"), Value{g.pieces(gd)}});
                           }
                           return r;
                       }});
    }
    out.push_back({"SELECT .DocN, .Cntr.Name FROM DOCS[.Items.Pieces > 4];", [](const oracle::Graph& g) {
                       Relation r{kernel::Header({{".DocN", kStr}, {".Cntr.Name", kStr}})};
                       for (auto d : g.docs()) {
                           bool hit = false;
                           for (const auto& item : g.items(d)) {
                               const auto* p = std::get_if<std::int64_t>(&item.at("Pieces"));
                               hit = hit || (p && *p > 4);
                           }
                           const auto& o = g.objects.at(d);
                           if (hit) r.insert({o.attrs.at("DocN"), g.attr(o.attrs.at("Cntr"), "Name")});
                       }
                       return r;
                   }});
    out.push_back({"SELECT .Cntr.Name, SUM(.Items.Pieces) AS P FROM DOCS GROUP BY .Cntr.Name;", [](const oracle::Graph& g) {
                       std::map<Value, std::optional<std::int64_t>, ValueLess> sums;
                       for (auto d : g.docs()) {
                           auto& s = sums[g.attr(g.objects.at(d).attrs.at("Cntr"), "Name")];
                           for (const auto& item : g.items(d)) {
                               if (const auto* p = std::get_if<std::int64_t>(&item.at("Pieces"))) s = s.value_or(0) + *p;
                           }
                       }
                       Relation r{kernel::Header({{".Cntr.Name", kStr}, {"P", kInt}})};
                       for (const auto& [k, s] : sums) r.insert({k, s ? Value{*s} : Value{Null{}}});
                       return r;
                   }});
    out.push_back({"SELECT .Art, COUNT(*) AS N FROM DOCS.Items GROUP BY .Art;", [](const oracle::Graph& g) {
                       std::map<Value, std::int64_t, ValueLess> counts;
                       for (auto d : g.docs()) {
                           for (const auto& item : g.items(d)) ++counts[item.at("Art")];
                       }
                       Relation r{kernel::Header({{".Art", kStr}, {"N", kInt}})};
                       for (const auto& [k, n] : counts) r.insert({k, Value{n}});
                       return r;
                   }});
    out.push_back({"SELECT COUNT(*) AS N, MAX(.Pieces) AS M FROM GOODS;", [](const oracle::Graph& g) {
                       std::int64_t n = 0;
                       std::optional<std::int64_t> m;
                       for (auto gd : g.goods()) {
                           ++n;
                           m = std::max(m.value_or(g.pieces(gd)), g.pieces(gd));
                       }
                       Relation r{kernel::Header({{"N", kInt}, {"M", kInt}})};
                       r.insert({Value{n}, m ? Value{*m} : Value{Null{}}});
                       return r;
                   }});
    out.push_back({"SELECT .Name FROM CONTRACTORS[.Bank.Name = \"B0\"];", [](const oracle::Graph& g) {
                       Relation r{kernel::Header({{".Name", kStr}})};
                       for (auto c : g.extent({"CONTRACTORS"})) {
                           const auto& o = g.objects.at(c);
                           if (values_equal(g.attr(o.attrs.at("Bank"), "Name"), oracle::text("B0"))) r.insert({o.attrs.at("Name")});
                       }
                       return r;
                   }});
    out.push_back({"SELECT .Art, .Pieces FROM SALES.Items;", [](const oracle::Graph& g) {
                       Relation r{kernel::Header({{".Art", kStr}, {".Pieces", kInt}})};
                       for (auto d : g.extent({"SALES"})) {
                           for (const auto& item : g.items(d)) r.insert({item.at("Art"), item.at("Pieces")});
                       }
                       return r;
                   }});
    return out;
}


// The same database with every calculated component replaced by a stored
// copy of its current values.
inline Database materialize(const Database& db) {
    std::string ddl = test::read_data("d0.rxo");
    ddl = ddl.substr(0, ddl.find("NEW CONTRACTORS"));
    Database out;
    std::vector<std::pair<std::string, std::string>> calculated;
    for (auto st : syntax::parse_script(ddl)) {
        if (auto* a = std::get_if<syntax::AlterRealize>(&st.node)) {
            const auto* rm = db.catalog.find_member(a->class_name, a->targets.front().member);
            if (a->body != syntax::RealizationBody::Stored && rm->form() != Form::Method) {
                for (const auto& t : a->targets) calculated.push_back({a->class_name, t.member});
                // Inherits stored storage already.
                if (out.catalog.active(a->class_name, a->targets.front().member)) continue;
                a->body = syntax::RealizationBody::Stored;
                a->query.reset();
                a->procedure.reset();
            }
        }
        runtime::execute(out, st);
    }
    query::Evaluator ev(db);
    std::map<std::pair<std::string, std::string>, std::map<Value, Value, ValueLess>> scalars;
    for (const auto& [cls, member] : calculated) {
        for (const auto& exact : db.catalog.extent_classes(cls)) {
            if (!schema::has_root(db, exact)) continue;
            const auto& rm = *db.catalog.find_member(exact, member);
            const auto& values = ev.exact_member_values(exact, *rm.decl);
            if (rm.form() == Form::SetOf) {
                auto& rel = out.store.at(schema::child_relation(exact, member)).relation;
                for (const auto& t : values) rel.insert(t);
            } else {
                for (const auto& t : values) scalars[{exact, member}][t[0]] = t[1];
            }
        }
    }
    for (const auto& [name, sr] : db.store.relations()) {
        auto& target = out.store.at(name).relation;
        const auto& h = target.header();
        for (const auto& t : sr.relation) {
            Tuple nt;
            for (const auto& a : h) {
                if (auto idx = sr.relation.header().find(a.name)) {
                    nt.push_back(t[*idx]);
                    continue;
                }
                const std::string cls = name.substr(0, name.find('@'));
                auto& m = scalars[{cls, a.name}];
                auto it = m.find(t[0]);
                nt.push_back(it == m.end() ? Value{Null{}} : it->second);
            }
            target.insert(std::move(nt));
        }
    }
    out.last_oid = db.last_oid;
    out.store.check();
    return out;
}


/// Every template evaluated on `db`.
inline std::vector<Relation> results(const Database& db) {
    std::vector<Relation> out;
    for (const auto& t : templates()) out.push_back(test::select(db, t.text));
    return out;
}

} // namespace rxo::suite
