#include "rxo/catalog/catalog.hpp"

#include <algorithm>
#include <set>

namespace rxo::catalog {

namespace {

using Form = MemberDecl::Form;

std::string qualified(const std::string& cls, const std::string& member) { return cls + "." + member; }

bool is_attribute(const MemberDecl& m) { return m.form == Form::Scalar || m.form == Form::Reference; }

rxo::Kind attribute_kind(const MemberDecl& m) {
    return m.form == Form::Reference ? rxo::Kind::ref(m.target) : rxo::Kind{m.scalar, {}};
}

const MemberDecl* find_in(const std::vector<MemberDecl>& ms, const std::string& name) {
    for (const auto& m : ms) {
        if (m.name == name) return &m;
    }
    return nullptr;
}

void validate_set_member(const std::string& cls, const MemberDecl& m) {
    std::set<std::string> seen;
    for (const auto& n : m.members) {
        if (!is_attribute(n)) {
            throw Error(ErrorCode::Unsupported,
                        qualified(cls, m.name) + ": set-of members may only contain scalars and references", n.pos);
        }
        if (!seen.insert(n.name).second) {
            throw Error(ErrorCode::MemberCollision, qualified(cls, m.name) + ": duplicate attribute " + n.name, n.pos);
        }
    }
    std::set<std::string> key_seen;
    for (const auto& k : m.key) {
        if (!seen.count(k)) throw Error(ErrorCode::UnknownMember, qualified(cls, m.name) + ": key names unknown attribute " + k, m.pos);
        if (!key_seen.insert(k).second) throw Error(ErrorCode::MemberCollision, qualified(cls, m.name) + ": key repeats " + k, m.pos);
    }
}

} // namespace

std::vector<const MemberDecl*> members_at(const Catalog& cat, const Node& node) {
    std::vector<const MemberDecl*> out;
    if (node.kind == Node::Kind::Object) {
        for (const auto& rm : cat.resolve_interface(node.cls)) out.push_back(rm.decl);
    } else if (node.kind == Node::Kind::Row) {
        for (const auto& m : node.set->members) out.push_back(&m);
    }
    return out;
}

Node step_node(const Node& from, const MemberDecl& member) {
    Node n;
    switch (member.form) {
    case Form::Scalar:
        n.kind = Node::Kind::Scalar;
        n.scalar = attribute_kind(member);
        break;
    case Form::Reference:
        n.kind = Node::Kind::Object;
        n.cls = member.target;
        break;
    case Form::SetOf:
        n.kind = Node::Kind::Row;
        n.cls = from.cls;
        n.set = &member;
        break;
    case Form::Method: fail(ErrorCode::NotTraversable, "method " + member.name + " cannot be used in a path");
    }
    return n;
}

void Catalog::define_class(const syntax::CreateClass& decl) {
    if (contains(decl.name)) fail(ErrorCode::DuplicateClass, "class " + decl.name + " already exists");
    auto spec = std::make_shared<ClassSpec>();
    spec->name = decl.name;
    spec->parents = decl.parents;
    spec->members = decl.members;
    spec->key = decl.key;
    spec->references = decl.references;

    for (const auto& p : decl.parents) {
        if (p == decl.name) fail(ErrorCode::CyclicInheritance, "class " + decl.name + " cannot extend itself");
        auto it = classes_.find(p);
        if (it == classes_.end()) fail(ErrorCode::UnknownParent, "unknown parent class " + p);
        spec->parent_specs.push_back(it->second);
    }

    // Parents first, in EXTEND order; a declaration reached twice is kept once.
    for (const auto& parent : spec->parent_specs) {
        for (const auto& rm : parent->interface) {
            auto same = std::find_if(spec->interface.begin(), spec->interface.end(),
                                     [&](const ResolvedMember& x) { return x.name() == rm.name(); });
            if (same == spec->interface.end()) {
                spec->interface.push_back(rm);
            } else if (same->decl != rm.decl) {
                fail(ErrorCode::AmbiguousMember, "member " + rm.name() + " of " + decl.name + " is declared by both " +
                                                     same->origin + " and " + rm.origin);
            }
        }
    }
    for (const auto& m : spec->members) {
        bool clash = std::any_of(spec->interface.begin(), spec->interface.end(),
                                 [&](const ResolvedMember& x) { return x.name() == m.name; });
        if (clash) throw Error(ErrorCode::MemberCollision, "member " + qualified(decl.name, m.name) + " collides", m.pos);
        if (m.form == Form::SetOf) validate_set_member(decl.name, m);
        if (m.form == Form::Method) {
            std::set<std::string> seen;
            for (const auto& p : m.params) {
                if (!seen.insert(p.name).second) {
                    throw Error(ErrorCode::MemberCollision, qualified(decl.name, m.name) + ": duplicate parameter " + p.name, m.pos);
                }
            }
        }
        spec->interface.push_back({&m, decl.name});
    }

    auto lookup = [&](const std::string& name) -> const MemberDecl* {
        for (const auto& rm : spec->interface) {
            if (rm.name() == name) return rm.decl;
        }
        return nullptr;
    };
    for (const auto& k : spec->key) {
        const MemberDecl* m = lookup(k);
        if (!m) fail(ErrorCode::UnknownMember, "class key names unknown member " + k);
        if (!is_attribute(*m)) fail(ErrorCode::KindMismatch, "class key member " + k + " must be a scalar or reference");
    }
    for (const auto& r : spec->references) {
        const MemberDecl* comp = lookup(r.component);
        if (!comp || comp->form != Form::SetOf) {
            throw Error(ErrorCode::UnknownComponent, "REFERENCE needs a set-of component, got " + r.component, r.pos);
        }
        auto target = classes_.find(r.target_class);
        if (target == classes_.end()) throw Error(ErrorCode::UnknownClass, "unknown class " + r.target_class, r.pos);
        if (r.attributes.size() != r.target_attributes.size() || r.attributes.empty()) {
            throw Error(ErrorCode::KindMismatch, "REFERENCE attribute lists differ in length", r.pos);
        }
        for (std::size_t i = 0; i < r.attributes.size(); ++i) {
            const MemberDecl* local = find_in(comp->members, r.attributes[i]);
            if (!local) throw Error(ErrorCode::UnknownMember, "unknown attribute " + r.component + "." + r.attributes[i], r.pos);
            const MemberDecl* remote = nullptr;
            for (const auto& rm : target->second->interface) {
                if (rm.name() == r.target_attributes[i]) remote = rm.decl;
            }
            if (!remote || !is_attribute(*remote)) {
                throw Error(ErrorCode::UnknownMember, "unknown attribute " + qualified(r.target_class, r.target_attributes[i]), r.pos);
            }
            if (!(attribute_kind(*local) == attribute_kind(*remote))) {
                throw Error(ErrorCode::KindMismatch, "REFERENCE attribute kinds differ for " + r.attributes[i], r.pos);
            }
        }
    }

    // Pointers in `interface` for own members refer into spec->members, which is never resized again.
    classes_.emplace(decl.name, std::move(spec));
    order_.push_back(decl.name);
}

const ClassSpec& Catalog::at(const std::string& cls) const {
    auto it = classes_.find(cls);
    if (it == classes_.end()) fail(ErrorCode::UnknownClass, "unknown class " + cls);
    return *it->second;
}

const std::vector<ResolvedMember>& Catalog::resolve_interface(const std::string& cls) const { return at(cls).interface; }

const ResolvedMember* Catalog::find_member(const std::string& cls, const std::string& member) const {
    for (const auto& rm : resolve_interface(cls)) {
        if (rm.name() == member) return &rm;
    }
    return nullptr;
}

std::vector<std::string> Catalog::lineage(const std::string& cls) const {
    std::vector<std::string> out;
    std::set<std::string> seen;
    auto visit = [&](auto&& self, const ClassSpec& spec) -> void {
        if (!seen.insert(spec.name).second) return;
        out.push_back(spec.name);
        for (const auto& p : spec.parent_specs) self(self, *p);
    };
    visit(visit, at(cls));
    return out;
}

bool Catalog::is_a(const std::string& cls, const std::string& ancestor) const {
    if (!contains(cls)) return false;
    auto l = lineage(cls);
    return std::find(l.begin(), l.end(), ancestor) != l.end();
}

std::vector<std::string> Catalog::extent_classes(const std::string& cls) const {
    at(cls);
    std::vector<std::string> out;
    for (const auto& c : order_) {
        if (is_a(c, cls)) out.push_back(c);
    }
    return out;
}

void Catalog::register_realization(const std::string& cls, const std::string& member,
                                   const std::optional<std::vector<syntax::Param>>& params, Realization r) {
    const ResolvedMember* rm = find_member(cls, member);
    if (!rm) fail(ErrorCode::UnknownMember, "class " + cls + " has no member " + member);
    const MemberDecl& m = *rm->decl;
    using syntax::RealizationBody;
    if (m.form == Form::Method) {
        if (r.body != RealizationBody::Procedure) fail(ErrorCode::KindMismatch, "method " + member + " needs a procedure body");
        if (!params) fail(ErrorCode::KindMismatch, "method " + member + " must be realized with its parameter list");
        bool same = params->size() == m.params.size();
        for (std::size_t i = 0; same && i < m.params.size(); ++i) {
            same = (*params)[i].name == m.params[i].name && (*params)[i].kind == m.params[i].kind;
        }
        if (!same) fail(ErrorCode::KindMismatch, "parameter list of " + member + " does not match its declaration");
    } else {
        if (params) fail(ErrorCode::KindMismatch, "component " + member + " takes no parameter list");
        if (m.form == Form::SetOf && r.body == RealizationBody::Procedure) {
            fail(ErrorCode::Unsupported, "set-of component " + member + " cannot be realized by a procedure");
        }
        auto check_target = [&](const MemberDecl& a) {
            if (a.form == Form::Reference && !contains(a.target)) fail(ErrorCode::UnknownClass, "unknown class " + a.target);
        };
        check_target(m);
        for (const auto& n : m.members) check_target(n);
    }
    if (r.body == RealizationBody::Stored) {
        auto current = active(cls, member);
        if (current && current->realization->body == RealizationBody::Stored) {
            fail(ErrorCode::AlreadyStored, qualified(cls, member) + " is already stored");
        }
    }
    realizations_[{cls, member}] = std::move(r);
}

const Realization* Catalog::own_realization(const std::string& cls, const std::string& member) const {
    auto it = realizations_.find({cls, member});
    return it == realizations_.end() ? nullptr : &it->second;
}

std::optional<ActiveRealization> Catalog::active(const std::string& cls, const std::string& member) const {
    for (const auto& c : lineage(cls)) {
        if (auto r = own_realization(c, member)) return ActiveRealization{r, c};
    }
    return std::nullopt;
}

bool Catalog::fully_realized(const std::string& cls) const {
    for (const auto& rm : resolve_interface(cls)) {
        if (rm.form() != Form::Method && !active(cls, rm.name())) return false;
    }
    return true;
}

PathDescriptor Catalog::lookup_path(const std::vector<std::string>& segments,
                                    const std::optional<std::string>& context) const {
    if (segments.empty()) fail(ErrorCode::UnknownName, "empty path");
    PathDescriptor d;
    Node node;
    const std::string& first = segments.front();
    std::size_t i = 0;
    if (context) {
        node = Node{Node::Kind::Object, *context, nullptr, {}};
        at(*context);
    } else {
        if (!contains(first)) fail(ErrorCode::UnknownName, "unknown name " + first);
        node = Node{Node::Kind::Object, first, nullptr, {}};
        d.steps.push_back({first, nullptr, node});
        i = 1;
    }
    if (context && !find_member(*context, first) && first != "#") {
        if (!contains(first)) fail(ErrorCode::UnknownName, "unknown name " + first + " in context " + *context);
        node = Node{Node::Kind::Object, first, nullptr, {}};
        d.steps.push_back({first, nullptr, node});
        i = 1;
    }
    for (; i < segments.size(); ++i) {
        const std::string& seg = segments[i];
        if (node.kind == Node::Kind::Scalar) fail(ErrorCode::NotTraversable, "cannot continue past scalar with ." + seg);
        if (seg == "#") {
            if (node.kind != Node::Kind::Object) fail(ErrorCode::NotTraversable, "rows of a set-of component have no OID");
            node = Node{Node::Kind::Scalar, {}, nullptr, rxo::Kind::ref(node.cls)};
            d.steps.push_back({seg, nullptr, node});
            continue;
        }
        const MemberDecl* found = nullptr;
        for (const MemberDecl* m : members_at(*this, node)) {
            if (m->name == seg) found = m;
        }
        if (!found) fail(ErrorCode::UnknownName, "unknown component " + seg);
        node = step_node(node, *found);
        if (node.kind == Node::Kind::Object && !contains(node.cls)) fail(ErrorCode::UnknownClass, "unknown class " + node.cls);
        d.steps.push_back({seg, found, node});
    }
    return d;
}

} // namespace rxo::catalog
