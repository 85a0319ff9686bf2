#pragma once

#include "rxo/syntax/ast.hpp"

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace rxo::catalog {

using syntax::MemberDecl;

/// A member as seen through a class interface, with the class that declared it.
struct ResolvedMember {
    const MemberDecl* decl = nullptr;
    std::string origin;

    const std::string& name() const { return decl->name; }
    MemberDecl::Form form() const { return decl->form; }
};

struct ClassSpec {
    std::string name;
    std::vector<std::string> parents;
    std::vector<MemberDecl> members;
    std::vector<std::string> key;
    std::vector<syntax::ReferenceClause> references;
    std::vector<std::shared_ptr<const ClassSpec>> parent_specs;
    std::vector<ResolvedMember> interface; // filled by define_class
};

struct Realization {
    syntax::RealizationBody body = syntax::RealizationBody::Stored;
    std::shared_ptr<const syntax::Select> query;
    std::shared_ptr<const syntax::Block> procedure;
};

/// Active realization of a member for a class, with the class that registered it.
struct ActiveRealization {
    const Realization* realization = nullptr;
    std::string owner;
};

/// Binds (class, member) to the relational structure that stores it.
struct NameEntry {
    std::string relation;
    std::string attribute; // empty for set-of members (whole child relation)
};

struct ClassStorage {
    std::string root; // empty when the class has no root relation
    std::map<std::string, NameEntry> members;
};

using NameTable = std::map<std::string, ClassStorage>;

/// Shape of a position reached while walking a path.
struct Node {
    enum class Kind { Object, Row, Scalar };
    Kind kind = Kind::Object;
    std::string cls;                     // Object: class; Row: owning class
    const MemberDecl* set = nullptr;     // Row: the set-of declaration
    rxo::Kind scalar;                    // Scalar
};

struct PathStep {
    std::string segment;
    const MemberDecl* member = nullptr; // null for a class name or '#'
    Node node;                          // node reached after this step
};

struct PathDescriptor {
    std::vector<PathStep> steps;
    const Node& terminal() const { return steps.back().node; }
};

/// Members visible at a node (class interface or set-of nested members).
std::vector<const MemberDecl*> members_at(const class Catalog& cat, const Node& node);

/// Node reached by stepping from `from` through `member`; throws NotTraversable for methods.
Node step_node(const Node& from, const MemberDecl& member);

class Catalog {
public:
    void define_class(const syntax::CreateClass& decl);

    bool contains(const std::string& cls) const { return classes_.count(cls) > 0; }
    const ClassSpec& at(const std::string& cls) const;
    const std::vector<std::string>& class_names() const { return order_; }
    std::size_t size() const { return order_.size(); }

    const std::vector<ResolvedMember>& resolve_interface(const std::string& cls) const;
    const ResolvedMember* find_member(const std::string& cls, const std::string& member) const;

    /// True when `cls` is `ancestor` or one of its descendants.
    bool is_a(const std::string& cls, const std::string& ancestor) const;
    /// `cls` and all its descendants in definition order.
    std::vector<std::string> extent_classes(const std::string& cls) const;
    /// `cls` followed by its ancestors in depth-first EXTEND order, without repeats.
    std::vector<std::string> lineage(const std::string& cls) const;

    /// Validates and records a realization. `params` is required for methods.
    void register_realization(const std::string& cls, const std::string& member,
                              const std::optional<std::vector<syntax::Param>>& params, Realization r);
    const Realization* own_realization(const std::string& cls, const std::string& member) const;
    std::optional<ActiveRealization> active(const std::string& cls, const std::string& member) const;
    /// Every non-method member has an active realization.
    bool fully_realized(const std::string& cls) const;

    PathDescriptor lookup_path(const std::vector<std::string>& segments,
                               const std::optional<std::string>& context = std::nullopt) const;

    const NameTable& names() const { return names_; }
    void set_names(NameTable t) { names_ = std::move(t); }

    /// Catalog statements in execution order, replayable.
    const std::vector<syntax::Statement>& ddl_log() const { return log_; }
    void log(syntax::Statement st) { log_.push_back(std::move(st)); }

private:
    std::map<std::string, std::shared_ptr<const ClassSpec>> classes_;
    std::vector<std::string> order_;
    std::map<std::pair<std::string, std::string>, Realization> realizations_;
    NameTable names_;
    std::vector<syntax::Statement> log_;
};

} // namespace rxo::catalog
