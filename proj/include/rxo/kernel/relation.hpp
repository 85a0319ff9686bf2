#pragma once

#include "rxo/error.hpp"
#include "rxo/kernel/value.hpp"

#include <optional>
#include <set>
#include <string>
#include <vector>

namespace rxo::kernel {

struct Attribute {
    std::string name;
    Kind kind;

    friend bool operator==(const Attribute&, const Attribute&) = default;
};

/// Ordered, non-empty list of uniquely named attributes.
class Header {
public:
    Header() = default;
    explicit Header(std::vector<Attribute> attributes);

    std::size_t size() const noexcept { return attributes_.size(); }
    const Attribute& operator[](std::size_t i) const { return attributes_[i]; }
    auto begin() const { return attributes_.begin(); }
    auto end() const { return attributes_.end(); }
    const std::vector<Attribute>& attributes() const noexcept { return attributes_; }

    std::optional<std::size_t> find(const std::string& name) const;
    std::size_t index_of(const std::string& name) const; // throws UnknownAttribute
    bool contains(const std::string& name) const { return find(name).has_value(); }
    std::vector<std::string> names() const;

    friend bool operator==(const Header&, const Header&) = default;

private:
    std::vector<Attribute> attributes_;
};

/// Uniqueness over a subset of attributes. A nullable key only constrains
/// tuples whose key attributes are all non-NULL; a non-nullable key also
/// forbids NULL in its attributes.
struct Key {
    std::vector<std::string> attributes;
    bool nullable = false;

    friend bool operator==(const Key&, const Key&) = default;
};

using Body = std::set<Tuple, TupleLess>;

class Relation {
public:
    Relation() = default;
    explicit Relation(Header header, std::vector<Key> keys = {});

    const Header& header() const noexcept { return header_; }
    const std::vector<Key>& keys() const noexcept { return keys_; }
    void set_keys(std::vector<Key> keys);

    /// Adds a tuple (set semantics). Returns false when already present.
    /// Keys are not checked here; see key_violation().
    bool insert(Tuple t);
    bool erase(const Tuple& t) { return body_.erase(t) > 0; }
    void clear() { body_.clear(); }

    bool contains(const Tuple& t) const { return body_.count(t) > 0; }
    std::size_t size() const noexcept { return body_.size(); }
    bool empty() const noexcept { return body_.empty(); }
    auto begin() const { return body_.begin(); }
    auto end() const { return body_.end(); }
    const Body& body() const noexcept { return body_; }

    /// Description of the first key violation, if any.
    std::optional<std::string> key_violation() const;

    /// Tuples ordered by the first key (or lexicographically when keyless),
    /// ties broken by the full tuple.
    std::vector<Tuple> canonical_rows() const;

    /// Header and body equality; keys are metadata and not compared.
    friend bool operator==(const Relation& a, const Relation& b) {
        return a.header_ == b.header_ && a.body_ == b.body_;
    }

private:
    Header header_;
    std::vector<Key> keys_;
    Body body_;
};

void check_conforms(const Header& header, const Tuple& t);

std::string format_tuple(const Tuple& t);

} // namespace rxo::kernel
