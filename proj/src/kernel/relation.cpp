#include "rxo/kernel/relation.hpp"

#include <algorithm>
#include <cmath>

namespace rxo::kernel {

Header::Header(std::vector<Attribute> attributes) : attributes_(std::move(attributes)) {
    if (attributes_.empty()) fail(ErrorCode::HeaderMismatch, "relation header must not be empty");
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        for (std::size_t j = i + 1; j < attributes_.size(); ++j) {
            if (attributes_[i].name == attributes_[j].name) {
                fail(ErrorCode::DuplicateAttribute, "duplicate attribute '" + attributes_[i].name + "'");
            }
        }
    }
}

std::optional<std::size_t> Header::find(const std::string& name) const {
    for (std::size_t i = 0; i < attributes_.size(); ++i) {
        if (attributes_[i].name == name) return i;
    }
    return std::nullopt;
}

std::size_t Header::index_of(const std::string& name) const {
    if (auto i = find(name)) return *i;
    fail(ErrorCode::UnknownAttribute, "unknown attribute '" + name + "'");
}

std::vector<std::string> Header::names() const {
    std::vector<std::string> out;
    out.reserve(attributes_.size());
    for (const auto& a : attributes_) out.push_back(a.name);
    return out;
}

void check_conforms(const Header& header, const Tuple& t) {
    if (t.size() != header.size()) {
        fail(ErrorCode::KindMismatch, "tuple arity " + std::to_string(t.size()) + " does not match header arity " +
                                          std::to_string(header.size()));
    }
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!conforms(t[i], header[i].kind)) {
            fail(ErrorCode::KindMismatch, "value " + display(t[i]) + " does not conform to " + header[i].name + ":" +
                                              to_string(header[i].kind));
        }
        if (std::holds_alternative<double>(t[i]) && std::isnan(std::get<double>(t[i]))) {
            fail(ErrorCode::InvalidValue, "NaN is not a valid FLOAT value");
        }
    }
}

Relation::Relation(Header header, std::vector<Key> keys) : header_(std::move(header)) {
    set_keys(std::move(keys));
}

void Relation::set_keys(std::vector<Key> keys) {
    for (const auto& k : keys) {
        for (const auto& a : k.attributes) header_.index_of(a);
    }
    keys_ = std::move(keys);
}

bool Relation::insert(Tuple t) {
    check_conforms(header_, t);
    return body_.insert(std::move(t)).second;
}

std::optional<std::string> Relation::key_violation() const {
    for (const auto& key : keys_) {
        std::vector<std::size_t> idx;
        for (const auto& a : key.attributes) idx.push_back(header_.index_of(a));
        std::set<Tuple, TupleLess> seen;
        for (const auto& t : body_) {
            Tuple k;
            bool has_null = false;
            for (auto i : idx) {
                has_null = has_null || is_null(t[i]);
                k.push_back(t[i]);
            }
            if (has_null) {
                if (key.nullable) continue;
                return "NULL in key attribute of tuple " + format_tuple(t);
            }
            if (!seen.insert(k).second) return "duplicate key " + format_tuple(k);
        }
    }
    return std::nullopt;
}

std::vector<Tuple> Relation::canonical_rows() const {
    std::vector<Tuple> rows(body_.begin(), body_.end());
    if (keys_.empty()) return rows;
    std::vector<std::size_t> idx;
    for (const auto& a : keys_.front().attributes) idx.push_back(header_.index_of(a));
    std::stable_sort(rows.begin(), rows.end(), [&](const Tuple& a, const Tuple& b) {
        for (auto i : idx) {
            auto c = compare_values(a[i], b[i]);
            if (c != 0) return c < 0;
        }
        return false;
    });
    return rows;
}

std::string format_tuple(const Tuple& t) {
    std::string out = "(";
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (i) out += ", ";
        out += std::holds_alternative<std::string>(t[i]) ? "\"" + display(t[i]) + "\"" : display(t[i]);
    }
    return out + ")";
}

} // namespace rxo::kernel
