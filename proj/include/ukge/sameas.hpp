#pragma once
// sameAs closure and entity canonicalization.
//
// Alignment pairs are treated as symmetric and transitive: a disjoint-set
// union over all pairs yields closure classes, and every member of a class
// canonicalizes to the lexicographically smallest member. This keeps the
// mapping deterministic and independent of the order links arrive in.

#include <algorithm>
#include <cstdint>
#include <istream>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/ntriples.hpp"

namespace ukge {

inline constexpr std::string_view kSameAsIri = "http://www.w3.org/2002/07/owl#sameAs";

// Union-find over dense ids, union by size with path halving.
class DisjointSet {
public:
    std::uint32_t make() {
        auto id = static_cast<std::uint32_t>(parent_.size());
        parent_.push_back(id);
        size_.push_back(1);
        return id;
    }

    std::uint32_t find(std::uint32_t x) {
        while (parent_[x] != x) {
            parent_[x] = parent_[parent_[x]];
            x = parent_[x];
        }
        return x;
    }

    void unite(std::uint32_t a, std::uint32_t b) {
        a = find(a);
        b = find(b);
        if (a == b) return;
        if (size_[a] < size_[b]) std::swap(a, b);
        parent_[b] = a;
        size_[a] += size_[b];
    }

    std::size_t size() const { return parent_.size(); }

private:
    std::vector<std::uint32_t> parent_;
    std::vector<std::uint32_t> size_;
};

struct SameAsStats {
    std::uint64_t statements = 0;      // accepted sameAs statements, duplicates included
    std::uint64_t distinct_pairs = 0;  // distinct unordered alignment pairs
    std::uint64_t self_links = 0;      // x sameAs x, ignored
    std::uint64_t other_predicate = 0; // well-formed statements with a different predicate
    std::uint64_t classes = 0;         // closure classes of size >= 2
    std::uint64_t largest_class = 0;
    std::uint64_t multi_matched = 0;   // IRIs aligned to >= 2 distinct partners
    ParseStats parse;
};

class SameAsMap {
public:
    void add_pair(std::string_view a, std::string_view b) {
        if (finalized_) throw DataError("SameAsMap: add_pair after finalize");
        ++statements_;
        if (a == b) {
            ++self_links_;
            return;
        }
        std::uint32_t ia = intern(a);
        std::uint32_t ib = intern(b);
        pairs_.insert(ia < ib ? std::make_pair(ia, ib) : std::make_pair(ib, ia));
        dsu_.unite(ia, ib);
    }

    // Builds the per-class member lists (lexicographically sorted). Must be
    // called once after the last add_pair.
    void finalize() {
        if (finalized_) return;
        finalized_ = true;
        root_of_.resize(dsu_.size());
        for (std::uint32_t i = 0; i < dsu_.size(); ++i) {
            root_of_[i] = dsu_.find(i);
            classes_[root_of_[i]].push_back(i);
        }
        for (auto& [root, members] : classes_)
            std::sort(members.begin(), members.end(),
                      [&](std::uint32_t x, std::uint32_t y) { return iris_.name(x) < iris_.name(y); });
    }

    bool contains(std::string_view iri) const { return iris_.find(iri).has_value(); }

    // Lexicographically smallest member of iri's closure class; iri itself
    // when it appears in no alignment pair.
    std::string_view canonical(std::string_view iri) const {
        const auto* members = class_ids(iri);
        if (!members) return iri;
        return iris_.name(members->front());
    }

    // All members of iri's closure class including iri, lex-sorted; just
    // {iri} when unaligned.
    std::vector<std::string_view> class_members(std::string_view iri) const {
        const auto* members = class_ids(iri);
        if (!members) return {iri};
        std::vector<std::string_view> out;
        out.reserve(members->size());
        for (std::uint32_t id : *members) out.push_back(iris_.name(id));
        return out;
    }

    // Class members other than iri itself.
    std::vector<std::string_view> counterparts(std::string_view iri) const {
        std::vector<std::string_view> out = class_members(iri);
        std::erase(out, iri);
        return out;
    }

    SameAsStats stats() const {
        require_finalized();
        SameAsStats s;
        s.statements = statements_;
        s.distinct_pairs = pairs_.size();
        s.self_links = self_links_;
        std::unordered_map<std::uint32_t, std::uint32_t> partners;
        for (const auto& [a, b] : pairs_) {
            ++partners[a];
            ++partners[b];
        }
        for (const auto& [id, n] : partners)
            if (n >= 2) ++s.multi_matched;
        for (const auto& [root, members] : classes_) {
            if (members.size() < 2) continue;
            ++s.classes;
            s.largest_class = std::max<std::uint64_t>(s.largest_class, members.size());
        }
        return s;
    }

    std::uint64_t num_statements() const { return statements_; }
    std::uint64_t num_distinct_pairs() const { return pairs_.size(); }

    // Internal access for the fusion loop: sorted member names of the class,
    // nullptr when unaligned.
    const std::vector<std::uint32_t>* class_ids(std::string_view iri) const {
        require_finalized();
        auto id = iris_.find(iri);
        if (!id) return nullptr;
        auto it = classes_.find(root_of_[*id]);
        return it == classes_.end() ? nullptr : &it->second;
    }

    const std::string& iri_name(std::uint32_t id) const { return iris_.name(id); }

private:
    std::uint32_t intern(std::string_view s) {
        std::uint32_t id = iris_.intern(s);
        while (dsu_.size() <= id) dsu_.make();  // keep the union-find in step
        return id;
    }

    void require_finalized() const {
        if (!finalized_) throw DataError("SameAsMap: finalize() not called");
    }

    Interner iris_;
    DisjointSet dsu_;
    std::set<std::pair<std::uint32_t, std::uint32_t>> pairs_;
    std::vector<std::uint32_t> root_of_;
    std::unordered_map<std::uint32_t, std::vector<std::uint32_t>> classes_;
    std::uint64_t statements_ = 0;
    std::uint64_t self_links_ = 0;
    bool finalized_ = false;
};

// Reads alignment links from an N-Triples stream. Statements whose predicate
// is not owl:sameAs are counted and skipped.
inline SameAsMap load_sameas(std::istream& in, SameAsStats* stats_out = nullptr,
                             ParseMode mode = ParseMode::lenient) {
    SameAsMap m;
    std::uint64_t other = 0;
    ParseStats parse = parse_ntriples(
        in,
        [&](std::string_view s, std::string_view p, std::string_view o) {
            if (p == kSameAsIri)
                m.add_pair(s, o);
            else
                ++other;
        },
        mode);
    m.finalize();
    if (stats_out) {
        *stats_out = m.stats();
        stats_out->other_predicate = other;
        stats_out->parse = parse;
    }
    return m;
}

}  // namespace ukge
