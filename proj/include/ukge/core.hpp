#pragma once
// Interned knowledge-graph substrate.
//
// A graph is a duplicate-free list of (head, relation, tail) id triples plus
// two dictionaries mapping IRIs to dense ids. Ids are assigned in first
// appearance order, so building from the same stream always produces the
// same graph bit for bit. Graphs are immutable once built and safe to share
// across threads.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "ukge/errors.hpp"

namespace ukge {

using EntityId = std::uint32_t;
using RelationId = std::uint32_t;

struct Triple {
    EntityId head;
    RelationId relation;
    EntityId tail;

    friend bool operator==(const Triple&, const Triple&) = default;
};

struct TripleHash {
    std::size_t operator()(const Triple& t) const noexcept {
        std::uint64_t h = t.head;
        h = h * 0x9E3779B97F4A7C15ULL + t.relation;
        h = h * 0x9E3779B97F4A7C15ULL + t.tail;
        h ^= h >> 32;
        return static_cast<std::size_t>(h);
    }
};

namespace detail {
struct StringHash {
    using is_transparent = void;
    std::size_t operator()(std::string_view s) const noexcept {
        return std::hash<std::string_view>{}(s);
    }
};
}  // namespace detail

// IRI <-> dense id bijection. Ids are assigned in first-appearance order.
class Interner {
public:
    std::uint32_t intern(std::string_view s) {
        auto it = ids_.find(s);
        if (it != ids_.end()) return it->second;
        if (names_.size() >= 0xFFFFFFFFull)
            throw DataError("dictionary exceeds 32-bit id space");
        auto id = static_cast<std::uint32_t>(names_.size());
        names_.emplace_back(s);
        ids_.emplace(names_.back(), id);
        return id;
    }

    std::optional<std::uint32_t> find(std::string_view s) const {
        auto it = ids_.find(s);
        if (it == ids_.end()) return std::nullopt;
        return it->second;
    }

    const std::string& name(std::uint32_t id) const { return names_[id]; }
    std::size_t size() const { return names_.size(); }
    const std::vector<std::string>& names() const { return names_; }

    friend bool operator==(const Interner& a, const Interner& b) {
        return a.names_ == b.names_;
    }

private:
    std::vector<std::string> names_;
    std::unordered_map<std::string, std::uint32_t, detail::StringHash, std::equal_to<>> ids_;
};

struct KnowledgeGraph {
    Interner entities;
    Interner relations;
    std::vector<Triple> triples;  // first-appearance order, duplicate-free

    std::uint64_t num_entities() const { return entities.size(); }
    std::uint64_t num_relations() const { return relations.size(); }
    std::uint64_t num_triples() const { return triples.size(); }

    const std::string& entity_name(EntityId e) const { return entities.name(e); }
    const std::string& relation_name(RelationId r) const { return relations.name(r); }

    friend bool operator==(const KnowledgeGraph& a, const KnowledgeGraph& b) {
        return a.entities == b.entities && a.relations == b.relations &&
               a.triples == b.triples;
    }
};

// Accumulates IRI triples into a graph. Duplicates collapse; entities and
// relations are interned the first time a kept triple references them.
class GraphBuilder {
public:
    // Returns false when the triple was already present.
    bool add(std::string_view subject, std::string_view predicate, std::string_view object) {
        Triple t{g_.entities.intern(subject), g_.relations.intern(predicate),
                 g_.entities.intern(object)};
        if (!seen_.insert(t).second) return false;
        g_.triples.push_back(t);
        return true;
    }

    KnowledgeGraph finish() {
        seen_.clear();
        return std::move(g_);
    }

private:
    KnowledgeGraph g_;
    std::unordered_set<Triple, TripleHash> seen_;
};

struct GraphStats {
    std::uint64_t num_entities = 0;
    std::uint64_t num_relations = 0;
    std::uint64_t num_triples = 0;
    double avg_degree = 0.0;  // 2|G| / |E|; each triple touches both endpoints
};

inline double average_degree(std::uint64_t num_triples, std::uint64_t num_entities) {
    if (num_entities == 0) return 0.0;
    return 2.0 * static_cast<double>(num_triples) / static_cast<double>(num_entities);
}

inline GraphStats graph_stats(const KnowledgeGraph& g) {
    GraphStats s;
    s.num_entities = g.num_entities();
    s.num_relations = g.num_relations();
    s.num_triples = g.num_triples();
    s.avg_degree = average_degree(s.num_triples, s.num_entities);
    return s;
}

}  // namespace ukge
