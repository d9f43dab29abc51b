#pragma once
// Evaluation-dataset construction: seed sampling, one-hop neighborhoods,
// seed projection across aligned graphs, and train/test splitting.
//
// Everything here is deterministic given the caller-supplied Rng. The split
// enforces a closure invariant -- every entity and relation reachable from a
// test triple also occurs in some train triple -- by moving violating test
// candidates into train in a single in-order pass (train only ever grows, so
// earlier decisions stay valid).

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/rng.hpp"
#include "ukge/sameas.hpp"

namespace ukge {

// Ceiling of fraction * n with a guard against FP noise: products that land
// within 1e-9 of an integer count as that integer (0.01 * 1000 must be 10,
// not 11, even though the product is 10.000000000000002).
inline std::uint64_t ceil_fraction(double fraction, std::uint64_t n) {
    if (fraction <= 0.0 || n == 0) return 0;
    if (fraction >= 1.0) return n;
    double x = fraction * static_cast<double>(n);
    auto k = static_cast<std::uint64_t>(x);
    if (static_cast<double>(k) + 1e-9 < x) ++k;
    return std::min(k, n);
}

// Uniform sample of ceil_fraction(fraction, |E|) distinct entities, returned
// sorted by id.
inline std::vector<EntityId> sample_seed_entities(const KnowledgeGraph& g, double fraction,
                                                  Rng& rng) {
    if (fraction < 0.0 || fraction > 1.0)
        throw ConfigError("seed fraction must lie in [0, 1]");
    std::uint64_t k = ceil_fraction(fraction, g.num_entities());
    std::vector<std::uint64_t> picks = rng.sample_without_replacement(g.num_entities(), k);
    std::vector<EntityId> seeds(picks.begin(), picks.end());
    std::sort(seeds.begin(), seeds.end());
    return seeds;
}

// Subgraph of all triples incident to at least one seed, re-interned so ids
// are dense in first-appearance order of the kept triples.
inline KnowledgeGraph one_hop_subgraph(const KnowledgeGraph& g, std::span<const EntityId> seeds) {
    std::vector<bool> is_seed(g.num_entities(), false);
    for (EntityId e : seeds) {
        if (e >= g.num_entities()) throw DataError("one_hop_subgraph: seed id out of range");
        is_seed[e] = true;
    }
    GraphBuilder builder;
    for (const Triple& t : g.triples)
        if (is_seed[t.head] || is_seed[t.tail])
            builder.add(g.entity_name(t.head), g.relation_name(t.relation), g.entity_name(t.tail));
    return builder.finish();
}

struct ProjectedSeeds {
    std::vector<std::string> iris;               // counterpart IRIs present in the target graph
    std::uint64_t without_counterpart = 0;       // seeds with no aligned target entity
};

// Maps seed entities of `source` onto `target` through the alignment closure:
// each seed projects to the lexicographically smallest class member that
// exists in the target graph. Duplicate projections collapse.
inline ProjectedSeeds project_seeds(const KnowledgeGraph& source, std::span<const EntityId> seeds,
                                    const SameAsMap& m, const KnowledgeGraph& target) {
    ProjectedSeeds out;
    std::unordered_set<std::string_view> seen;
    for (EntityId e : seeds) {
        if (e >= source.num_entities()) throw DataError("project_seeds: seed id out of range");
        std::string_view name = source.entity_name(e);
        std::string_view hit{};
        for (std::string_view member : m.class_members(name)) {
            if (target.entities.find(member)) {
                hit = member;
                break;  // members are lex-sorted; first hit is the minimum
            }
        }
        if (hit.empty()) {
            ++out.without_counterpart;
            continue;
        }
        if (seen.insert(hit).second) out.iris.emplace_back(hit);
    }
    return out;
}

struct SplitResult {
    std::vector<Triple> train;
    std::vector<Triple> test;
    std::uint64_t moved_to_train = 0;  // closure repairs applied to test candidates
};

// Random train/test split over g.triples (ids refer to g's dictionaries).
// Roughly ceil_fraction(test_ratio, |G|) triples are marked as test
// candidates; a candidate whose head, relation, or tail is absent from the
// train side at its turn is repaired into train instead. Graphs with fewer
// than 3 triples put everything in train.
inline SplitResult split_train_test(const KnowledgeGraph& g, double test_ratio, Rng& rng) {
    if (test_ratio < 0.0 || test_ratio >= 1.0)
        throw ConfigError("test ratio must lie in [0, 1)");
    const std::uint64_t n = g.num_triples();
    SplitResult out;
    if (n < 3 || test_ratio == 0.0) {
        out.train = g.triples;
        return out;
    }
    std::uint64_t n_test = std::min(ceil_fraction(test_ratio, n), n - 1);

    std::vector<std::uint32_t> order(n);
    for (std::uint64_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);
    rng.shuffle(order);
    std::vector<bool> candidate(n, false);
    for (std::uint64_t i = 0; i < n_test; ++i) candidate[order[i]] = true;

    std::vector<bool> ent_in_train(g.num_entities(), false);
    std::vector<bool> rel_in_train(g.num_relations(), false);
    auto cover = [&](const Triple& t) {
        ent_in_train[t.head] = true;
        ent_in_train[t.tail] = true;
        rel_in_train[t.relation] = true;
    };
    for (std::uint64_t i = 0; i < n; ++i)
        if (!candidate[i]) cover(g.triples[i]);

    for (std::uint64_t i = 0; i < n; ++i) {
        const Triple& t = g.triples[i];
        if (!candidate[i]) {
            out.train.push_back(t);
            continue;
        }
        if (ent_in_train[t.head] && ent_in_train[t.tail] && rel_in_train[t.relation]) {
            out.test.push_back(t);
        } else {
            out.train.push_back(t);
            cover(t);
            ++out.moved_to_train;
        }
    }
    return out;
}

// Re-interns a triple subset of g as a standalone graph (dense ids in
// first-appearance order of `triples`).
inline KnowledgeGraph subgraph_from_triples(const KnowledgeGraph& g,
                                            std::span<const Triple> triples) {
    GraphBuilder builder;
    for (const Triple& t : triples)
        builder.add(g.entity_name(t.head), g.relation_name(t.relation), g.entity_name(t.tail));
    return builder.finish();
}

}  // namespace ukge
