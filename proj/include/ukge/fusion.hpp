#pragma once
// Multi-graph fusion over a sameAs closure.
//
// The first graph in the fuse order acts as the reference vocabulary: an
// aligned entity maps to the lexicographically smallest member of its closure
// class that exists in the reference graph, and to the lexicographically
// smallest class member overall when the class never touches the reference.
// This closed form makes the result independent of triple order and of the
// order alignment links were read in. Canonicalized duplicate triples
// collapse; self-loops produced by the collapse are kept; alignment triples
// themselves never enter the merged graph.

#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/sameas.hpp"

namespace ukge {

// Lex-smallest class member present in `reference`, else lex-smallest class
// member, else `e` itself when unaligned. Class members are pre-sorted, so
// the first hit is the minimum.
inline std::string_view canonical_iri(std::string_view e, const SameAsMap& m,
                                      const Interner& reference) {
    const auto* members = m.class_ids(e);
    if (!members) return e;
    for (std::uint32_t id : *members) {
        const std::string& name = m.iri_name(id);
        if (reference.find(name)) return name;
    }
    return m.iri_name(members->front());
}

struct FusionReport {
    std::vector<std::uint64_t> input_triples;   // per input graph, fuse order
    std::vector<std::uint64_t> input_entities;  // per input graph, fuse order
    std::uint64_t renamed_entities = 0;    // distinct input IRIs mapped elsewhere
    std::uint64_t multi_match_entities = 0;  // IRIs whose class meets >= 2 reference entities
    std::uint64_t duplicate_triples = 0;   // canonicalized triples already present
    std::uint64_t self_loops_created = 0;  // head != tail collapsed to head == tail
    std::uint64_t sameas_triples_skipped = 0;  // alignment statements inside the inputs
};

struct FusionResult {
    KnowledgeGraph graph;
    FusionReport report;
};

// Fuses `graphs` in order. graphs[0] supplies the reference vocabulary.
inline FusionResult fuse_kgs(std::span<const KnowledgeGraph> graphs, const SameAsMap& m) {
    if (graphs.empty()) throw DataError("fuse_kgs: at least one input graph required");
    const Interner& reference = graphs[0].entities;

    FusionResult out;
    GraphBuilder builder;
    std::unordered_set<std::string_view> renamed;
    std::unordered_set<std::string_view> multi;

    for (const KnowledgeGraph& g : graphs) {
        out.report.input_triples.push_back(g.num_triples());
        out.report.input_entities.push_back(g.num_entities());

        for (std::size_t i = 0; i < g.num_entities(); ++i) {
            std::string_view name = g.entity_name(static_cast<EntityId>(i));
            if (canonical_iri(name, m, reference) != name) renamed.insert(name);
            const auto* members = m.class_ids(name);
            if (members) {
                int hits = 0;
                for (std::uint32_t id : *members)
                    if (reference.find(m.iri_name(id)) && ++hits >= 2) break;
                if (hits >= 2) multi.insert(name);
            }
        }

        for (const Triple& t : g.triples) {
            std::string_view rel = g.relation_name(t.relation);
            if (rel == kSameAsIri) {
                ++out.report.sameas_triples_skipped;
                continue;
            }
            std::string_view h = g.entity_name(t.head);
            std::string_view tl = g.entity_name(t.tail);
            std::string_view ch = canonical_iri(h, m, reference);
            std::string_view ct = canonical_iri(tl, m, reference);
            if (h != tl && ch == ct) ++out.report.self_loops_created;
            if (!builder.add(ch, rel, ct)) ++out.report.duplicate_triples;
        }
    }

    out.report.renamed_entities = renamed.size();
    out.report.multi_match_entities = multi.size();
    out.graph = builder.finish();
    return out;
}

}  // namespace ukge
