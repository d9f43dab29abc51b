#pragma once
// Graph persistence.
//
// Binary layout (UKG1), all integers little-endian:
//   magic "UKG1" | flags u8 (0, reserved for a 64-bit id variant)
//   |E| u64 | |R| u64 | |G| u64
//   entity dictionary: |E| x (u32 length + UTF-8 bytes), in id order
//   relation dictionary: |R| x (u32 length + UTF-8 bytes), in id order
//   triples: |G| x (head u32, relation u32, tail u32)
//
// Round-trips are exact, including id assignment. 32-bit ids cap the entity
// space at ~4.29B, enough headroom for the merged DBpedia/Wikidata scale.

#include <fstream>
#include <istream>
#include <ostream>
#include <string>
#include <utility>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/io_util.hpp"
#include "ukge/ntriples.hpp"

namespace ukge {

inline constexpr char kGraphMagic[4] = {'U', 'K', 'G', '1'};

inline void write_graph(const KnowledgeGraph& g, std::ostream& out) {
    BinaryWriter w(out);
    w.bytes(kGraphMagic, 4);
    w.u8(0);
    w.u64(g.num_entities());
    w.u64(g.num_relations());
    w.u64(g.num_triples());
    for (const auto& name : g.entities.names()) w.str(name);
    for (const auto& name : g.relations.names()) w.str(name);
    for (const Triple& t : g.triples) {
        w.u32(t.head);
        w.u32(t.relation);
        w.u32(t.tail);
    }
}

inline KnowledgeGraph read_graph(std::istream& in) {
    BinaryReader r(in);
    char magic[4];
    r.bytes(magic, 4);
    if (std::string_view(magic, 4) != std::string_view(kGraphMagic, 4))
        throw FormatError("not a UKG1 graph file (bad magic)");
    std::uint8_t flags = r.u8();
    if (flags != 0) throw FormatError("unsupported UKG1 flags");
    std::uint64_t ne = r.u64();
    std::uint64_t nr = r.u64();
    std::uint64_t nt = r.u64();
    if (ne > 0xFFFFFFFFull || nr > 0xFFFFFFFFull)
        throw FormatError("dictionary size exceeds 32-bit id space");

    KnowledgeGraph g;
    for (std::uint64_t i = 0; i < ne; ++i) {
        std::string name = r.str();
        if (g.entities.intern(name) != i) throw FormatError("duplicate entity in dictionary");
    }
    for (std::uint64_t i = 0; i < nr; ++i) {
        std::string name = r.str();
        if (g.relations.intern(name) != i) throw FormatError("duplicate relation in dictionary");
    }
    g.triples.reserve(nt);
    for (std::uint64_t i = 0; i < nt; ++i) {
        Triple t{r.u32(), r.u32(), r.u32()};
        if (t.head >= ne || t.tail >= ne || t.relation >= nr)
            throw FormatError("triple references id outside dictionary");
        g.triples.push_back(t);
    }
    return g;
}

inline void save_graph(const KnowledgeGraph& g, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open output file: " + path);
    write_graph(g, out);
    out.flush();
    if (!out) throw DataError("write failed: " + path);
}

inline KnowledgeGraph load_graph(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open graph file: " + path);
    return read_graph(in);
}

// Loads either a UKG1 file or an N-Triples dump (optionally gzipped),
// dispatching on magic bytes. Returns parse stats only for the text path.
inline std::pair<KnowledgeGraph, std::optional<ParseStats>> load_any_graph(
    const std::string& path, ParseMode mode = ParseMode::lenient) {
    {
        std::ifstream probe(path, std::ios::binary);
        if (!probe) throw DataError("cannot open input file: " + path);
        char magic[4] = {};
        probe.read(magic, 4);
        if (probe.gcount() == 4 && std::string_view(magic, 4) == std::string_view(kGraphMagic, 4)) {
            probe.seekg(0);
            return {read_graph(probe), std::nullopt};
        }
    }
    auto in = open_text_input(path);
    auto [g, stats] = read_ntriples_graph(*in, mode);
    return {std::move(g), stats};
}

// id<TAB>iri, one row per entry, ascending id.
inline void write_dictionary_tsv(const Interner& dict, std::ostream& out) {
    for (std::size_t i = 0; i < dict.size(); ++i)
        out << i << '\t' << dict.name(static_cast<std::uint32_t>(i)) << '\n';
}

inline void write_ntriples(const KnowledgeGraph& g, std::ostream& out) {
    for (const Triple& t : g.triples)
        out << '<' << g.entity_name(t.head) << "> <" << g.relation_name(t.relation) << "> <"
            << g.entity_name(t.tail) << "> .\n";
}

}  // namespace ukge
