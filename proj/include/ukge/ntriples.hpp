#pragma once
// Streaming line-based N-Triples reader.
//
// Mirrors how large dump preprocessing treats the format: one statement per
// line, only IRI-to-IRI statements are kept. Lines whose object is a literal
// are counted and dropped, statements touching blank nodes likewise, and
// malformed lines are either counted (lenient, the default) or fatal
// (strict). Escape sequences inside IRIs are preserved verbatim.
//
// Accounting contract, checked by tests:
//   yielded + skipped_literals + skipped_blank_nodes + malformed + blank
//     == total_lines
// A line that is both ill-fated ways (blank-node subject, literal object)
// counts as a literal skip; the literal test runs first.

#include <cctype>
#include <cstdint>
#include <istream>
#include <string>
#include <string_view>
#include <utility>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"

namespace ukge {

enum class ParseMode { lenient, strict };

struct ParseStats {
    std::uint64_t total_lines = 0;
    std::uint64_t yielded = 0;
    std::uint64_t skipped_literals = 0;
    std::uint64_t skipped_blank_nodes = 0;
    std::uint64_t malformed = 0;
    std::uint64_t blank = 0;  // empty, whitespace-only, and comment lines

    std::uint64_t accounted() const {
        return yielded + skipped_literals + skipped_blank_nodes + malformed + blank;
    }
};

namespace ntdetail {

enum class TermKind { iri, blank_node, literal };

struct Term {
    TermKind kind;
    std::string_view value;
};

inline bool is_ws(char c) { return c == ' ' || c == '\t'; }

inline std::size_t skip_ws(std::string_view s, std::size_t i) {
    while (i < s.size() && is_ws(s[i])) ++i;
    return i;
}

inline bool valid_iri(std::string_view iri) {
    if (iri.empty()) return false;
    for (unsigned char c : iri) {
        if (c <= 0x20) return false;  // whitespace and control characters
        if (c == '<' || c == '>' || c == '"') return false;
    }
    return true;
}

// Parses one term starting at i; advances i past it. Returns false on
// syntax errors.
inline bool parse_term(std::string_view s, std::size_t& i, Term& out) {
    if (i >= s.size()) return false;
    char c = s[i];
    if (c == '<') {
        std::size_t end = s.find('>', i + 1);
        if (end == std::string_view::npos) return false;
        std::string_view iri = s.substr(i + 1, end - i - 1);
        if (!valid_iri(iri)) return false;
        out = {TermKind::iri, iri};
        i = end + 1;
        return true;
    }
    if (c == '_') {
        if (i + 1 >= s.size() || s[i + 1] != ':') return false;
        std::size_t end = i + 2;
        while (end < s.size() && !is_ws(s[end]) && s[end] != '.') ++end;
        if (end == i + 2) return false;  // empty label
        out = {TermKind::blank_node, s.substr(i, end - i)};
        i = end;
        return true;
    }
    if (c == '"') {
        std::size_t j = i + 1;
        while (j < s.size()) {
            if (s[j] == '\\') {
                j += 2;
                continue;
            }
            if (s[j] == '"') break;
            ++j;
        }
        if (j >= s.size()) return false;  // unterminated
        std::size_t lex_end = j;
        j += 1;
        // Optional @lang or ^^<datatype>.
        if (j < s.size() && s[j] == '@') {
            std::size_t end = j + 1;
            while (end < s.size() && (std::isalnum(static_cast<unsigned char>(s[end])) || s[end] == '-'))
                ++end;
            if (end == j + 1) return false;
            j = end;
        } else if (j + 1 < s.size() && s[j] == '^' && s[j + 1] == '^') {
            j += 2;
            if (j >= s.size() || s[j] != '<') return false;
            std::size_t end = s.find('>', j + 1);
            if (end == std::string_view::npos) return false;
            if (!valid_iri(s.substr(j + 1, end - j - 1))) return false;
            j = end + 1;
        }
        out = {TermKind::literal, s.substr(i + 1, lex_end - i - 1)};
        i = j;
        return true;
    }
    return false;
}

struct Statement {
    Term subject, predicate, object;
};

// Returns false on syntax errors; a successful parse consumed the whole line
// up to an optional trailing comment.
inline bool parse_statement(std::string_view line, Statement& st) {
    std::size_t i = skip_ws(line, 0);
    if (!parse_term(line, i, st.subject)) return false;
    if (st.subject.kind == TermKind::literal) return false;
    i = skip_ws(line, i);
    if (!parse_term(line, i, st.predicate)) return false;
    if (st.predicate.kind != TermKind::iri) return false;
    i = skip_ws(line, i);
    if (!parse_term(line, i, st.object)) return false;
    i = skip_ws(line, i);
    if (i >= line.size() || line[i] != '.') return false;
    i = skip_ws(line, i + 1);
    return i >= line.size() || line[i] == '#';
}

}  // namespace ntdetail

// Streams (subject, predicate, object) IRI triples to sink, one call per
// kept statement, in input order. string_views passed to the sink are only
// valid for the duration of the call.
template <class Sink>
ParseStats parse_ntriples(std::istream& in, Sink&& sink, ParseMode mode = ParseMode::lenient) {
    ParseStats stats;
    std::string line;
    while (std::getline(in, line)) {
        ++stats.total_lines;
        std::string_view sv = line;
        if (!sv.empty() && sv.back() == '\r') sv.remove_suffix(1);

        std::size_t i = ntdetail::skip_ws(sv, 0);
        if (i >= sv.size() || sv[i] == '#') {
            ++stats.blank;
            continue;
        }

        ntdetail::Statement st;
        if (!ntdetail::parse_statement(sv, st)) {
            if (mode == ParseMode::strict)
                throw ParseError("malformed N-Triples statement at line " +
                                 std::to_string(stats.total_lines) + ": " + line);
            ++stats.malformed;
            continue;
        }
        if (st.object.kind == ntdetail::TermKind::literal) {
            ++stats.skipped_literals;
            continue;
        }
        if (st.subject.kind == ntdetail::TermKind::blank_node ||
            st.object.kind == ntdetail::TermKind::blank_node) {
            ++stats.skipped_blank_nodes;
            continue;
        }
        ++stats.yielded;
        sink(st.subject.value, st.predicate.value, st.object.value);
    }
    return stats;
}

// Parses a full stream into a graph.
inline std::pair<KnowledgeGraph, ParseStats> read_ntriples_graph(std::istream& in,
                                                                 ParseMode mode = ParseMode::lenient) {
    GraphBuilder builder;
    ParseStats stats = parse_ntriples(
        in, [&](std::string_view s, std::string_view p, std::string_view o) { builder.add(s, p, o); },
        mode);
    return {builder.finish(), stats};
}

}  // namespace ukge
