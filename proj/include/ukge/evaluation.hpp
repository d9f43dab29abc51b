#pragma once
// Link-prediction evaluation: per-triple head/tail ranks and the MRR /
// Hits@{1,3,10} aggregates.
//
// For a test triple (h, r, t) the head rank scores every candidate entity c
// in (c, r, t) and ranks the true head among them; the tail rank mirrors it.
// Ranks use average tie handling rounded down:
//   rank = 1 + |{c : s(c) > s(target)}| + floor(|{c != target : s(c) = s(target)}| / 2)
// so a constant model cannot rank everything first. Metrics average both
// directions: MRR = (1/2|G|) sum (1/head_rank + 1/tail_rank), and Hits@k
// counts ranks <= k the same way.
//
// Raw ranking is the default: other known-true triples stay in the candidate
// pool. Filtered mode (the wider literature's convention) drops candidates
// that would form a different triple from a supplied known set.
//
// Rank computation is read-only and parallelized over test triples; the final
// reduction runs in test order single-threaded, so reports are independent of
// the thread count.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <string>
#include <thread>
#include <unordered_set>
#include <vector>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/models.hpp"

namespace ukge {

enum class RankMode : std::uint8_t { raw = 0, filtered = 1 };

struct RankPair {
    std::uint64_t head_rank = 0;
    std::uint64_t tail_rank = 0;
};

struct EvalReport {
    double mrr = 0.0;
    double hits1 = 0.0;
    double hits3 = 0.0;
    double hits10 = 0.0;
    std::uint64_t num_test_triples = 0;
    std::uint64_t candidate_set_size = 0;
};

// Rank of scores[target] within `scores` under average-tie-floor handling.
inline std::uint64_t rank_from_scores(std::span<const double> scores, std::size_t target) {
    double s = scores[target];
    std::uint64_t greater = 0, ties = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (scores[i] > s) ++greater;
        else if (scores[i] == s && i != target) ++ties;
    }
    return 1 + greater + ties / 2;
}

struct EvalOptions {
    RankMode mode = RankMode::raw;
    std::uint32_t threads = 1;
    // Candidate entity ids; empty means every entity the model knows.
    std::vector<EntityId> candidates;
    // Known-true triples removed from candidate pools in filtered mode (the
    // test triple's own target always stays).
    const std::unordered_set<Triple, TripleHash>* known = nullptr;
};

enum class Direction : std::uint8_t { head, tail };

namespace edetail {

// Scores all model entities into `scores` for one open slot, then ranks the
// target over the requested candidate subset.
inline std::uint64_t rank_one(const Model& m, const Triple& t, Direction dir,
                              const EvalOptions& opts, std::vector<double>& scores) {
    EntityId target = dir == Direction::head ? t.head : t.tail;
    if (dir == Direction::head)
        score_candidates_head(m, t.relation, t.tail, scores);
    else
        score_candidates_tail(m, t.head, t.relation, scores);

    auto keep = [&](EntityId c) {
        if (c == target) return true;
        if (opts.mode == RankMode::filtered && opts.known) {
            Triple candidate_triple = t;
            (dir == Direction::head ? candidate_triple.head : candidate_triple.tail) = c;
            if (opts.known->count(candidate_triple)) return false;
        }
        return true;
    };

    double target_score = scores[target];
    std::uint64_t greater = 0, ties = 0;
    bool saw_target = false;
    auto consider = [&](EntityId c) {
        if (c == target) {
            saw_target = true;
            return;
        }
        if (!keep(c)) return;
        if (scores[c] > target_score) ++greater;
        else if (scores[c] == target_score) ++ties;
    };
    if (opts.candidates.empty()) {
        for (std::size_t c = 0; c < scores.size(); ++c) consider(static_cast<EntityId>(c));
        saw_target = true;
    } else {
        for (EntityId c : opts.candidates) consider(c);
    }
    if (!saw_target) throw DataError("rank target not in candidate set");
    return 1 + greater + ties / 2;
}

}  // namespace edetail

// Rank of `target` when substituted into `direction` of (relation, other)
// over an explicit candidate set.
inline std::uint64_t rank_candidates(const Model& m, RelationId relation, EntityId other,
                                     Direction direction, EntityId target,
                                     std::span<const EntityId> candidates) {
    bool found = false;
    for (EntityId c : candidates)
        if (c == target) {
            found = true;
            break;
        }
    if (!found) throw DataError("rank target not in candidate set");
    EvalOptions opts;
    opts.candidates.assign(candidates.begin(), candidates.end());
    std::vector<double> scores;
    Triple t;
    if (direction == Direction::head) {
        t = Triple{target, relation, other};
    } else {
        t = Triple{other, relation, target};
    }
    return edetail::rank_one(m, t, direction, opts, scores);
}

// Head/tail ranks for every test triple, in test order.
inline std::vector<RankPair> rank_test_triples(const Model& m, std::span<const Triple> test,
                                               const EvalOptions& opts = {}) {
    std::vector<RankPair> ranks(test.size());
    std::uint32_t nthreads = std::max<std::uint32_t>(1, opts.threads);
    nthreads = static_cast<std::uint32_t>(
        std::min<std::size_t>(nthreads, test.size() == 0 ? 1 : test.size()));

    auto work = [&](std::size_t lo, std::size_t hi) {
        std::vector<double> scores;
        for (std::size_t i = lo; i < hi; ++i) {
            ranks[i].head_rank =
                edetail::rank_one(m, test[i], Direction::head, opts, scores);
            ranks[i].tail_rank =
                edetail::rank_one(m, test[i], Direction::tail, opts, scores);
        }
    };
    if (nthreads == 1) {
        work(0, test.size());
    } else {
        std::vector<std::thread> workers;
        std::size_t per = (test.size() + nthreads - 1) / nthreads;
        for (std::uint32_t w = 0; w < nthreads; ++w) {
            std::size_t lo = w * per;
            std::size_t hi = std::min(test.size(), lo + per);
            if (lo >= hi) break;
            workers.emplace_back(work, lo, hi);
        }
        for (auto& th : workers) th.join();
    }
    return ranks;
}

inline EvalReport evaluate(const Model& m, std::span<const Triple> test,
                           const EvalOptions& opts = {}) {
    if (test.empty()) throw DataError("evaluate: empty test set");
    std::vector<RankPair> ranks = rank_test_triples(m, test, opts);

    EvalReport rep;
    rep.num_test_triples = test.size();
    rep.candidate_set_size =
        opts.candidates.empty() ? m.entities.rows() : opts.candidates.size();
    double mrr = 0.0, h1 = 0.0, h3 = 0.0, h10 = 0.0;
    for (const RankPair& rp : ranks) {
        mrr += 1.0 / static_cast<double>(rp.head_rank) + 1.0 / static_cast<double>(rp.tail_rank);
        h1 += (rp.head_rank <= 1) + (rp.tail_rank <= 1);
        h3 += (rp.head_rank <= 3) + (rp.tail_rank <= 3);
        h10 += (rp.head_rank <= 10) + (rp.tail_rank <= 10);
    }
    double denom = 2.0 * static_cast<double>(test.size());
    rep.mrr = mrr / denom;
    rep.hits1 = h1 / denom;
    rep.hits3 = h3 / denom;
    rep.hits10 = h10 / denom;
    return rep;
}

// Maps triples of `source` into the id space of `vocab` by IRI. Every source
// entity and relation must exist in vocab (the split closure guarantees this
// for proper train/test pairs).
inline std::vector<Triple> align_to_vocab(const KnowledgeGraph& source,
                                          const KnowledgeGraph& vocab) {
    std::vector<EntityId> ent_map(source.num_entities());
    std::vector<RelationId> rel_map(source.num_relations());
    for (std::size_t i = 0; i < source.num_entities(); ++i) {
        auto id = vocab.entities.find(source.entity_name(static_cast<EntityId>(i)));
        if (!id)
            throw DataError("entity not in model vocabulary: " +
                            source.entity_name(static_cast<EntityId>(i)));
        ent_map[i] = *id;
    }
    for (std::size_t i = 0; i < source.num_relations(); ++i) {
        auto id = vocab.relations.find(source.relation_name(static_cast<RelationId>(i)));
        if (!id)
            throw DataError("relation not in model vocabulary: " +
                            source.relation_name(static_cast<RelationId>(i)));
        rel_map[i] = *id;
    }
    std::vector<Triple> out;
    out.reserve(source.num_triples());
    for (const Triple& t : source.triples)
        out.push_back(Triple{ent_map[t.head], rel_map[t.relation], ent_map[t.tail]});
    return out;
}

// Aligned text table, one metrics row:  MRR    H@1    H@3    H@10
inline std::string format_report_table(const EvalReport& r) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "  MRR    H@1    H@3    H@10\n%.3f  %.3f  %.3f  %.3f\n", r.mrr, r.hits1,
                  r.hits3, r.hits10);
    return buf;
}

}  // namespace ukge
