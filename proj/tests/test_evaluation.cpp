#include <doctest.h>

#include "oracle_helpers.hpp"
#include "ukge/evaluation.hpp"
#include "ukge/training.hpp"

using namespace ukge;

namespace {

Model random_model(ModelKind kind, std::uint32_t dim, std::size_t ne, std::size_t nr,
                   std::uint64_t seed) {
    ModelConfig cfg;
    cfg.kind = kind;
    cfg.dim = dim;
    cfg.conv_channels = 2;
    cfg.conv_kernel = 3;
    Model m = Model::make(cfg, ne, nr);
    Rng rng(seed);
    m.init(rng);
    return m;
}

}  // namespace

TEST_CASE("rank_from_scores hand cases") {
    // Strictly better candidates push the rank down; ties split to the floor
    // midpoint.
    CHECK(rank_from_scores(std::vector<double>{3, 1, 2}, 0) == 1);
    CHECK(rank_from_scores(std::vector<double>{3, 1, 2}, 1) == 3);
    CHECK(rank_from_scores(std::vector<double>{3, 1, 2}, 2) == 2);
    // All five tied: everyone sits at the middle, rank 3.
    CHECK(rank_from_scores(std::vector<double>{7, 7, 7, 7, 7}, 2) == 3);
    // Four tied: floor midpoint is rank 2.
    CHECK(rank_from_scores(std::vector<double>{7, 7, 7, 7}, 0) == 2);
    // Two tied behind one better: ranks 2 and 3 split to 2.
    CHECK(rank_from_scores(std::vector<double>{9, 5, 5}, 1) == 2);
    // Singleton.
    CHECK(rank_from_scores(std::vector<double>{0.0}, 0) == 1);
}

TEST_CASE("rank_from_scores agrees with the sort-based oracle on random ties") {
    std::mt19937_64 gen(5);
    for (int trial = 0; trial < 300; ++trial) {
        std::size_t n = 1 + gen() % 12;
        std::vector<double> scores(n);
        for (double& s : scores) s = static_cast<double>(gen() % 4);  // heavy ties
        std::size_t target = gen() % n;
        CHECK(rank_from_scores(scores, target) == testutil::oracle_rank(scores, target));
    }
}

TEST_CASE("evaluate equals the brute-force oracle on 50 random instances") {
    std::mt19937_64 gen(9);
    for (int trial = 0; trial < 50; ++trial) {
        std::uint64_t ne = 5 + gen() % 46;  // <= 50 entities
        std::uint64_t nr = 1 + gen() % 4;
        KnowledgeGraph g = testutil::random_graph(gen, ne, nr, 3 * ne);
        ModelKind kind = static_cast<ModelKind>(trial % 4);
        Model m = random_model(kind, 8, g.num_entities(), g.num_relations(), 100 + trial);

        std::vector<Triple> test(g.triples.begin(),
                                 g.triples.begin() + std::min<std::size_t>(g.triples.size(), 20));
        EvalOptions opts;
        EvalReport rep = evaluate(m, test, opts);

        std::vector<EntityId> all;
        for (EntityId e = 0; e < g.num_entities(); ++e) all.push_back(e);
        testutil::OracleReport oracle = testutil::oracle_evaluate(m, test, all);

        CHECK(rep.mrr == doctest::Approx(oracle.mrr).epsilon(1e-12));
        CHECK(rep.hits1 == doctest::Approx(oracle.hits1).epsilon(1e-12));
        CHECK(rep.hits3 == doctest::Approx(oracle.hits3).epsilon(1e-12));
        CHECK(rep.hits10 == doctest::Approx(oracle.hits10).epsilon(1e-12));
        CHECK(rep.num_test_triples == test.size());
        CHECK(rep.candidate_set_size == g.num_entities());
    }
}

TEST_CASE("report invariants hold") {
    std::mt19937_64 gen(13);
    for (int trial = 0; trial < 10; ++trial) {
        KnowledgeGraph g = testutil::random_graph(gen, 30, 3, 90);
        Model m = random_model(ModelKind::complex_, 8, g.num_entities(), g.num_relations(),
                               trial);
        EvalReport rep = evaluate(m, g.triples, EvalOptions{});
        CHECK(rep.hits1 <= rep.hits3);
        CHECK(rep.hits3 <= rep.hits10);
        CHECK(rep.hits10 <= 1.0);
        CHECK(rep.mrr <= 1.0);
        CHECK(rep.mrr >= 1.0 / static_cast<double>(rep.candidate_set_size));
        CHECK(rep.mrr >= rep.hits1);
    }
}

TEST_CASE("ranking is invariant under monotone score transforms") {
    // Doubling every embedding of a DistMult model scales all scores by 8, a
    // strictly monotone map, so every rank is unchanged.
    std::mt19937_64 gen(17);
    KnowledgeGraph g = testutil::random_graph(gen, 25, 2, 80);
    Model m = random_model(ModelKind::distmult, 8, g.num_entities(), g.num_relations(), 3);
    std::vector<Triple> test(g.triples.begin(), g.triples.begin() + 15);
    auto before = rank_test_triples(m, test, EvalOptions{});
    for (double& v : m.entities.data()) v *= 2.0;
    auto after = rank_test_triples(m, test, EvalOptions{});
    REQUIRE(before.size() == after.size());
    for (std::size_t i = 0; i < before.size(); ++i) {
        CHECK(before[i].head_rank == after[i].head_rank);
        CHECK(before[i].tail_rank == after[i].tail_rank);
    }
}

TEST_CASE("filtered mode drops other known-true candidates from the ranking") {
    // Two true tails for (h, r): raw ranking lets them compete; filtered mode
    // removes the other one from consideration.
    GraphBuilder b;
    b.add("h", "r", "t1");
    b.add("h", "r", "t2");
    b.add("x", "r", "t1");  // padding so the vocabulary has a non-answer
    KnowledgeGraph g = b.finish();
    Model m = random_model(ModelKind::distmult, 8, g.num_entities(), g.num_relations(), 21);
    // Force t2 to outscore t1 for every query by making it a huge vector.
    EntityId t1 = g.entities.find("t1").value();
    EntityId t2 = g.entities.find("t2").value();
    EntityId h = g.entities.find("h").value();
    for (double& v : m.entities.row(t2)) v = 10.0;
    for (double& v : m.entities.row(t1)) v = 1.0;
    for (double& v : m.entities.row(h)) v = 1.0;
    for (double& v : m.relations.row(0)) v = 1.0;

    std::vector<Triple> test{Triple{h, 0, t1}};
    std::unordered_set<Triple, TripleHash> known(g.triples.begin(), g.triples.end());

    EvalOptions raw;
    auto raw_ranks = rank_test_triples(m, test, raw);
    EvalOptions filt;
    filt.mode = RankMode::filtered;
    filt.known = &known;
    auto filt_ranks = rank_test_triples(m, test, filt);
    // Raw: t2 strictly outscores t1, so t1 ranks 2nd. Filtered: t2 is a known
    // true answer and is excluded, promoting t1 to rank 1.
    CHECK(raw_ranks[0].tail_rank == 2);
    CHECK(filt_ranks[0].tail_rank == 1);

    // The filtered oracle agrees end to end.
    std::vector<EntityId> all;
    for (EntityId e = 0; e < g.num_entities(); ++e) all.push_back(e);
    testutil::OracleReport oracle = testutil::oracle_evaluate(m, test, all, &known);
    EvalReport rep = evaluate(m, test, filt);
    CHECK(rep.mrr == doctest::Approx(oracle.mrr).epsilon(1e-12));
    CHECK(rep.hits1 == doctest::Approx(oracle.hits1).epsilon(1e-12));
}

TEST_CASE("explicit candidate subsets restrict the competition") {
    std::mt19937_64 gen(23);
    KnowledgeGraph g = testutil::random_graph(gen, 40, 2, 120);
    Model m = random_model(ModelKind::complex_, 8, g.num_entities(), g.num_relations(), 31);
    std::vector<Triple> test{g.triples[0], g.triples[1]};
    EvalOptions opts;
    for (const Triple& t : test) {
        opts.candidates.push_back(t.head);
        opts.candidates.push_back(t.tail);
    }
    for (EntityId e = 0; e < 10; ++e) opts.candidates.push_back(e);
    std::sort(opts.candidates.begin(), opts.candidates.end());
    opts.candidates.erase(std::unique(opts.candidates.begin(), opts.candidates.end()),
                          opts.candidates.end());
    EvalReport rep = evaluate(m, test, opts);
    CHECK(rep.candidate_set_size == opts.candidates.size());
    testutil::OracleReport oracle = testutil::oracle_evaluate(m, test, opts.candidates);
    CHECK(rep.mrr == doctest::Approx(oracle.mrr).epsilon(1e-12));

    // A target missing from the candidate set is an error.
    EvalOptions bad;
    bad.candidates = {test[0].head};  // tail absent
    CHECK_THROWS_AS(evaluate(m, test, bad), DataError);
}

TEST_CASE("evaluation is deterministic and thread-count independent") {
    std::mt19937_64 gen(27);
    KnowledgeGraph g = testutil::random_graph(gen, 60, 3, 200);
    Model m = random_model(ModelKind::qmult, 8, g.num_entities(), g.num_relations(), 41);
    std::vector<Triple> test(g.triples.begin(), g.triples.begin() + 50);
    EvalOptions one;
    one.threads = 1;
    EvalOptions four;
    four.threads = 4;
    EvalReport a = evaluate(m, test, one);
    EvalReport b = evaluate(m, test, four);
    CHECK(a.mrr == b.mrr);  // bitwise: fixed-order reduction
    CHECK(a.hits1 == b.hits1);
    CHECK(a.hits3 == b.hits3);
    CHECK(a.hits10 == b.hits10);
}

TEST_CASE("empty test set is an error") {
    Model m = random_model(ModelKind::distmult, 4, 3, 1, 1);
    CHECK_THROWS_AS(evaluate(m, std::vector<Triple>{}, EvalOptions{}), DataError);
}

TEST_CASE("a model that separates the target perfectly reaches MRR 1") {
    // Self-loop graph plus one-hot embeddings: distmult(h, r, t) = <h, t> is
    // maximal exactly at the true answer of every query, both directions.
    GraphBuilder b;
    b.add("e0", "r", "e0");
    b.add("e1", "r", "e1");
    b.add("e2", "r", "e2");
    KnowledgeGraph g = b.finish();
    ModelConfig cfg;
    cfg.kind = ModelKind::distmult;
    cfg.dim = 3;
    Model m = Model::make(cfg, 3, 1);
    for (EntityId e = 0; e < 3; ++e)
        for (std::uint32_t d = 0; d < 3; ++d) m.entities.row(e)[d] = (d == e) ? 1.0 : 0.0;
    for (std::uint32_t d = 0; d < 3; ++d) m.relations.row(0)[d] = 1.0;
    EvalReport rep = evaluate(m, g.triples, EvalOptions{});
    CHECK(rep.mrr == doctest::Approx(1.0));
    CHECK(rep.hits1 == doctest::Approx(1.0));
}

TEST_CASE("align_to_vocab maps names over and rejects unknowns") {
    GraphBuilder source_b;
    source_b.add("b", "p", "a");
    KnowledgeGraph source = source_b.finish();
    GraphBuilder vocab_b;
    vocab_b.add("a", "p", "b");
    KnowledgeGraph vocab = vocab_b.finish();
    std::vector<Triple> aligned = align_to_vocab(source, vocab);
    REQUIRE(aligned.size() == 1);
    CHECK(aligned[0].head == vocab.entities.find("b").value());
    CHECK(aligned[0].tail == vocab.entities.find("a").value());

    GraphBuilder alien_b;
    alien_b.add("zz", "p", "a");
    KnowledgeGraph alien = alien_b.finish();
    CHECK_THROWS_WITH_AS(align_to_vocab(alien, vocab), doctest::Contains("zz"), DataError);
}

TEST_CASE("report table prints three-decimal columns") {
    EvalReport r;
    r.mrr = 0.5;
    r.hits1 = 0.25;
    r.hits3 = 0.5;
    r.hits10 = 1.0;
    std::string table = format_report_table(r);
    CHECK(table.find("MRR") != std::string::npos);
    CHECK(table.find("0.500") != std::string::npos);
    CHECK(table.find("0.250") != std::string::npos);
    CHECK(table.find("1.000") != std::string::npos);
}
