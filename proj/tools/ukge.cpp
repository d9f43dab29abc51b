// ukge: one binary for the whole pipeline.
//
//   parse   N-Triples -> compact binary graph
//   stats   entity/relation/triple counts and average degree
//   fuse    merge graphs over a sameAs closure
//   sample  seed entities + one-hop evaluation subgraph
//   split   train/test split with vocabulary closure
//   train   embedding training -> checkpoint + dictionary + loss trace
//   eval    link-prediction metrics against a checkpoint
//   serve   HTTP embedding service
//
// Exit codes: 0 success, 1 usage error, 2 data/runtime error. Every
// randomized stage demands an explicit --rng-seed; file-producing runs write
// a JSON manifest (flags, seeds, paths, tool version, duration) next to
// their primary output so any run can be replayed.

#include <CLI11.hpp>

#include <nlohmann/json.hpp>

#include <chrono>
#include <csignal>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

#include "ukge/checkpoint.hpp"
#include "ukge/core.hpp"
#include "ukge/evaluation.hpp"
#include "ukge/fusion.hpp"
#include "ukge/graph_io.hpp"
#include "ukge/models.hpp"
#include "ukge/ntriples.hpp"
#include "ukge/rng.hpp"
#include "ukge/sameas.hpp"
#include "ukge/sampling.hpp"
#include "ukge/service.hpp"
#include "ukge/training.hpp"
#include "ukge/version.hpp"

namespace {

using json = nlohmann::json;

class Timer {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_manifest(const std::string& path, const std::string& subcommand, json config,
                    json inputs, json outputs, double seconds) {
    json m{{"subcommand", subcommand},
           {"tool_version", ukge::kToolVersion},
           {"config", std::move(config)},
           {"inputs", std::move(inputs)},
           {"outputs", std::move(outputs)},
           {"duration_seconds", seconds}};
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ukge::DataError("cannot write manifest: " + path);
    out << m.dump(2) << '\n';
}

json parse_stats_json(const ukge::ParseStats& s) {
    return json{{"total_lines", s.total_lines},
                {"yielded", s.yielded},
                {"skipped_literals", s.skipped_literals},
                {"skipped_blank_nodes", s.skipped_blank_nodes},
                {"malformed", s.malformed},
                {"blank_or_comment", s.blank}};
}

json graph_stats_json(const ukge::GraphStats& s) {
    return json{{"num_entities", s.num_entities},
                {"num_relations", s.num_relations},
                {"num_triples", s.num_triples},
                {"avg_degree", s.avg_degree}};
}

void save_dictionary(const ukge::Interner& dict, const std::string& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ukge::DataError("cannot open dictionary output: " + path);
    ukge::write_dictionary_tsv(dict, out);
    if (!out) throw ukge::DataError("dictionary write failed: " + path);
}

// ---------------------------------------------------------------------- parse

struct ParseArgs {
    std::string in, out, dict;
    bool strict = false;
};

int run_parse(const ParseArgs& a) {
    Timer timer;
    auto input = ukge::open_text_input(a.in);
    auto [graph, stats] =
        ukge::read_ntriples_graph(*input, a.strict ? ukge::ParseMode::strict
                                                   : ukge::ParseMode::lenient);
    ukge::save_graph(graph, a.out);
    json outputs = json::array({a.out});
    if (!a.dict.empty()) {
        save_dictionary(graph.entities, a.dict);
        outputs.push_back(a.dict);
    }
    json report{{"parse", parse_stats_json(stats)},
                {"graph", graph_stats_json(ukge::graph_stats(graph))}};
    std::cout << report.dump(2) << '\n';
    write_manifest(a.out + ".manifest.json", "parse",
                   json{{"in", a.in}, {"out", a.out}, {"dict", a.dict}, {"strict", a.strict}},
                   json::array({a.in}), outputs, timer.seconds());
    return 0;
}

// ---------------------------------------------------------------------- stats

struct StatsArgs {
    std::string in, manifest;
};

int run_stats(const StatsArgs& a) {
    Timer timer;
    auto [graph, parse_stats] = ukge::load_any_graph(a.in);
    json report{{"graph", graph_stats_json(ukge::graph_stats(graph))}};
    if (parse_stats) report["parse"] = parse_stats_json(*parse_stats);
    std::cout << report.dump(2) << '\n';
    if (!a.manifest.empty())
        write_manifest(a.manifest, "stats", json{{"in", a.in}}, json::array({a.in}),
                       json::array(), timer.seconds());
    return 0;
}

// ----------------------------------------------------------------------- fuse

struct FuseArgs {
    std::string ref, sameas, out, dict;
    std::vector<std::string> add;
};

int run_fuse(const FuseArgs& a) {
    Timer timer;
    std::vector<ukge::KnowledgeGraph> graphs;
    graphs.push_back(ukge::load_any_graph(a.ref).first);
    for (const std::string& path : a.add) graphs.push_back(ukge::load_any_graph(path).first);

    ukge::SameAsMap links;
    ukge::SameAsStats link_stats;
    if (!a.sameas.empty()) {
        auto in = ukge::open_text_input(a.sameas);
        links = ukge::load_sameas(*in, &link_stats);
    } else {
        links.finalize();
    }

    ukge::FusionResult fused = ukge::fuse_kgs(graphs, links);
    ukge::save_graph(fused.graph, a.out);
    json outputs = json::array({a.out});
    if (!a.dict.empty()) {
        save_dictionary(fused.graph.entities, a.dict);
        outputs.push_back(a.dict);
    }

    json report{{"merged", graph_stats_json(ukge::graph_stats(fused.graph))},
                {"input_triples", fused.report.input_triples},
                {"input_entities", fused.report.input_entities},
                {"renamed_entities", fused.report.renamed_entities},
                {"multi_match_entities", fused.report.multi_match_entities},
                {"duplicate_triples", fused.report.duplicate_triples},
                {"self_loops_created", fused.report.self_loops_created},
                {"sameas_triples_skipped", fused.report.sameas_triples_skipped}};
    if (!a.sameas.empty())
        report["sameas"] = json{{"statements", link_stats.statements},
                                {"distinct_pairs", link_stats.distinct_pairs},
                                {"self_links", link_stats.self_links},
                                {"other_predicate", link_stats.other_predicate},
                                {"classes", link_stats.classes},
                                {"largest_class", link_stats.largest_class},
                                {"multi_matched", link_stats.multi_matched}};
    std::cout << report.dump(2) << '\n';

    json inputs = json::array({a.ref});
    for (const std::string& p : a.add) inputs.push_back(p);
    if (!a.sameas.empty()) inputs.push_back(a.sameas);
    write_manifest(a.out + ".manifest.json", "fuse",
                   json{{"ref", a.ref}, {"add", a.add}, {"sameas", a.sameas}, {"out", a.out},
                        {"dict", a.dict}},
                   inputs, outputs, timer.seconds());
    return 0;
}

// --------------------------------------------------------------------- sample

struct SampleArgs {
    std::string in, out, seeds_out;
    double fraction = 0.01;
    std::uint64_t seed = 0;
};

int run_sample(const SampleArgs& a) {
    Timer timer;
    ukge::KnowledgeGraph graph = ukge::load_any_graph(a.in).first;
    ukge::Rng rng(a.seed);
    std::vector<ukge::EntityId> seeds = ukge::sample_seed_entities(graph, a.fraction, rng);
    ukge::KnowledgeGraph sub = ukge::one_hop_subgraph(graph, seeds);
    ukge::save_graph(sub, a.out);
    json outputs = json::array({a.out});
    if (!a.seeds_out.empty()) {
        std::ofstream out(a.seeds_out, std::ios::binary);
        if (!out) throw ukge::DataError("cannot open seeds output: " + a.seeds_out);
        for (ukge::EntityId e : seeds) out << e << '\t' << graph.entity_name(e) << '\n';
        outputs.push_back(a.seeds_out);
    }
    json report{{"seeds", seeds.size()},
                {"subgraph", graph_stats_json(ukge::graph_stats(sub))}};
    std::cout << report.dump(2) << '\n';
    write_manifest(a.out + ".manifest.json", "sample",
                   json{{"in", a.in},
                        {"fraction", a.fraction},
                        {"rng_seed", a.seed},
                        {"out", a.out},
                        {"seeds_out", a.seeds_out}},
                   json::array({a.in}), outputs, timer.seconds());
    return 0;
}

// ---------------------------------------------------------------------- split

struct SplitArgs {
    std::string in, train_out, test_out;
    double test_ratio = 0.2;
    std::uint64_t seed = 0;
};

int run_split(const SplitArgs& a) {
    Timer timer;
    ukge::KnowledgeGraph graph = ukge::load_any_graph(a.in).first;
    ukge::Rng rng(a.seed);
    ukge::SplitResult split = ukge::split_train_test(graph, a.test_ratio, rng);
    ukge::KnowledgeGraph train = ukge::subgraph_from_triples(graph, split.train);
    ukge::KnowledgeGraph test = ukge::subgraph_from_triples(graph, split.test);
    ukge::save_graph(train, a.train_out);
    ukge::save_graph(test, a.test_out);
    json report{{"train_triples", split.train.size()},
                {"test_triples", split.test.size()},
                {"moved_to_train", split.moved_to_train}};
    std::cout << report.dump(2) << '\n';
    write_manifest(a.train_out + ".manifest.json", "split",
                   json{{"in", a.in},
                        {"test_ratio", a.test_ratio},
                        {"rng_seed", a.seed},
                        {"train_out", a.train_out},
                        {"test_out", a.test_out}},
                   json::array({a.in}), json::array({a.train_out, a.test_out}), timer.seconds());
    return 0;
}

// ---------------------------------------------------------------------- train

struct TrainArgs {
    std::string in, out;
    std::string kind = "distmult";
    std::string optimizer = "adam";
    std::uint32_t dim = 32;
    std::uint32_t channels = 8;
    std::uint32_t kernel = 3;
    bool qmult_normalize = false;
    std::uint32_t epochs = 100;
    std::uint32_t batch_size = 1024;
    double lr = 0.05;
    std::uint32_t negatives = 10;
    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
    double l2 = 0.0;
    std::uint32_t threads = 1;
    std::uint32_t checkpoint_every = 0;
    std::uint64_t seed = 0;
};

json train_config_json(const TrainArgs& a) {
    return json{{"in", a.in},
                {"out", a.out},
                {"kind", a.kind},
                {"dim", a.dim},
                {"conv_channels", a.channels},
                {"conv_kernel", a.kernel},
                {"qmult_normalize", a.qmult_normalize},
                {"epochs", a.epochs},
                {"batch_size", a.batch_size},
                {"learning_rate", a.lr},
                {"negatives_per_positive", a.negatives},
                {"optimizer", a.optimizer},
                {"beta1", a.beta1},
                {"beta2", a.beta2},
                {"eps", a.eps},
                {"l2", a.l2},
                {"threads", a.threads},
                {"checkpoint_every", a.checkpoint_every},
                {"rng_seed", a.seed}};
}

int run_train(const TrainArgs& a) {
    Timer timer;
    ukge::KnowledgeGraph graph = ukge::load_any_graph(a.in).first;

    ukge::ModelConfig mcfg;
    mcfg.kind = ukge::kind_from_name(a.kind);
    mcfg.dim = a.dim;
    mcfg.conv_channels = a.channels;
    mcfg.conv_kernel = a.kernel;
    mcfg.qmult_normalize = a.qmult_normalize;

    ukge::TrainConfig tcfg;
    tcfg.epochs = a.epochs;
    tcfg.batch_size = a.batch_size;
    tcfg.learning_rate = a.lr;
    tcfg.negatives_per_positive = a.negatives;
    tcfg.optimizer = ukge::optimizer_from_name(a.optimizer);
    tcfg.beta1 = a.beta1;
    tcfg.beta2 = a.beta2;
    tcfg.eps = a.eps;
    tcfg.l2 = a.l2;
    tcfg.threads = a.threads;
    tcfg.rng_seed = a.seed;
    tcfg.checkpoint_every = a.checkpoint_every;
    std::uint32_t log_every = std::max<std::uint32_t>(1, a.epochs / 10);
    tcfg.on_epoch = [&](std::uint32_t epoch, double loss) {
        if (epoch % log_every == 0 || epoch == a.epochs)
            std::cerr << "epoch " << epoch << "/" << a.epochs << " mean loss " << loss << '\n';
    };
    if (a.checkpoint_every > 0)
        tcfg.on_checkpoint = [&](std::uint32_t epoch, const ukge::Model& m) {
            ukge::save_checkpoint(a.out + ".e" + std::to_string(epoch), m);
        };

    ukge::TrainResult result = ukge::train(graph, mcfg, tcfg);
    ukge::save_checkpoint(a.out, result.model);
    save_dictionary(graph.entities, a.out + ".tsv");
    {
        std::ofstream csv(a.out + ".loss.csv", std::ios::binary);
        if (!csv) throw ukge::DataError("cannot open loss trace output");
        csv << "epoch,mean_loss\n";
        csv.precision(17);
        for (std::size_t i = 0; i < result.trace.mean_loss.size(); ++i)
            csv << (i + 1) << ',' << result.trace.mean_loss[i] << '\n';
    }
    json report{{"final_loss",
                 result.trace.mean_loss.empty() ? json(nullptr)
                                                : json(result.trace.mean_loss.back())},
                {"epochs", a.epochs},
                {"entities", graph.num_entities()},
                {"relations", graph.num_relations()},
                {"triples", graph.num_triples()}};
    std::cout << report.dump(2) << '\n';
    write_manifest(a.out + ".manifest.json", "train", train_config_json(a),
                   json::array({a.in}),
                   json::array({a.out, a.out + ".tsv", a.out + ".loss.csv"}), timer.seconds());
    return 0;
}

// ----------------------------------------------------------------------- eval

struct EvalArgs {
    std::string model, graph, test, json_out;
    bool filtered = false;
    bool qmult_normalize = false;
    std::uint32_t threads = 1;
};

int run_eval(const EvalArgs& a) {
    Timer timer;
    std::uint64_t checksum = 0;
    ukge::Model model = ukge::load_checkpoint(a.model, &checksum);
    model.config.qmult_normalize = a.qmult_normalize;
    ukge::KnowledgeGraph graph = ukge::load_any_graph(a.graph).first;
    if (model.entities.rows() != graph.num_entities() ||
        model.relations.rows() != graph.num_relations())
        throw ukge::DataError(
            "checkpoint and graph disagree on vocabulary size; pass the graph the model was "
            "trained on");
    ukge::KnowledgeGraph test_graph = ukge::load_any_graph(a.test).first;
    std::vector<ukge::Triple> test = ukge::align_to_vocab(test_graph, graph);

    ukge::EvalOptions opts;
    opts.threads = a.threads;
    std::unordered_set<ukge::Triple, ukge::TripleHash> known;
    if (a.filtered) {
        opts.mode = ukge::RankMode::filtered;
        known.insert(graph.triples.begin(), graph.triples.end());
        known.insert(test.begin(), test.end());
        opts.known = &known;
    }
    ukge::EvalReport rep = ukge::evaluate(model, test, opts);

    std::cout << ukge::format_report_table(rep);
    std::cout << "test triples: " << rep.num_test_triples
              << "  candidates: " << rep.candidate_set_size
              << "  mode: " << (a.filtered ? "filtered" : "raw") << '\n';
    json rep_json{{"mrr", rep.mrr},
                  {"hits1", rep.hits1},
                  {"hits3", rep.hits3},
                  {"hits10", rep.hits10},
                  {"num_test_triples", rep.num_test_triples},
                  {"candidate_set_size", rep.candidate_set_size},
                  {"mode", a.filtered ? "filtered" : "raw"},
                  {"data_version", [&] {
                       char buf[17];
                       std::snprintf(buf, sizeof buf, "%016llx",
                                     static_cast<unsigned long long>(checksum));
                       return std::string(buf);
                   }()}};
    if (!a.json_out.empty()) {
        std::ofstream out(a.json_out, std::ios::binary);
        if (!out) throw ukge::DataError("cannot open report output: " + a.json_out);
        out << rep_json.dump(2) << '\n';
        write_manifest(a.json_out + ".manifest.json", "eval",
                       json{{"model", a.model},
                            {"graph", a.graph},
                            {"test", a.test},
                            {"filtered", a.filtered},
                            {"qmult_normalize", a.qmult_normalize},
                            {"threads", a.threads},
                            {"json", a.json_out}},
                       json::array({a.model, a.graph, a.test}), json::array({a.json_out}),
                       timer.seconds());
    }
    return 0;
}

// ---------------------------------------------------------------------- serve

ukge::EmbeddingService* g_service = nullptr;

struct ServeArgs {
    std::string data, dict, dataset = "default";
    std::string bind = "127.0.0.1";
    std::string admin_token;
    int port = 8080;
    std::uint32_t max_batch = 1000;
};

int run_serve(const ServeArgs& a) {
    auto store = ukge::build_store(a.data, a.dict, a.dataset);
    ukge::ServiceConfig cfg;
    cfg.bind_addr = a.bind;
    cfg.port = a.port;
    cfg.admin_token = a.admin_token;
    cfg.max_batch = a.max_batch;
    ukge::EmbeddingService service(std::move(store), cfg);
    g_service = &service;
    std::signal(SIGINT, [](int) {
        if (g_service) g_service->stop();
    });
    std::signal(SIGTERM, [](int) {
        if (g_service) g_service->stop();
    });
    std::cerr << "serving " << a.dataset << " on " << a.bind << ":"
              << (a.port == 0 ? std::string("<ephemeral>") : std::to_string(a.port)) << '\n';
    bool ok = service.run();
    g_service = nullptr;
    if (!ok) throw ukge::DataError("failed to bind " + a.bind + ":" + std::to_string(a.port));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"knowledge graph embedding toolkit"};
    app.require_subcommand(1);
    app.set_version_flag("--version", std::string(ukge::kToolVersion));

    ParseArgs parse_args;
    auto* parse_cmd = app.add_subcommand("parse", "convert N-Triples to a binary graph");
    parse_cmd->add_option("--in", parse_args.in, "N-Triples input (optionally gzipped)")
        ->required();
    parse_cmd->add_option("--out", parse_args.out, "binary graph output")->required();
    parse_cmd->add_option("--dict", parse_args.dict, "entity dictionary TSV output");
    parse_cmd->add_flag("--strict", parse_args.strict, "fail on the first malformed line");

    StatsArgs stats_args;
    auto* stats_cmd = app.add_subcommand("stats", "graph statistics");
    stats_cmd->add_option("--in", stats_args.in, "graph input (binary or N-Triples)")->required();
    stats_cmd->add_option("--manifest", stats_args.manifest, "manifest output path");

    FuseArgs fuse_args;
    auto* fuse_cmd = app.add_subcommand("fuse", "merge graphs over a sameAs closure");
    fuse_cmd->add_option("--ref", fuse_args.ref, "reference graph (canonical vocabulary)")
        ->required();
    fuse_cmd->add_option("--add", fuse_args.add, "additional graph (repeatable)");
    fuse_cmd->add_option("--sameas", fuse_args.sameas, "N-Triples file of owl:sameAs links");
    fuse_cmd->add_option("--out", fuse_args.out, "merged binary graph output")->required();
    fuse_cmd->add_option("--dict", fuse_args.dict, "merged entity dictionary TSV output");

    SampleArgs sample_args;
    auto* sample_cmd = app.add_subcommand("sample", "seed entities and one-hop subgraph");
    sample_cmd->add_option("--in", sample_args.in, "graph input")->required();
    sample_cmd->add_option("--fraction", sample_args.fraction, "entity fraction to seed")
        ->capture_default_str();
    sample_cmd->add_option("--rng-seed", sample_args.seed, "random seed (required)")->required();
    sample_cmd->add_option("--out", sample_args.out, "subgraph output")->required();
    sample_cmd->add_option("--seeds-out", sample_args.seeds_out, "seed entity TSV output");

    SplitArgs split_args;
    auto* split_cmd = app.add_subcommand("split", "train/test split with vocabulary closure");
    split_cmd->add_option("--in", split_args.in, "graph input")->required();
    split_cmd->add_option("--test-ratio", split_args.test_ratio, "test fraction in [0,1)")
        ->capture_default_str();
    split_cmd->add_option("--rng-seed", split_args.seed, "random seed (required)")->required();
    split_cmd->add_option("--train-out", split_args.train_out, "train graph output")->required();
    split_cmd->add_option("--test-out", split_args.test_out, "test graph output")->required();

    TrainArgs train_args;
    auto* train_cmd = app.add_subcommand("train", "train an embedding model");
    train_cmd->add_option("--in", train_args.in, "training graph")->required();
    train_cmd->add_option("--kind", train_args.kind, "distmult|complex|qmult|conex")->required();
    train_cmd->add_option("--dim", train_args.dim, "embedding dimension")->capture_default_str();
    train_cmd->add_option("--channels", train_args.channels, "conex conv channels")
        ->capture_default_str();
    train_cmd->add_option("--kernel", train_args.kernel, "conex conv kernel size (odd)")
        ->capture_default_str();
    train_cmd->add_flag("--qmult-normalize", train_args.qmult_normalize,
                        "unit-normalize relation quaternions (qmult)");
    train_cmd->add_option("--epochs", train_args.epochs, "training epochs")
        ->capture_default_str();
    train_cmd->add_option("--batch-size", train_args.batch_size, "positives per batch")
        ->capture_default_str();
    train_cmd->add_option("--lr", train_args.lr, "learning rate")->capture_default_str();
    train_cmd->add_option("--negatives", train_args.negatives, "negatives per positive")
        ->capture_default_str();
    train_cmd->add_option("--optimizer", train_args.optimizer, "adam|sgd")
        ->capture_default_str();
    train_cmd->add_option("--beta1", train_args.beta1, "adam beta1")->capture_default_str();
    train_cmd->add_option("--beta2", train_args.beta2, "adam beta2")->capture_default_str();
    train_cmd->add_option("--eps", train_args.eps, "adam epsilon")->capture_default_str();
    train_cmd->add_option("--l2", train_args.l2, "L2 penalty weight")->capture_default_str();
    train_cmd->add_option("--threads", train_args.threads,
                          "gradient worker threads (>1 is thread-count dependent)")
        ->capture_default_str();
    train_cmd->add_option("--checkpoint-every", train_args.checkpoint_every,
                          "snapshot every N epochs (0 = off)")
        ->capture_default_str();
    train_cmd->add_option("--rng-seed", train_args.seed, "random seed (required)")->required();
    train_cmd->add_option("--out", train_args.out, "checkpoint output")->required();

    EvalArgs eval_args;
    auto* eval_cmd = app.add_subcommand("eval", "link-prediction evaluation");
    eval_cmd->add_option("--model", eval_args.model, "checkpoint input")->required();
    eval_cmd->add_option("--graph", eval_args.graph, "training graph (vocabulary + candidates)")
        ->required();
    eval_cmd->add_option("--test", eval_args.test, "test graph")->required();
    eval_cmd->add_flag("--filtered", eval_args.filtered,
                       "filtered ranking (drop other known-true candidates)");
    eval_cmd->add_flag("--qmult-normalize", eval_args.qmult_normalize,
                       "unit-normalize relation quaternions (qmult)");
    eval_cmd->add_option("--threads", eval_args.threads, "ranking threads")
        ->capture_default_str();
    eval_cmd->add_option("--json", eval_args.json_out, "JSON report output path");

    ServeArgs serve_args;
    auto* serve_cmd = app.add_subcommand("serve", "HTTP embedding service");
    serve_cmd->add_option("--data", serve_args.data, "checkpoint path")
        ->envname("UKGE_DATA_PATH")
        ->required();
    serve_cmd->add_option("--dict", serve_args.dict,
                          "entity dictionary TSV (default: <data>.tsv)");
    serve_cmd->add_option("--dataset", serve_args.dataset, "dataset name")
        ->capture_default_str();
    serve_cmd->add_option("--bind", serve_args.bind, "bind address")
        ->envname("UKGE_BIND_ADDR")
        ->capture_default_str();
    serve_cmd->add_option("--port", serve_args.port, "port (0 = ephemeral)")
        ->capture_default_str();
    serve_cmd->add_option("--admin-token", serve_args.admin_token,
                          "bearer token enabling the admin endpoint")
        ->envname("UKGE_ADMIN_TOKEN");
    serve_cmd->add_option("--max-batch", serve_args.max_batch, "get_embeddings batch limit")
        ->envname("UKGE_MAX_BATCH")
        ->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int rc = app.exit(e);
        return rc == 0 ? 0 : 1;
    }

    try {
        if (parse_cmd->parsed()) return run_parse(parse_args);
        if (stats_cmd->parsed()) return run_stats(stats_args);
        if (fuse_cmd->parsed()) return run_fuse(fuse_args);
        if (sample_cmd->parsed()) return run_sample(sample_args);
        if (split_cmd->parsed()) return run_split(split_args);
        if (train_cmd->parsed()) return run_train(train_args);
        if (eval_cmd->parsed()) return run_eval(eval_args);
        if (serve_cmd->parsed()) return run_serve(serve_args);
    } catch (const ukge::ConfigError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
    return 1;
}
