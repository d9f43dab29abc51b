#pragma once
// HTTP serving layer for trained embeddings.
//
// A VectorStore is an immutable snapshot: IRI -> row index, a row-major
// single-precision matrix, and dataset metadata (the data version is the
// checkpoint checksum in hex, so identical parameters imply an identical
// version string). Readers grab the current snapshot through a shared_mutex
// holder; the admin ingest endpoint builds a new store off to the side and
// swaps the pointer, so in-flight requests finish against the old snapshot
// and no request ever sees a half-loaded store.
//
// Public API (eight methods, all JSON):
//   GET  /api/v1/version            {api_version, data_version}
//   POST /api/v1/get_embeddings     {entities:[iri]} -> {results, not_found}
//   GET  /api/v1/autocomplete       ?q=<prefix>&limit=<n>
//   GET  /api/v1/random             ?n=<count>
//   GET  /api/v1/size               {num_entities, dim, dataset}
//   GET  /api/v1/datasets           {datasets:[...]}
//   GET  /api/v1/health             {status}
//   GET  /api/v1/embedding/<iri>    single entity (IRI percent-encoded)
// plus the hidden, bearer-token POST /admin/v1/ingest. A wrong or missing
// token yields a bodiless 404 -- the endpoint does not reveal its existence;
// every other error response is JSON {code, message}.
//
// Vectors are served as single-precision values printed through double
// round-trip formatting: parsing the JSON number and casting to float
// reproduces the stored bits exactly.

#include <httplib.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cctype>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <functional>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

#include "ukge/checkpoint.hpp"
#include "ukge/errors.hpp"
#include "ukge/models.hpp"
#include "ukge/rng.hpp"
#include "ukge/version.hpp"

namespace ukge {

namespace sdetail {

inline std::string ascii_lower(std::string_view s) {
    std::string out(s);
    for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    return out;
}

// Suffix after the last '/' or '#'; the whole IRI when neither occurs.
inline std::string_view local_name(std::string_view iri) {
    std::size_t pos = iri.find_last_of("/#");
    return pos == std::string_view::npos ? iri : iri.substr(pos + 1);
}

}  // namespace sdetail

class VectorStore {
public:
    VectorStore(std::vector<std::string> iris, std::vector<float> data, std::uint32_t dim,
                std::string dataset_name, std::string data_version)
        : iris_(std::move(iris)),
          data_(std::move(data)),
          dim_(dim),
          name_(std::move(dataset_name)),
          version_(std::move(data_version)) {
        if (dim_ == 0) throw DataError("vector store needs dim >= 1");
        if (data_.size() != iris_.size() * static_cast<std::size_t>(dim_))
            throw DataError("vector store size mismatch");
        index_.reserve(iris_.size());
        for (std::uint32_t i = 0; i < iris_.size(); ++i) index_.emplace(iris_[i], i);
        ac_.reserve(iris_.size());
        for (std::uint32_t i = 0; i < iris_.size(); ++i)
            ac_.emplace_back(sdetail::ascii_lower(sdetail::local_name(iris_[i])), i);
        std::sort(ac_.begin(), ac_.end());
    }

    std::size_t size() const { return iris_.size(); }
    std::uint32_t dim() const { return dim_; }
    const std::string& dataset_name() const { return name_; }
    const std::string& data_version() const { return version_; }
    const std::vector<std::string>& iris() const { return iris_; }

    const std::string& iri(std::uint32_t row) const { return iris_[row]; }
    std::span<const float> row(std::uint32_t r) const {
        return std::span<const float>(data_.data() + static_cast<std::size_t>(r) * dim_, dim_);
    }
    std::optional<std::uint32_t> find(std::string_view iri) const {
        auto it = index_.find(std::string(iri));
        return it == index_.end() ? std::nullopt : std::optional<std::uint32_t>(it->second);
    }

    // Rows whose lower-cased local name starts with the lower-cased query,
    // ordered lexicographically by full IRI, at most `limit` of them.
    std::vector<std::uint32_t> autocomplete(std::string_view query, std::size_t limit) const {
        std::string q = sdetail::ascii_lower(query);
        auto lo = std::lower_bound(ac_.begin(), ac_.end(), q,
                                   [](const auto& e, const std::string& v) { return e.first < v; });
        std::vector<std::uint32_t> rows;
        for (auto it = lo; it != ac_.end() && it->first.compare(0, q.size(), q) == 0; ++it)
            rows.push_back(it->second);
        std::sort(rows.begin(), rows.end(),
                  [&](std::uint32_t a, std::uint32_t b) { return iris_[a] < iris_[b]; });
        if (rows.size() > limit) rows.resize(limit);
        return rows;
    }

private:
    std::vector<std::string> iris_;
    std::vector<float> data_;
    std::uint32_t dim_;
    std::string name_, version_;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<std::pair<std::string, std::uint32_t>> ac_;  // (lower local name, row)
};

// Store built from an in-memory model (tests, mainly). Rows are truncated to
// single precision here; the data version is the model's checkpoint checksum.
inline std::shared_ptr<const VectorStore> store_from_model(const Model& m,
                                                           std::vector<std::string> iris,
                                                           std::string dataset_name,
                                                           std::string data_version) {
    if (iris.size() != m.entities.rows())
        throw DataError("dictionary size does not match entity count");
    std::vector<float> data(m.entities.data().size());
    for (std::size_t i = 0; i < data.size(); ++i)
        data[i] = static_cast<float>(m.entities.data()[i]);
    return std::make_shared<VectorStore>(std::move(iris), std::move(data), m.config.dim,
                                         std::move(dataset_name), std::move(data_version));
}

// Loads "<id>\t<iri>" lines; ids must be dense and ascending from 0.
inline std::vector<std::string> load_dictionary_tsv(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open dictionary: " + path);
    std::vector<std::string> iris;
    std::string line;
    std::uint64_t lineno = 0;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t tab = line.find('\t');
        if (tab == std::string::npos)
            throw FormatError("dictionary line " + std::to_string(lineno + 1) + ": missing tab");
        std::uint64_t id = 0;
        try {
            id = std::stoull(line.substr(0, tab));
        } catch (const std::exception&) {
            throw FormatError("dictionary line " + std::to_string(lineno + 1) + ": bad id");
        }
        if (id != iris.size())
            throw FormatError("dictionary ids must be dense and ascending (line " +
                              std::to_string(lineno + 1) + ")");
        iris.push_back(line.substr(tab + 1));
        ++lineno;
    }
    return iris;
}

// Loads checkpoint + dictionary into a fresh store. `dict_path` empty means
// "<checkpoint_path>.tsv".
inline std::shared_ptr<const VectorStore> build_store(const std::string& checkpoint_path,
                                                      std::string dict_path,
                                                      std::string dataset_name) {
    if (dict_path.empty()) dict_path = checkpoint_path + ".tsv";
    std::uint64_t checksum = 0;
    Model m = load_checkpoint(checkpoint_path, &checksum);
    std::vector<std::string> iris = load_dictionary_tsv(dict_path);
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(checksum));
    return store_from_model(m, std::move(iris), std::move(dataset_name), buf);
}

// Swappable snapshot holder: many concurrent readers, one writer at a time.
class StoreHolder {
public:
    explicit StoreHolder(std::shared_ptr<const VectorStore> s) : store_(std::move(s)) {}
    std::shared_ptr<const VectorStore> get() const {
        std::shared_lock lock(mu_);
        return store_;
    }
    void set(std::shared_ptr<const VectorStore> s) {
        std::unique_lock lock(mu_);
        store_ = std::move(s);
    }

private:
    mutable std::shared_mutex mu_;
    std::shared_ptr<const VectorStore> store_;
};

struct ServiceConfig {
    std::string bind_addr = "127.0.0.1";
    int port = 8080;            // 0 picks an ephemeral port (see bound_port())
    std::string admin_token;    // empty disables the admin endpoint entirely
    std::uint32_t max_batch = 1000;
};

class EmbeddingService {
public:
    EmbeddingService(std::shared_ptr<const VectorStore> store, ServiceConfig cfg)
        : holder_(std::move(store)), cfg_(std::move(cfg)) {
        register_routes();
    }

    // Binds and serves; blocks until stop(). Returns false on bind failure.
    bool run() {
        if (cfg_.port == 0) {
            bound_port_ = server_.bind_to_any_port(cfg_.bind_addr);
            if (bound_port_ < 0) return false;
        } else {
            if (!server_.bind_to_port(cfg_.bind_addr, cfg_.port)) return false;
            bound_port_ = cfg_.port;
        }
        return server_.listen_after_bind();
    }
    void stop() { server_.stop(); }
    int bound_port() const { return bound_port_; }
    // Blocks until the listening loop is accepting connections.
    void wait_until_ready() const { server_.wait_until_ready(); }

    StoreHolder& holder() { return holder_; }

    // Test seam: runs between checkpoint load and store swap during ingest,
    // while the ingest slot is held. Lets tests overlap reads with a reload.
    std::function<void()> ingest_pause;

private:
    using json = nlohmann::json;

    static void reply(httplib::Response& res, int status, const json& body) {
        res.status = status;
        res.set_content(body.dump(), "application/json");
    }
    static void fail(httplib::Response& res, int status, std::string_view code,
                     std::string_view message) {
        reply(res, status, json{{"code", code}, {"message", message}});
    }

    json entity_with_vector(const VectorStore& s, std::uint32_t row) const {
        json vec = json::array();
        for (float v : s.row(row)) vec.push_back(static_cast<double>(v));
        return json{{"entity", s.iri(row)}, {"vector", std::move(vec)}};
    }

    void register_routes() {
        server_.Get("/api/v1/version", [this](const httplib::Request&, httplib::Response& res) {
            auto s = holder_.get();
            reply(res, 200, json{{"api_version", kApiVersion}, {"data_version", s->data_version()}});
        });

        server_.Get("/api/v1/health", [](const httplib::Request&, httplib::Response& res) {
            reply(res, 200, json{{"status", "ok"}});
        });

        server_.Get("/api/v1/size", [this](const httplib::Request&, httplib::Response& res) {
            auto s = holder_.get();
            reply(res, 200,
                  json{{"num_entities", s->size()}, {"dim", s->dim()}, {"dataset", s->dataset_name()}});
        });

        server_.Get("/api/v1/datasets", [this](const httplib::Request&, httplib::Response& res) {
            auto s = holder_.get();
            json d = {{"name", s->dataset_name()},
                      {"num_entities", s->size()},
                      {"dim", s->dim()},
                      {"data_version", s->data_version()}};
            reply(res, 200, json{{"datasets", json::array({std::move(d)})}});
        });

        server_.Post("/api/v1/get_embeddings",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         auto s = holder_.get();
                         json body = json::parse(req.body, nullptr, false);
                         if (body.is_discarded() || !body.is_object())
                             return fail(res, 400, "bad_json", "request body must be a JSON object");
                         if (!body.contains("entities") || !body["entities"].is_array())
                             return fail(res, 400, "missing_entities",
                                         "field 'entities' must be an array of IRIs");
                         const auto& entities = body["entities"];
                         if (entities.empty())
                             return fail(res, 400, "empty_entities", "at least one IRI required");
                         if (entities.size() > cfg_.max_batch)
                             return fail(res, 400, "too_many_entities",
                                         "request exceeds the batch limit of " +
                                             std::to_string(cfg_.max_batch));
                         json results = json::array();
                         json not_found = json::array();
                         for (const auto& e : entities) {
                             if (!e.is_string())
                                 return fail(res, 400, "bad_entity", "IRIs must be strings");
                             auto row = s->find(e.get_ref<const std::string&>());
                             if (row)
                                 results.push_back(entity_with_vector(*s, *row));
                             else
                                 not_found.push_back(e);
                         }
                         reply(res, 200,
                               json{{"results", std::move(results)},
                                    {"not_found", std::move(not_found)}});
                     });

        server_.Get("/api/v1/autocomplete",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        auto s = holder_.get();
                        if (!req.has_param("q") || req.get_param_value("q").empty())
                            return fail(res, 400, "missing_q", "query parameter 'q' required");
                        std::size_t limit = 10;
                        if (req.has_param("limit")) {
                            try {
                                long v = std::stol(req.get_param_value("limit"));
                                if (v < 1 || v > 100) throw std::out_of_range("limit");
                                limit = static_cast<std::size_t>(v);
                            } catch (const std::exception&) {
                                return fail(res, 400, "invalid_limit",
                                            "limit must be an integer in [1, 100]");
                            }
                        }
                        json out = json::array();
                        for (std::uint32_t row : s->autocomplete(req.get_param_value("q"), limit))
                            out.push_back(s->iri(row));
                        reply(res, 200, json{{"results", std::move(out)}});
                    });

        server_.Get("/api/v1/random", [this](const httplib::Request& req, httplib::Response& res) {
            auto s = holder_.get();
            std::uint64_t n = 1;
            if (req.has_param("n")) {
                try {
                    long v = std::stol(req.get_param_value("n"));
                    if (v < 1 || v > 100) throw std::out_of_range("n");
                    n = static_cast<std::uint64_t>(v);
                } catch (const std::exception&) {
                    return fail(res, 400, "invalid_n", "n must be an integer in [1, 100]");
                }
            }
            if (n > s->size())
                return fail(res, 400, "n_too_large",
                            "n exceeds the number of stored entities (" +
                                std::to_string(s->size()) + ")");
            Rng rng = Rng::from_entropy();
            json out = json::array();
            for (std::uint64_t row : rng.sample_without_replacement(s->size(), n))
                out.push_back(entity_with_vector(*s, static_cast<std::uint32_t>(row)));
            reply(res, 200, json{{"results", std::move(out)}});
        });

        server_.Get(R"(/api/v1/embedding/(.+))",
                    [this](const httplib::Request& req, httplib::Response& res) {
                        auto s = holder_.get();
                        auto row = s->find(req.matches[1].str());
                        if (!row)
                            return fail(res, 404, "not_found", "unknown entity IRI");
                        reply(res, 200, entity_with_vector(*s, *row));
                    });

        server_.Post("/admin/v1/ingest",
                     [this](const httplib::Request& req, httplib::Response& res) {
                         // Hidden endpoint: auth failures are indistinguishable
                         // from a route that does not exist.
                         std::string auth = req.get_header_value("Authorization");
                         if (cfg_.admin_token.empty() || auth != "Bearer " + cfg_.admin_token) {
                             res.status = 404;
                             return;
                         }
                         std::unique_lock<std::mutex> ingest(ingest_mu_, std::try_to_lock);
                         if (!ingest.owns_lock())
                             return fail(res, 503, "reload_in_progress",
                                         "another ingest is running");
                         json body = json::parse(req.body, nullptr, false);
                         if (body.is_discarded() || !body.is_object() ||
                             !body.contains("checkpoint_path") ||
                             !body["checkpoint_path"].is_string())
                             return fail(res, 400, "bad_request",
                                         "body must carry 'checkpoint_path'");
                         std::string ckpt = body["checkpoint_path"].get<std::string>();
                         std::string dict = body.value("dict_path", std::string());
                         std::string name = body.value("dataset_name", std::string("default"));
                         std::shared_ptr<const VectorStore> fresh;
                         try {
                             fresh = build_store(ckpt, dict, name);
                         } catch (const Error& e) {
                             return fail(res, 400, "bad_checkpoint", e.what());
                         }
                         if (ingest_pause) ingest_pause();
                         holder_.set(fresh);
                         reply(res, 200, json{{"loaded", fresh->size()}});
                     });

        // JSON 404 for everything unmatched (the admin handler above already
        // owns its bodiless variant).
        auto not_found = [](const httplib::Request&, httplib::Response& res) {
            fail(res, 404, "not_found", "no such endpoint");
        };
        server_.Get(R"(/.*)", not_found);
        server_.Post(R"(/.*)", not_found);
        server_.Put(R"(/.*)", not_found);
        server_.Delete(R"(/.*)", not_found);
    }

    StoreHolder holder_;
    ServiceConfig cfg_;
    httplib::Server server_;
    std::mutex ingest_mu_;
    int bound_port_ = -1;
};

}  // namespace ukge
