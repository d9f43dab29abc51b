#pragma once
// Mini-batch trainer with negative sampling.
//
// Each positive triple contributes itself (label 1) and k corruptions
// (label 0, head or tail replaced by a uniformly random different entity).
// The loss is binary cross-entropy on the raw score; gradients are averaged
// over the batch and applied by SGD or Adam. Embedding gradients are sparse
// (only rows touched by the batch), so Adam moments are updated lazily for
// touched rows with bias correction driven by a global batch counter.
//
// Determinism contract: with threads = 1 and fixed seeds the final model is
// bit-identical across runs (updates are applied in sorted row order and FP
// contraction is disabled build-wide). With threads > 1 gradient computation
// is partitioned across workers and the floating-point summation order
// changes, so results depend on the thread count; only single-threaded runs
// are covered by bit-exactness guarantees.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <thread>
#include <unordered_map>
#include <vector>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/models.hpp"
#include "ukge/rng.hpp"

namespace ukge {

enum class Optimizer : std::uint8_t { sgd = 0, adam = 1 };

inline std::string_view optimizer_name(Optimizer o) {
    return o == Optimizer::sgd ? "sgd" : "adam";
}

inline Optimizer optimizer_from_name(std::string_view name) {
    if (name == "sgd") return Optimizer::sgd;
    if (name == "adam") return Optimizer::adam;
    throw ConfigError("unknown optimizer: " + std::string(name));
}

struct TrainConfig {
    std::uint32_t epochs = 100;
    std::uint32_t batch_size = 1024;
    double learning_rate = 0.05;
    std::uint32_t negatives_per_positive = 10;
    Optimizer optimizer = Optimizer::adam;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
    double l2 = 0.0;  // L2 weight penalty; 0 disables (the default)
    std::uint64_t rng_seed = 0;
    std::uint32_t threads = 1;
    std::uint32_t checkpoint_every = 0;  // epochs between snapshots; 0 disables
    std::function<void(std::uint32_t epoch, double mean_loss)> on_epoch;     // optional
    std::function<void(std::uint32_t epoch, const Model&)> on_checkpoint;    // optional
};

inline void validate_train_config(const TrainConfig& c) {
    if (c.batch_size == 0) throw ConfigError("batch_size must be >= 1");
    if (c.negatives_per_positive == 0) throw ConfigError("negatives_per_positive must be >= 1");
    if (!(c.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (c.threads == 0) throw ConfigError("threads must be >= 1");
    if (!(c.beta1 >= 0 && c.beta1 < 1 && c.beta2 >= 0 && c.beta2 < 1))
        throw ConfigError("adam betas must lie in [0, 1)");
    if (c.l2 < 0) throw ConfigError("l2 must be >= 0");
}

struct LossTrace {
    std::vector<double> mean_loss;  // one entry per completed epoch, all finite
};

struct TrainResult {
    Model model;
    LossTrace trace;
};

// k corruptions of `t`: each replaces the head or the tail (fair coin) with a
// uniform entity different from the one it replaces. Relations are never
// corrupted.
inline std::vector<Triple> negative_samples(const Triple& t, std::uint32_t k,
                                            std::uint64_t num_entities, Rng& rng) {
    if (num_entities < 2)
        throw TrainError("negative sampling needs at least 2 entities");
    std::vector<Triple> out;
    out.reserve(k);
    for (std::uint32_t i = 0; i < k; ++i) {
        Triple c = t;
        bool corrupt_head = rng.coin();
        EntityId original = corrupt_head ? c.head : c.tail;
        // Draw from [0, |E|-1) and shift past the original: uniform over all
        // entities except `original`, no rejection loop.
        auto e = static_cast<EntityId>(rng.below(num_entities - 1));
        if (e >= original) ++e;
        (corrupt_head ? c.head : c.tail) = e;
        out.push_back(c);
    }
    return out;
}

namespace tdetail {

// Numerically stable pieces of the logistic loss. loss = softplus(s) - y*s,
// d(loss)/ds = sigmoid(s) - y.
inline double softplus(double s) {
    return s > 0 ? s + std::log1p(std::exp(-s)) : std::log1p(std::exp(s));
}

inline double sigmoid(double s) {
    if (s >= 0) return 1.0 / (1.0 + std::exp(-s));
    double e = std::exp(s);
    return e / (1.0 + e);
}

// Sparse gradient accumulator: touched embedding rows plus the dense ConEx
// convolution parameters.
struct GradPool {
    std::unordered_map<std::uint32_t, std::size_t> ent_slot, rel_slot;
    std::vector<double> ent_data, rel_data;
    std::vector<double> kernels, kernel_bias, proj_weight, proj_bias;
    std::uint32_t dim = 0;
    bool conex = false;

    void configure(const Model& m) {
        dim = m.config.dim;
        conex = m.config.kind == ModelKind::conex;
        clear(m);
    }
    void clear(const Model& m) {
        ent_slot.clear();
        rel_slot.clear();
        ent_data.clear();
        rel_data.clear();
        if (conex) {
            kernels.assign(m.conv.kernels.size(), 0.0);
            kernel_bias.assign(m.conv.kernel_bias.size(), 0.0);
            proj_weight.assign(m.conv.proj_weight.size(), 0.0);
            proj_bias.assign(m.conv.proj_bias.size(), 0.0);
        }
    }

    double* row(std::unordered_map<std::uint32_t, std::size_t>& slots, std::vector<double>& data,
                std::uint32_t id) {
        auto [it, fresh] = slots.try_emplace(id, data.size() / dim);
        if (fresh) data.resize(data.size() + dim, 0.0);
        return data.data() + it->second * dim;
    }

    void add(const TripleGradients& g, const Triple& t, double scale) {
        axpy(row(ent_slot, ent_data, t.head), g.head, scale);
        axpy(row(rel_slot, rel_data, t.relation), g.relation, scale);
        axpy(row(ent_slot, ent_data, t.tail), g.tail, scale);
        if (conex) {
            axpy(kernels.data(), g.kernels, scale);
            axpy(kernel_bias.data(), g.kernel_bias, scale);
            axpy(proj_weight.data(), g.proj_weight, scale);
            axpy(proj_bias.data(), g.proj_bias, scale);
        }
    }

    // Merge another pool into this one (used to combine worker results in a
    // fixed order).
    void merge(const GradPool& other) {
        for (const auto& [id, slot] : other.ent_slot)
            axpy_span(row(ent_slot, ent_data, id), other.ent_data.data() + slot * dim, dim);
        for (const auto& [id, slot] : other.rel_slot)
            axpy_span(row(rel_slot, rel_data, id), other.rel_data.data() + slot * dim, dim);
        if (conex) {
            axpy_span(kernels.data(), other.kernels.data(), kernels.size());
            axpy_span(kernel_bias.data(), other.kernel_bias.data(), kernel_bias.size());
            axpy_span(proj_weight.data(), other.proj_weight.data(), proj_weight.size());
            axpy_span(proj_bias.data(), other.proj_bias.data(), proj_bias.size());
        }
    }

private:
    void axpy(double* dst, const std::vector<double>& src, double scale) {
        for (std::size_t i = 0; i < src.size(); ++i) dst[i] += scale * src[i];
    }
    void axpy_span(double* dst, const double* src, std::size_t n) {
        for (std::size_t i = 0; i < n; ++i) dst[i] += src[i];
    }
};

// First/second Adam moments for one parameter vector.
struct Moments {
    std::vector<double> m, v;
    void ensure(std::size_t n) {
        if (m.size() != n) {
            m.assign(n, 0.0);
            v.assign(n, 0.0);
        }
    }
};

struct AdamState {
    Moments ent, rel, kernels, kernel_bias, proj_weight, proj_bias;
    std::uint64_t step = 0;  // global batch counter driving bias correction
};

inline void apply_sgd(double* param, const double* grad, std::size_t n, double lr, double l2) {
    for (std::size_t i = 0; i < n; ++i) param[i] -= lr * (grad[i] + l2 * param[i]);
}

inline void apply_adam(double* param, const double* grad, double* m, double* v, std::size_t n,
                       const TrainConfig& c, double bc1, double bc2) {
    for (std::size_t i = 0; i < n; ++i) {
        double g = grad[i] + c.l2 * param[i];
        m[i] = c.beta1 * m[i] + (1.0 - c.beta1) * g;
        v[i] = c.beta2 * v[i] + (1.0 - c.beta2) * g * g;
        double mhat = m[i] / bc1;
        double vhat = v[i] / bc2;
        param[i] -= c.learning_rate * mhat / (std::sqrt(vhat) + c.eps);
    }
}

// Applies the accumulated batch gradient. Rows are visited in ascending id
// order so the update sequence (and hence FP rounding) is reproducible.
inline void apply_batch(Model& model, GradPool& pool, AdamState& adam, const TrainConfig& cfg) {
    auto sorted_ids = [](const std::unordered_map<std::uint32_t, std::size_t>& slots) {
        std::vector<std::uint32_t> ids;
        ids.reserve(slots.size());
        for (const auto& [id, slot] : slots) ids.push_back(id);
        std::sort(ids.begin(), ids.end());
        return ids;
    };
    const std::uint32_t dim = model.config.dim;

    if (cfg.optimizer == Optimizer::sgd) {
        for (std::uint32_t id : sorted_ids(pool.ent_slot))
            apply_sgd(model.entities.row(id).data(),
                      pool.ent_data.data() + pool.ent_slot.at(id) * dim, dim, cfg.learning_rate,
                      cfg.l2);
        for (std::uint32_t id : sorted_ids(pool.rel_slot))
            apply_sgd(model.relations.row(id).data(),
                      pool.rel_data.data() + pool.rel_slot.at(id) * dim, dim, cfg.learning_rate,
                      cfg.l2);
        if (pool.conex) {
            apply_sgd(model.conv.kernels.data(), pool.kernels.data(), pool.kernels.size(),
                      cfg.learning_rate, cfg.l2);
            apply_sgd(model.conv.kernel_bias.data(), pool.kernel_bias.data(),
                      pool.kernel_bias.size(), cfg.learning_rate, cfg.l2);
            apply_sgd(model.conv.proj_weight.data(), pool.proj_weight.data(),
                      pool.proj_weight.size(), cfg.learning_rate, cfg.l2);
            apply_sgd(model.conv.proj_bias.data(), pool.proj_bias.data(), pool.proj_bias.size(),
                      cfg.learning_rate, cfg.l2);
        }
        return;
    }

    ++adam.step;
    double bc1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(adam.step));
    double bc2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(adam.step));
    adam.ent.ensure(model.entities.data().size());
    adam.rel.ensure(model.relations.data().size());
    for (std::uint32_t id : sorted_ids(pool.ent_slot)) {
        std::size_t off = static_cast<std::size_t>(id) * dim;
        apply_adam(model.entities.row(id).data(), pool.ent_data.data() + pool.ent_slot.at(id) * dim,
                   adam.ent.m.data() + off, adam.ent.v.data() + off, dim, cfg, bc1, bc2);
    }
    for (std::uint32_t id : sorted_ids(pool.rel_slot)) {
        std::size_t off = static_cast<std::size_t>(id) * dim;
        apply_adam(model.relations.row(id).data(),
                   pool.rel_data.data() + pool.rel_slot.at(id) * dim, adam.rel.m.data() + off,
                   adam.rel.v.data() + off, dim, cfg, bc1, bc2);
    }
    if (pool.conex) {
        adam.kernels.ensure(pool.kernels.size());
        adam.kernel_bias.ensure(pool.kernel_bias.size());
        adam.proj_weight.ensure(pool.proj_weight.size());
        adam.proj_bias.ensure(pool.proj_bias.size());
        apply_adam(model.conv.kernels.data(), pool.kernels.data(), adam.kernels.m.data(),
                   adam.kernels.v.data(), pool.kernels.size(), cfg, bc1, bc2);
        apply_adam(model.conv.kernel_bias.data(), pool.kernel_bias.data(),
                   adam.kernel_bias.m.data(), adam.kernel_bias.v.data(), pool.kernel_bias.size(),
                   cfg, bc1, bc2);
        apply_adam(model.conv.proj_weight.data(), pool.proj_weight.data(),
                   adam.proj_weight.m.data(), adam.proj_weight.v.data(), pool.proj_weight.size(),
                   cfg, bc1, bc2);
        apply_adam(model.conv.proj_bias.data(), pool.proj_bias.data(), adam.proj_bias.m.data(),
                   adam.proj_bias.v.data(), pool.proj_bias.size(), cfg, bc1, bc2);
    }
}

}  // namespace tdetail

// Trains a fresh model on g. Deterministic for threads = 1 under fixed seeds.
inline TrainResult train(const KnowledgeGraph& g, const ModelConfig& mcfg,
                         const TrainConfig& tcfg) {
    validate_config(mcfg);
    validate_train_config(tcfg);
    if (g.num_triples() == 0) throw TrainError("cannot train on an empty graph");
    if (g.num_entities() < 2) throw TrainError("cannot train on fewer than 2 entities");

    TrainResult result;
    result.model = Model::make(mcfg, g.num_entities(), g.num_relations());
    Model& model = result.model;
    Rng init_rng(mix_seed(tcfg.rng_seed, 0x1));
    model.init(init_rng);

    Rng order_rng(mix_seed(tcfg.rng_seed, 0x2));
    Rng corrupt_rng(mix_seed(tcfg.rng_seed, 0x3));

    const std::uint64_t n = g.num_triples();
    const std::uint32_t k = tcfg.negatives_per_positive;
    std::vector<std::uint32_t> order(n);
    for (std::uint64_t i = 0; i < n; ++i) order[i] = static_cast<std::uint32_t>(i);

    tdetail::AdamState adam;
    tdetail::GradPool pool;
    pool.configure(model);
    std::vector<tdetail::GradPool> worker_pools(tcfg.threads > 1 ? tcfg.threads : 0);
    for (auto& wp : worker_pools) wp.configure(model);

    // (triple, label) examples of the current batch, regenerated per batch.
    std::vector<std::pair<Triple, double>> examples;

    for (std::uint32_t epoch = 1; epoch <= tcfg.epochs; ++epoch) {
        order_rng.shuffle(order);
        double epoch_loss = 0.0;
        std::uint64_t epoch_examples = 0;

        for (std::uint64_t start = 0; start < n; start += tcfg.batch_size) {
            std::uint64_t stop = std::min<std::uint64_t>(n, start + tcfg.batch_size);
            examples.clear();
            for (std::uint64_t b = start; b < stop; ++b) {
                const Triple& pos = g.triples[order[b]];
                examples.emplace_back(pos, 1.0);
                for (const Triple& neg : negative_samples(pos, k, g.num_entities(), corrupt_rng))
                    examples.emplace_back(neg, 0.0);
            }
            const double inv = 1.0 / static_cast<double>(examples.size());

            double batch_loss = 0.0;
            if (tcfg.threads <= 1) {
                pool.clear(model);
                TripleGradients grads;
                for (const auto& [t, y] : examples) {
                    double s = score_and_gradients(model, t.head, t.relation, t.tail, grads);
                    batch_loss += tdetail::softplus(s) - y * s;
                    pool.add(grads, t, (tdetail::sigmoid(s) - y) * inv);
                }
            } else {
                // Workers own contiguous example slices and private pools;
                // merge order is fixed, so a given thread count is repeatable.
                std::vector<double> worker_loss(tcfg.threads, 0.0);
                std::vector<std::thread> workers;
                std::size_t per = (examples.size() + tcfg.threads - 1) / tcfg.threads;
                for (std::uint32_t w = 0; w < tcfg.threads; ++w) {
                    workers.emplace_back([&, w] {
                        std::size_t lo = w * per;
                        std::size_t hi = std::min(examples.size(), lo + per);
                        TripleGradients grads;
                        worker_pools[w].clear(model);
                        for (std::size_t i = lo; i < hi; ++i) {
                            const auto& [t, y] = examples[i];
                            double s =
                                score_and_gradients(model, t.head, t.relation, t.tail, grads);
                            worker_loss[w] += tdetail::softplus(s) - y * s;
                            worker_pools[w].add(grads, t, (tdetail::sigmoid(s) - y) * inv);
                        }
                    });
                }
                for (auto& th : workers) th.join();
                pool.clear(model);
                for (std::uint32_t w = 0; w < tcfg.threads; ++w) {
                    batch_loss += worker_loss[w];
                    pool.merge(worker_pools[w]);
                }
            }

            if (!std::isfinite(batch_loss))
                throw TrainError("non-finite loss at epoch " + std::to_string(epoch) + ", batch " +
                                 std::to_string(start / tcfg.batch_size));
            epoch_loss += batch_loss;
            epoch_examples += examples.size();
            tdetail::apply_batch(model, pool, adam, tcfg);
        }

        double mean = epoch_loss / static_cast<double>(epoch_examples);
        result.trace.mean_loss.push_back(mean);
        if (tcfg.on_epoch) tcfg.on_epoch(epoch, mean);
        if (tcfg.checkpoint_every && epoch % tcfg.checkpoint_every == 0 && tcfg.on_checkpoint)
            tcfg.on_checkpoint(epoch, model);
    }
    return result;
}

}  // namespace ukge
