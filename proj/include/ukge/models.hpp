#pragma once
// Scoring models over interned triples: DistMult, ComplEx, QMult, ConEx.
//
// Layout conventions shared by every model, the checkpoint format, and the
// serving layer:
//   - `dim` counts real parameters per embedding row for every model, so a
//     dim-100 ComplEx row holds 50 complex coefficients and a dim-100 QMult
//     row holds 25 quaternions.
//   - complex rows store all real parts first, all imaginary parts second;
//     quaternion rows store four contiguous blocks (w, x, y, z).
//   - ConEx stacks the head and relation rows into a 2 x dim grid, applies a
//     size-preserving zero-padded convolution with `channels` square kernels,
//     a ReLU, and an affine projection down to dim values that are read as a
//     complex gate multiplied into the ComplEx score.
//
// Scores are plain doubles; gradient routines return the score and fill
// d(score)/d(row) so callers can scale by d(loss)/d(score) themselves. The
// ComplEx and ConEx accumulations are kept structurally identical on purpose:
// with a unit gate the two models produce the same floating-point result, not
// merely a close one (builds disable FP contraction).

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ukge/core.hpp"
#include "ukge/errors.hpp"
#include "ukge/rng.hpp"

namespace ukge {

enum class ModelKind : std::uint8_t { distmult = 0, complex_ = 1, qmult = 2, conex = 3 };

inline std::string_view kind_name(ModelKind k) {
    switch (k) {
        case ModelKind::distmult: return "distmult";
        case ModelKind::complex_: return "complex";
        case ModelKind::qmult: return "qmult";
        case ModelKind::conex: return "conex";
    }
    throw ConfigError("unknown model kind");
}

inline ModelKind kind_from_name(std::string_view name) {
    if (name == "distmult") return ModelKind::distmult;
    if (name == "complex") return ModelKind::complex_;
    if (name == "qmult") return ModelKind::qmult;
    if (name == "conex") return ModelKind::conex;
    throw ConfigError("unknown model kind: " + std::string(name));
}

// Convolution block of ConEx. Kernels are `channels` square k x k filters
// applied to the 2 x dim input grid with zero padding (k odd keeps the output
// grid the same shape). The projection maps the flattened channels * 2 * dim
// ReLU activations to dim gate values.
struct ConvParams {
    std::uint32_t channels = 0;
    std::uint32_t kernel_size = 0;
    std::vector<double> kernels;      // channels * k * k, row-major per channel
    std::vector<double> kernel_bias;  // channels
    std::vector<double> proj_weight;  // dim * (channels * 2 * dim), row-major
    std::vector<double> proj_bias;    // dim

    std::size_t feature_size(std::uint32_t dim) const {
        return static_cast<std::size_t>(channels) * 2 * dim;
    }
};

struct ModelConfig {
    ModelKind kind = ModelKind::distmult;
    std::uint32_t dim = 32;
    bool qmult_normalize = false;  // unit-normalize relation quaternions before composing
    std::uint32_t conv_channels = 8;   // conex only
    std::uint32_t conv_kernel = 3;     // conex only, must be odd
};

inline void validate_config(const ModelConfig& c) {
    if (c.dim == 0) throw ConfigError("embedding dim must be positive");
    if ((c.kind == ModelKind::complex_ || c.kind == ModelKind::conex) && c.dim % 2 != 0)
        throw ConfigError("complex-valued models need an even dim");
    if (c.kind == ModelKind::qmult && c.dim % 4 != 0)
        throw ConfigError("qmult needs dim divisible by 4");
    if (c.kind == ModelKind::conex) {
        if (c.conv_channels == 0) throw ConfigError("conex needs at least one channel");
        if (c.conv_kernel == 0 || c.conv_kernel % 2 == 0)
            throw ConfigError("conex kernel size must be odd");
    }
}

// Dense row-major table of embedding rows.
class EmbeddingTable {
public:
    EmbeddingTable() = default;
    EmbeddingTable(std::size_t rows, std::uint32_t dim)
        : dim_(dim), data_(rows * static_cast<std::size_t>(dim), 0.0) {}

    std::size_t rows() const { return dim_ == 0 ? 0 : data_.size() / dim_; }
    std::uint32_t dim() const { return dim_; }

    std::span<double> row(std::size_t i) {
        return std::span<double>(data_.data() + i * dim_, dim_);
    }
    std::span<const double> row(std::size_t i) const {
        return std::span<const double>(data_.data() + i * dim_, dim_);
    }

    std::vector<double>& data() { return data_; }
    const std::vector<double>& data() const { return data_; }

private:
    std::uint32_t dim_ = 0;
    std::vector<double> data_;
};

struct Model {
    ModelConfig config;
    EmbeddingTable entities;
    EmbeddingTable relations;
    ConvParams conv;  // populated only for ModelKind::conex

    static Model make(const ModelConfig& cfg, std::size_t num_entities, std::size_t num_relations) {
        validate_config(cfg);
        Model m;
        m.config = cfg;
        m.entities = EmbeddingTable(num_entities, cfg.dim);
        m.relations = EmbeddingTable(num_relations, cfg.dim);
        if (cfg.kind == ModelKind::conex) {
            m.conv.channels = cfg.conv_channels;
            m.conv.kernel_size = cfg.conv_kernel;
            m.conv.kernels.assign(
                static_cast<std::size_t>(cfg.conv_channels) * cfg.conv_kernel * cfg.conv_kernel,
                0.0);
            m.conv.kernel_bias.assign(cfg.conv_channels, 0.0);
            m.conv.proj_weight.assign(static_cast<std::size_t>(cfg.dim) *
                                          m.conv.feature_size(cfg.dim),
                                      0.0);
            m.conv.proj_bias.assign(cfg.dim, 0.0);
        }
        return m;
    }

    // Uniform init: rows in +-1/sqrt(dim), kernels in +-1/sqrt(k*k), the
    // projection in +-1/sqrt(feature size). Biases start at zero.
    void init(Rng& rng) {
        double lim = 1.0 / std::sqrt(static_cast<double>(config.dim));
        for (double& v : entities.data()) v = rng.range(-lim, lim);
        for (double& v : relations.data()) v = rng.range(-lim, lim);
        if (config.kind == ModelKind::conex) {
            double klim = 1.0 / std::sqrt(static_cast<double>(conv.kernel_size) * conv.kernel_size);
            for (double& v : conv.kernels) v = rng.range(-klim, klim);
            double plim = 1.0 / std::sqrt(static_cast<double>(conv.feature_size(config.dim)));
            for (double& v : conv.proj_weight) v = rng.range(-plim, plim);
        }
    }
};

// ---------------------------------------------------------------------------
// Scores.

inline double score_distmult(std::span<const double> h, std::span<const double> r,
                             std::span<const double> t) {
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) acc += h[i] * r[i] * t[i];
    return acc;
}

// Re(sum_i h_i r_i conj(t_i)); first half of each row is the real part.
inline double score_complex(std::span<const double> h, std::span<const double> r,
                            std::span<const double> t) {
    const std::size_t half = h.size() / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        double wre = h[i] * r[i] - h[half + i] * r[half + i];
        double wim = h[i] * r[half + i] + h[half + i] * r[i];
        acc += wre * t[i] + wim * t[half + i];
    }
    return acc;
}

namespace mdetail {

// Hamilton product (a ⊗ b) of component-i quaternions drawn from four-block
// rows; writes the four result components.
struct QuatBlocks {
    const double* w;
    const double* x;
    const double* y;
    const double* z;
    explicit QuatBlocks(std::span<const double> row)
        : w(row.data()),
          x(row.data() + row.size() / 4),
          y(row.data() + 2 * (row.size() / 4)),
          z(row.data() + 3 * (row.size() / 4)) {}
};

inline void hamilton(double aw, double ax, double ay, double az, double bw, double bx, double by,
                     double bz, double& ow, double& ox, double& oy, double& oz) {
    ow = aw * bw - ax * bx - ay * by - az * bz;
    ox = aw * bx + ax * bw + ay * bz - az * by;
    oy = aw * by - ax * bz + ay * bw + az * bx;
    oz = aw * bz + ax * by - ay * bx + az * bw;
}

}  // namespace mdetail

// <h ⊗ r, t> over quaternion components; `normalize` rescales each relation
// quaternion to unit norm first (zero-norm quaternions pass through).
inline double score_qmult(std::span<const double> h, std::span<const double> r,
                          std::span<const double> t, bool normalize) {
    const std::size_t q = h.size() / 4;
    mdetail::QuatBlocks H(h), R(r), T(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        double rw = R.w[i], rx = R.x[i], ry = R.y[i], rz = R.z[i];
        if (normalize) {
            double n = std::sqrt(rw * rw + rx * rx + ry * ry + rz * rz);
            if (n > 1e-12) {
                rw /= n;
                rx /= n;
                ry /= n;
                rz /= n;
            }
        }
        double ow, ox, oy, oz;
        mdetail::hamilton(H.w[i], H.x[i], H.y[i], H.z[i], rw, rx, ry, rz, ow, ox, oy, oz);
        acc += ow * T.w[i] + ox * T.x[i] + oy * T.y[i] + oz * T.z[i];
    }
    return acc;
}

namespace mdetail {

// ConEx convolution forward pass. `pre` receives the channels*2*dim pre-ReLU
// activations; `gamma` the dim projected gate values.
inline void conex_forward(std::span<const double> h, std::span<const double> r,
                          const ConvParams& cp, std::vector<double>& pre,
                          std::vector<double>& gamma) {
    const std::size_t dim = h.size();
    const int k = static_cast<int>(cp.kernel_size);
    const int p = k / 2;
    const std::size_t feat = cp.feature_size(static_cast<std::uint32_t>(dim));
    pre.assign(feat, 0.0);

    auto grid = [&](int row, long col) -> double {
        if (col < 0 || col >= static_cast<long>(dim)) return 0.0;
        if (row == 0) return h[static_cast<std::size_t>(col)];
        if (row == 1) return r[static_cast<std::size_t>(col)];
        return 0.0;
    };

    for (std::uint32_t c = 0; c < cp.channels; ++c) {
        const double* kern = cp.kernels.data() + static_cast<std::size_t>(c) * k * k;
        for (int row = 0; row < 2; ++row) {
            for (long col = 0; col < static_cast<long>(dim); ++col) {
                double acc = cp.kernel_bias[c];
                for (int kr = 0; kr < k; ++kr)
                    for (int kc = 0; kc < k; ++kc)
                        acc += kern[kr * k + kc] * grid(row + kr - p, col + kc - p);
                pre[(static_cast<std::size_t>(c) * 2 + row) * dim + col] = acc;
            }
        }
    }

    gamma.assign(dim, 0.0);
    for (std::size_t j = 0; j < dim; ++j) {
        double acc = cp.proj_bias[j];
        const double* wrow = cp.proj_weight.data() + j * feat;
        for (std::size_t f = 0; f < feat; ++f) acc += wrow[f] * std::max(0.0, pre[f]);
        gamma[j] = acc;
    }
}

}  // namespace mdetail

// Re(sum_i gamma_i h_i r_i conj(t_i)) with gamma produced by the convolution
// over (h, r). The per-component accumulation mirrors score_complex exactly so
// a unit gate reproduces the ComplEx score bit for bit.
inline double score_conex(std::span<const double> h, std::span<const double> r,
                          std::span<const double> t, const ConvParams& cp) {
    std::vector<double> pre, gamma;
    mdetail::conex_forward(h, r, cp, pre, gamma);
    const std::size_t half = h.size() / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        double wre = h[i] * r[i] - h[half + i] * r[half + i];
        double wim = h[i] * r[half + i] + h[half + i] * r[i];
        double gre = gamma[i] * wre - gamma[half + i] * wim;
        double gim = gamma[i] * wim + gamma[half + i] * wre;
        acc += gre * t[i] + gim * t[half + i];
    }
    return acc;
}

inline double score_triple(const Model& m, EntityId h, RelationId r, EntityId t) {
    auto hv = m.entities.row(h);
    auto rv = m.relations.row(r);
    auto tv = m.entities.row(t);
    switch (m.config.kind) {
        case ModelKind::distmult: return score_distmult(hv, rv, tv);
        case ModelKind::complex_: return score_complex(hv, rv, tv);
        case ModelKind::qmult: return score_qmult(hv, rv, tv, m.config.qmult_normalize);
        case ModelKind::conex: return score_conex(hv, rv, tv, m.conv);
    }
    throw ConfigError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Gradients. Each grad_* returns the score and fills d(score)/d(row); the
// ConEx variant additionally fills the convolution parameter gradients.

struct TripleGradients {
    std::vector<double> head, relation, tail;
    std::vector<double> kernels, kernel_bias, proj_weight, proj_bias;  // conex only

    void reset(const Model& m) {
        head.assign(m.config.dim, 0.0);
        relation.assign(m.config.dim, 0.0);
        tail.assign(m.config.dim, 0.0);
        if (m.config.kind == ModelKind::conex) {
            kernels.assign(m.conv.kernels.size(), 0.0);
            kernel_bias.assign(m.conv.kernel_bias.size(), 0.0);
            proj_weight.assign(m.conv.proj_weight.size(), 0.0);
            proj_bias.assign(m.conv.proj_bias.size(), 0.0);
        } else {
            kernels.clear();
            kernel_bias.clear();
            proj_weight.clear();
            proj_bias.clear();
        }
    }
};

inline double grad_distmult(std::span<const double> h, std::span<const double> r,
                            std::span<const double> t, TripleGradients& g) {
    double acc = 0.0;
    for (std::size_t i = 0; i < h.size(); ++i) {
        acc += h[i] * r[i] * t[i];
        g.head[i] = r[i] * t[i];
        g.relation[i] = h[i] * t[i];
        g.tail[i] = h[i] * r[i];
    }
    return acc;
}

inline double grad_complex(std::span<const double> h, std::span<const double> r,
                           std::span<const double> t, TripleGradients& g) {
    const std::size_t half = h.size() / 2;
    double acc = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        double hre = h[i], him = h[half + i];
        double rre = r[i], rim = r[half + i];
        double tre = t[i], tim = t[half + i];
        double wre = hre * rre - him * rim;
        double wim = hre * rim + him * rre;
        acc += wre * tre + wim * tim;
        // d Re(h r conj(t)) via the product forms of each factor
        g.head[i] = rre * tre + rim * tim;
        g.head[half + i] = rre * tim - rim * tre;
        g.relation[i] = hre * tre + him * tim;
        g.relation[half + i] = hre * tim - him * tre;
        g.tail[i] = wre;
        g.tail[half + i] = wim;
    }
    return acc;
}

inline double grad_qmult(std::span<const double> h, std::span<const double> r,
                         std::span<const double> t, bool normalize, TripleGradients& g) {
    const std::size_t q = h.size() / 4;
    mdetail::QuatBlocks H(h), R(r), T(t);
    double acc = 0.0;
    for (std::size_t i = 0; i < q; ++i) {
        double hw = H.w[i], hx = H.x[i], hy = H.y[i], hz = H.z[i];
        double rw = R.w[i], rx = R.x[i], ry = R.y[i], rz = R.z[i];
        double tw = T.w[i], tx = T.x[i], ty = T.y[i], tz = T.z[i];

        double n = 1.0;
        bool scaled = false;
        if (normalize) {
            n = std::sqrt(rw * rw + rx * rx + ry * ry + rz * rz);
            if (n > 1e-12) {
                rw /= n;
                rx /= n;
                ry /= n;
                rz /= n;
                scaled = true;
            }
        }

        double ow, ox, oy, oz;
        mdetail::hamilton(hw, hx, hy, hz, rw, rx, ry, rz, ow, ox, oy, oz);
        acc += ow * tw + ox * tx + oy * ty + oz * tz;

        // <h x r, t> = <h, t x conj(r)> = <r, conj(h) x t>
        double gw, gx, gy, gz;
        mdetail::hamilton(tw, tx, ty, tz, rw, -rx, -ry, -rz, gw, gx, gy, gz);
        g.head[i] = gw;
        g.head[q + i] = gx;
        g.head[2 * q + i] = gy;
        g.head[3 * q + i] = gz;

        double vw, vx, vy, vz;
        mdetail::hamilton(hw, -hx, -hy, -hz, tw, tx, ty, tz, vw, vx, vy, vz);
        if (scaled) {
            // r' = r / n: project out the radial component, then rescale.
            double dot = vw * rw + vx * rx + vy * ry + vz * rz;
            vw = (vw - dot * rw) / n;
            vx = (vx - dot * rx) / n;
            vy = (vy - dot * ry) / n;
            vz = (vz - dot * rz) / n;
        }
        g.relation[i] = vw;
        g.relation[q + i] = vx;
        g.relation[2 * q + i] = vy;
        g.relation[3 * q + i] = vz;

        g.tail[i] = ow;
        g.tail[q + i] = ox;
        g.tail[2 * q + i] = oy;
        g.tail[3 * q + i] = oz;
    }
    return acc;
}

inline double grad_conex(std::span<const double> h, std::span<const double> r,
                         std::span<const double> t, const ConvParams& cp, TripleGradients& g) {
    const std::size_t dim = h.size();
    const std::size_t half = dim / 2;
    const int k = static_cast<int>(cp.kernel_size);
    const int p = k / 2;
    const std::size_t feat = cp.feature_size(static_cast<std::uint32_t>(dim));

    std::vector<double> pre, gamma;
    mdetail::conex_forward(h, r, cp, pre, gamma);

    std::vector<double> dgamma(dim, 0.0);
    double acc = 0.0;
    for (std::size_t i = 0; i < half; ++i) {
        double hre = h[i], him = h[half + i];
        double rre = r[i], rim = r[half + i];
        double tre = t[i], tim = t[half + i];
        double gre = gamma[i], gim = gamma[half + i];

        double wre = hre * rre - him * rim;
        double wim = hre * rim + him * rre;
        double zre = gre * wre - gim * wim;
        double zim = gre * wim + gim * wre;
        acc += zre * tre + zim * tim;

        // score_i = Re(gamma w conj(t)): u = w conj(t), v = gamma conj(t)
        double ure = wre * tre + wim * tim;
        double uim = wim * tre - wre * tim;
        dgamma[i] = ure;
        dgamma[half + i] = -uim;

        g.tail[i] = zre;
        g.tail[half + i] = zim;

        double vre = gre * tre + gim * tim;
        double vim = gim * tre - gre * tim;
        // d/dw as a complex number is (vre, -vim); chain through w = h r.
        g.head[i] = vre * rre - vim * rim;
        g.head[half + i] = -(vim * rre + vre * rim);
        g.relation[i] = vre * hre - vim * him;
        g.relation[half + i] = -(vim * hre + vre * him);
    }

    // Projection layer.
    for (std::size_t j = 0; j < dim; ++j) {
        g.proj_bias[j] = dgamma[j];
        double* gw = g.proj_weight.data() + j * feat;
        for (std::size_t f = 0; f < feat; ++f) gw[f] = dgamma[j] * std::max(0.0, pre[f]);
    }
    std::vector<double> dpre(feat, 0.0);
    for (std::size_t f = 0; f < feat; ++f) {
        if (pre[f] <= 0.0) continue;  // ReLU mask
        double acc_f = 0.0;
        for (std::size_t j = 0; j < dim; ++j) acc_f += dgamma[j] * cp.proj_weight[j * feat + f];
        dpre[f] = acc_f;
    }

    // Convolution layer: scatter each output-position gradient back onto the
    // kernels, the channel bias, and the input grid.
    std::vector<double> dgrid(2 * dim, 0.0);  // row 0 then row 1
    auto grid = [&](int row, long col) -> double {
        if (col < 0 || col >= static_cast<long>(dim)) return 0.0;
        if (row == 0) return h[static_cast<std::size_t>(col)];
        if (row == 1) return r[static_cast<std::size_t>(col)];
        return 0.0;
    };
    for (std::uint32_t c = 0; c < cp.channels; ++c) {
        const double* kern = cp.kernels.data() + static_cast<std::size_t>(c) * k * k;
        double* dkern = g.kernels.data() + static_cast<std::size_t>(c) * k * k;
        for (int row = 0; row < 2; ++row) {
            for (long col = 0; col < static_cast<long>(dim); ++col) {
                double d = dpre[(static_cast<std::size_t>(c) * 2 + row) * dim + col];
                if (d == 0.0) continue;
                g.kernel_bias[c] += d;
                for (int kr = 0; kr < k; ++kr) {
                    for (int kc = 0; kc < k; ++kc) {
                        int grow = row + kr - p;
                        long gcol = col + kc - p;
                        dkern[kr * k + kc] += d * grid(grow, gcol);
                        if ((grow == 0 || grow == 1) && gcol >= 0 &&
                            gcol < static_cast<long>(dim))
                            dgrid[static_cast<std::size_t>(grow) * dim + gcol] +=
                                d * kern[kr * k + kc];
                    }
                }
            }
        }
    }
    for (std::size_t j = 0; j < dim; ++j) {
        g.head[j] += dgrid[j];
        g.relation[j] += dgrid[dim + j];
    }
    return acc;
}

// Returns the score and d(score)/d(rows) (plus conv gradients for ConEx).
inline double score_and_gradients(const Model& m, EntityId h, RelationId r, EntityId t,
                                  TripleGradients& g) {
    g.reset(m);
    auto hv = m.entities.row(h);
    auto rv = m.relations.row(r);
    auto tv = m.entities.row(t);
    switch (m.config.kind) {
        case ModelKind::distmult: return grad_distmult(hv, rv, tv, g);
        case ModelKind::complex_: return grad_complex(hv, rv, tv, g);
        case ModelKind::qmult: return grad_qmult(hv, rv, tv, m.config.qmult_normalize, g);
        case ModelKind::conex: return grad_conex(hv, rv, tv, m.conv, g);
    }
    throw ConfigError("unknown model kind");
}

// ---------------------------------------------------------------------------
// Candidate scans used by evaluation: score every entity as head (or tail)
// of a fixed (relation, tail) / (head, relation) pair. DistMult, ComplEx and
// QMult reduce to a dot product against a precomputed query row; ConEx gates
// depend on the candidate on the head side, so that scan recomputes the
// forward pass per candidate.

inline void score_candidates_head(const Model& m, RelationId r, EntityId t,
                                  std::vector<double>& out) {
    const std::size_t n = m.entities.rows();
    const std::uint32_t dim = m.config.dim;
    out.assign(n, 0.0);
    auto rv = m.relations.row(r);
    auto tv = m.entities.row(t);
    switch (m.config.kind) {
        case ModelKind::distmult: {
            std::vector<double> q(dim);
            for (std::uint32_t i = 0; i < dim; ++i) q[i] = rv[i] * tv[i];
            for (std::size_t e = 0; e < n; ++e) {
                auto ev = m.entities.row(e);
                double acc = 0.0;
                for (std::uint32_t i = 0; i < dim; ++i) acc += ev[i] * q[i];
                out[e] = acc;
            }
            break;
        }
        case ModelKind::complex_: {
            const std::size_t half = dim / 2;
            std::vector<double> q(dim);
            for (std::size_t i = 0; i < half; ++i) {
                q[i] = rv[i] * tv[i] + rv[half + i] * tv[half + i];
                q[half + i] = rv[i] * tv[half + i] - rv[half + i] * tv[i];
            }
            for (std::size_t e = 0; e < n; ++e) {
                auto ev = m.entities.row(e);
                double acc = 0.0;
                for (std::uint32_t i = 0; i < dim; ++i) acc += ev[i] * q[i];
                out[e] = acc;
            }
            break;
        }
        case ModelKind::qmult: {
            const std::size_t qn = dim / 4;
            std::vector<double> q(dim);
            mdetail::QuatBlocks R(rv), T(tv);
            for (std::size_t i = 0; i < qn; ++i) {
                double rw = R.w[i], rx = R.x[i], ry = R.y[i], rz = R.z[i];
                if (m.config.qmult_normalize) {
                    double nn = std::sqrt(rw * rw + rx * rx + ry * ry + rz * rz);
                    if (nn > 1e-12) {
                        rw /= nn;
                        rx /= nn;
                        ry /= nn;
                        rz /= nn;
                    }
                }
                double gw, gx, gy, gz;
                mdetail::hamilton(T.w[i], T.x[i], T.y[i], T.z[i], rw, -rx, -ry, -rz, gw, gx, gy,
                                  gz);
                q[i] = gw;
                q[qn + i] = gx;
                q[2 * qn + i] = gy;
                q[3 * qn + i] = gz;
            }
            for (std::size_t e = 0; e < n; ++e) {
                auto ev = m.entities.row(e);
                double acc = 0.0;
                for (std::uint32_t i = 0; i < dim; ++i) acc += ev[i] * q[i];
                out[e] = acc;
            }
            break;
        }
        case ModelKind::conex: {
            for (std::size_t e = 0; e < n; ++e)
                out[e] = score_conex(m.entities.row(e), rv, tv, m.conv);
            break;
        }
    }
}

inline void score_candidates_tail(const Model& m, EntityId h, RelationId r,
                                  std::vector<double>& out) {
    const std::size_t n = m.entities.rows();
    const std::uint32_t dim = m.config.dim;
    out.assign(n, 0.0);
    auto hv = m.entities.row(h);
    auto rv = m.relations.row(r);
    switch (m.config.kind) {
        case ModelKind::distmult: {
            std::vector<double> q(dim);
            for (std::uint32_t i = 0; i < dim; ++i) q[i] = hv[i] * rv[i];
            for (std::size_t e = 0; e < n; ++e) {
                auto ev = m.entities.row(e);
                double acc = 0.0;
                for (std::uint32_t i = 0; i < dim; ++i) acc += ev[i] * q[i];
                out[e] = acc;
            }
            break;
        }
        case ModelKind::complex_:
        case ModelKind::conex: {
            const std::size_t half = dim / 2;
            std::vector<double> q(dim);
            if (m.config.kind == ModelKind::conex) {
                std::vector<double> pre, gamma;
                mdetail::conex_forward(hv, rv, m.conv, pre, gamma);
                for (std::size_t i = 0; i < half; ++i) {
                    double wre = hv[i] * rv[i] - hv[half + i] * rv[half + i];
                    double wim = hv[i] * rv[half + i] + hv[half + i] * rv[i];
                    // z = gamma * w; score(e) = Re(z conj(e)) = zre*ere + zim*eim
                    q[i] = gamma[i] * wre - gamma[half + i] * wim;
                    q[half + i] = gamma[i] * wim + gamma[half + i] * wre;
                }
            } else {
                for (std::size_t i = 0; i < half; ++i) {
                    q[i] = hv[i] * rv[i] - hv[half + i] * rv[half + i];
                    q[half + i] = hv[i] * rv[half + i] + hv[half + i] * rv[i];
                }
            }
            for (std::size_t e = 0; e < n; ++e) {
                auto ev = m.entities.row(e);
                double acc = 0.0;
                for (std::uint32_t i = 0; i < dim; ++i) acc += ev[i] * q[i];
                out[e] = acc;
            }
            break;
        }
        case ModelKind::qmult: {
            const std::size_t qn = dim / 4;
            std::vector<double> q(dim);
            mdetail::QuatBlocks H(hv), R(rv);
            for (std::size_t i = 0; i < qn; ++i) {
                double rw = R.w[i], rx = R.x[i], ry = R.y[i], rz = R.z[i];
                if (m.config.qmult_normalize) {
                    double nn = std::sqrt(rw * rw + rx * rx + ry * ry + rz * rz);
                    if (nn > 1e-12) {
                        rw /= nn;
                        rx /= nn;
                        ry /= nn;
                        rz /= nn;
                    }
                }
                double ow, ox, oy, oz;
                mdetail::hamilton(H.w[i], H.x[i], H.y[i], H.z[i], rw, rx, ry, rz, ow, ox, oy, oz);
                q[i] = ow;
                q[qn + i] = ox;
                q[2 * qn + i] = oy;
                q[3 * qn + i] = oz;
            }
            for (std::size_t e = 0; e < n; ++e) {
                auto ev = m.entities.row(e);
                double acc = 0.0;
                for (std::uint32_t i = 0; i < dim; ++i) acc += ev[i] * q[i];
                out[e] = acc;
            }
            break;
        }
    }
}

}  // namespace ukge
