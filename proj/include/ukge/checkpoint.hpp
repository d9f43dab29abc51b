#pragma once
// Embedding checkpoint format.
//
// Layout ("UKE1"):
//   magic   4 bytes "UKE1"
//   kind    u8 (0 distmult, 1 complex, 2 qmult, 3 conex)
//   dim     u32 LE
//   |E|     u64 LE
//   |R|     u64 LE
//   entity rows then relation rows, row-major f64 LE
//   conex only: channels u32, kernel u32, kernels, kernel_bias, proj_weight,
//               proj_bias (all f64 LE, sizes implied by dim/channels/kernel)
//   footer  u64 LE FNV-1a 64 of every preceding byte
//
// The checksum doubles as the data version exposed by the serving layer: two
// checkpoints with equal checksums hold identical parameters. The qmult
// normalization toggle is a scoring-time option, not a parameter, and is
// deliberately not serialized.

#include <cstdint>
#include <fstream>
#include <istream>
#include <optional>
#include <ostream>
#include <string>

#include "ukge/errors.hpp"
#include "ukge/io_util.hpp"
#include "ukge/models.hpp"

namespace ukge {

inline constexpr char kCheckpointMagic[4] = {'U', 'K', 'E', '1'};

inline void write_checkpoint(std::ostream& out, const Model& m) {
    BinaryWriter w(out);
    w.bytes(kCheckpointMagic, 4);
    w.u8(static_cast<std::uint8_t>(m.config.kind));
    w.u32(m.config.dim);
    w.u64(m.entities.rows());
    w.u64(m.relations.rows());
    for (double v : m.entities.data()) w.f64(v);
    for (double v : m.relations.data()) w.f64(v);
    if (m.config.kind == ModelKind::conex) {
        w.u32(m.conv.channels);
        w.u32(m.conv.kernel_size);
        for (double v : m.conv.kernels) w.f64(v);
        for (double v : m.conv.kernel_bias) w.f64(v);
        for (double v : m.conv.proj_weight) w.f64(v);
        for (double v : m.conv.proj_bias) w.f64(v);
    }
    w.u64(w.checksum());
}

// Reads and validates a checkpoint. `checksum_out`, when given, receives the
// stored footer checksum (the data version). `expected` rejects checkpoints
// of a different model kind.
inline Model read_checkpoint(std::istream& in, std::uint64_t* checksum_out = nullptr,
                             std::optional<ModelKind> expected = std::nullopt) {
    BinaryReader r(in);
    char magic[4];
    r.bytes(magic, 4);
    if (std::string_view(magic, 4) != std::string_view(kCheckpointMagic, 4))
        throw FormatError("not a checkpoint file (bad magic)");
    std::uint8_t kind_raw = r.u8();
    if (kind_raw > 3) throw FormatError("checkpoint has unknown model kind");
    auto kind = static_cast<ModelKind>(kind_raw);
    if (expected && kind != *expected)
        throw FormatError(std::string("checkpoint holds a ") + std::string(kind_name(kind)) +
                          " model, expected " + std::string(kind_name(*expected)));

    std::uint32_t dim = r.u32();
    std::uint64_t ne = r.u64();
    std::uint64_t nr = r.u64();
    if (dim == 0 || dim > (1u << 20)) throw FormatError("checkpoint dim out of range");
    if (ne > (1ull << 32) || nr > (1ull << 32) || (ne + nr) * dim > (1ull << 34))
        throw FormatError("checkpoint table size out of range");

    ModelConfig cfg;
    cfg.kind = kind;
    cfg.dim = dim;

    Model m;
    if (kind == ModelKind::conex) {
        // Sizes come after the rows; defer validate until conv params arrive.
        m.config = cfg;
        m.entities = EmbeddingTable(ne, dim);
        m.relations = EmbeddingTable(nr, dim);
    } else {
        validate_config(cfg);
        m = Model::make(cfg, ne, nr);
    }
    for (double& v : m.entities.data()) v = r.f64();
    for (double& v : m.relations.data()) v = r.f64();

    if (kind == ModelKind::conex) {
        cfg.conv_channels = r.u32();
        cfg.conv_kernel = r.u32();
        if (cfg.conv_channels > (1u << 12) || cfg.conv_kernel > 31)
            throw FormatError("checkpoint conv block out of range");
        validate_config(cfg);
        m.config = cfg;
        m.conv.channels = cfg.conv_channels;
        m.conv.kernel_size = cfg.conv_kernel;
        m.conv.kernels.resize(static_cast<std::size_t>(cfg.conv_channels) * cfg.conv_kernel *
                              cfg.conv_kernel);
        m.conv.kernel_bias.resize(cfg.conv_channels);
        m.conv.proj_weight.resize(static_cast<std::size_t>(dim) * m.conv.feature_size(dim));
        m.conv.proj_bias.resize(dim);
        for (double& v : m.conv.kernels) v = r.f64();
        for (double& v : m.conv.kernel_bias) v = r.f64();
        for (double& v : m.conv.proj_weight) v = r.f64();
        for (double& v : m.conv.proj_bias) v = r.f64();
    }

    std::uint64_t computed = r.checksum();
    std::uint64_t stored = r.u64();
    if (stored != computed) throw FormatError("checkpoint checksum mismatch");
    if (checksum_out) *checksum_out = stored;
    return m;
}

inline void save_checkpoint(const std::string& path, const Model& m) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw DataError("cannot open checkpoint for writing: " + path);
    write_checkpoint(out, m);
    out.flush();
    if (!out) throw DataError("checkpoint write failed: " + path);
}

inline Model load_checkpoint(const std::string& path, std::uint64_t* checksum_out = nullptr,
                             std::optional<ModelKind> expected = std::nullopt) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw DataError("cannot open checkpoint: " + path);
    return read_checkpoint(in, checksum_out, expected);
}

}  // namespace ukge
