#pragma once
// Binary I/O primitives shared by the graph and checkpoint formats:
// little-endian field access independent of host byte order, FNV-1a 64
// checksums, and transparent gzip decompression for N-Triples dumps.

#include <zlib.h>

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <istream>
#include <memory>
#include <ostream>
#include <string>
#include <vector>

#include "ukge/errors.hpp"

namespace ukge {

class Fnv1a64 {
public:
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 1099511628211ULL;
        }
    }
    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 1469598103934665603ULL;
};

namespace detail {

inline void encode_u32le(std::uint32_t v, unsigned char out[4]) {
    out[0] = static_cast<unsigned char>(v);
    out[1] = static_cast<unsigned char>(v >> 8);
    out[2] = static_cast<unsigned char>(v >> 16);
    out[3] = static_cast<unsigned char>(v >> 24);
}

inline void encode_u64le(std::uint64_t v, unsigned char out[8]) {
    for (int i = 0; i < 8; ++i) out[i] = static_cast<unsigned char>(v >> (8 * i));
}

inline std::uint32_t decode_u32le(const unsigned char in[4]) {
    return static_cast<std::uint32_t>(in[0]) | static_cast<std::uint32_t>(in[1]) << 8 |
           static_cast<std::uint32_t>(in[2]) << 16 | static_cast<std::uint32_t>(in[3]) << 24;
}

inline std::uint64_t decode_u64le(const unsigned char in[8]) {
    std::uint64_t v = 0;
    for (int i = 7; i >= 0; --i) v = v << 8 | in[i];
    return v;
}

}  // namespace detail

// Checksumming little-endian writer over an ostream.
class BinaryWriter {
public:
    explicit BinaryWriter(std::ostream& out) : out_(out) {}

    void bytes(const void* data, std::size_t n) {
        out_.write(static_cast<const char*>(data), static_cast<std::streamsize>(n));
        if (!out_) throw FormatError("write failed");
        hash_.update(data, n);
    }
    void u8(std::uint8_t v) { bytes(&v, 1); }
    void u32(std::uint32_t v) {
        unsigned char buf[4];
        detail::encode_u32le(v, buf);
        bytes(buf, 4);
    }
    void u64(std::uint64_t v) {
        unsigned char buf[8];
        detail::encode_u64le(v, buf);
        bytes(buf, 8);
    }
    void f64(double v) { u64(std::bit_cast<std::uint64_t>(v)); }
    void str(const std::string& s) {
        if (s.size() > 0xFFFFFFFFull) throw FormatError("string too long for format");
        u32(static_cast<std::uint32_t>(s.size()));
        if (!s.empty()) bytes(s.data(), s.size());
    }
    std::uint64_t checksum() const { return hash_.digest(); }

private:
    std::ostream& out_;
    Fnv1a64 hash_;
};

// Checksumming little-endian reader; throws FormatError on short reads.
class BinaryReader {
public:
    explicit BinaryReader(std::istream& in) : in_(in) {}

    void bytes(void* data, std::size_t n) {
        in_.read(static_cast<char*>(data), static_cast<std::streamsize>(n));
        if (static_cast<std::size_t>(in_.gcount()) != n)
            throw FormatError("unexpected end of file");
        hash_.update(data, n);
    }
    std::uint8_t u8() {
        std::uint8_t v;
        bytes(&v, 1);
        return v;
    }
    std::uint32_t u32() {
        unsigned char buf[4];
        bytes(buf, 4);
        return detail::decode_u32le(buf);
    }
    std::uint64_t u64() {
        unsigned char buf[8];
        bytes(buf, 8);
        return detail::decode_u64le(buf);
    }
    double f64() { return std::bit_cast<double>(u64()); }
    std::string str(std::size_t max_len = 1 << 24) {
        std::uint32_t len = u32();
        if (len > max_len) throw FormatError("string length out of range");
        std::string s(len, '\0');
        if (len) bytes(s.data(), len);
        return s;
    }
    std::uint64_t checksum() const { return hash_.digest(); }

private:
    std::istream& in_;
    Fnv1a64 hash_;
};

// Inflating streambuf over a gzip-compressed source.
class GzipStreamBuf : public std::streambuf {
public:
    explicit GzipStreamBuf(std::istream& source)
        : source_(source), in_(1 << 16), out_(1 << 16) {
        zs_.zalloc = Z_NULL;
        zs_.zfree = Z_NULL;
        zs_.opaque = Z_NULL;
        // 15 window bits + 16 selects gzip framing.
        if (inflateInit2(&zs_, 15 + 16) != Z_OK)
            throw FormatError("inflateInit failed");
        open_ = true;
    }
    ~GzipStreamBuf() override {
        if (open_) inflateEnd(&zs_);
    }
    GzipStreamBuf(const GzipStreamBuf&) = delete;
    GzipStreamBuf& operator=(const GzipStreamBuf&) = delete;

protected:
    int_type underflow() override {
        if (gptr() < egptr()) return traits_type::to_int_type(*gptr());
        if (done_) return traits_type::eof();
        zs_.next_out = reinterpret_cast<Bytef*>(out_.data());
        zs_.avail_out = static_cast<uInt>(out_.size());
        while (zs_.avail_out == out_.size()) {
            if (zs_.avail_in == 0 && !source_eof_) {
                source_.read(in_.data(), static_cast<std::streamsize>(in_.size()));
                zs_.avail_in = static_cast<uInt>(source_.gcount());
                zs_.next_in = reinterpret_cast<Bytef*>(in_.data());
                if (zs_.avail_in == 0) source_eof_ = true;
            }
            int rc = inflate(&zs_, source_eof_ ? Z_FINISH : Z_NO_FLUSH);
            if (rc == Z_STREAM_END) {
                done_ = true;
                break;
            }
            if (rc != Z_OK && rc != Z_BUF_ERROR)
                throw FormatError(std::string("gzip inflate error: ") +
                                  (zs_.msg ? zs_.msg : "corrupt stream"));
            if (rc == Z_BUF_ERROR && source_eof_)
                throw FormatError("gzip stream truncated");
        }
        std::size_t produced = out_.size() - zs_.avail_out;
        if (produced == 0) return traits_type::eof();
        setg(out_.data(), out_.data(), out_.data() + produced);
        return traits_type::to_int_type(*gptr());
    }

private:
    std::istream& source_;
    z_stream zs_{};
    std::vector<char> in_, out_;
    bool open_ = false;
    bool source_eof_ = false;
    bool done_ = false;
};

// istream owning a gzip source plus its inflating buffer.
class GzipIstream : public std::istream {
public:
    explicit GzipIstream(std::unique_ptr<std::istream> source)
        : std::istream(nullptr), source_(std::move(source)), buf_(*source_) {
        rdbuf(&buf_);
    }

private:
    std::unique_ptr<std::istream> source_;
    GzipStreamBuf buf_;
};

inline bool has_gzip_magic(std::istream& in) {
    int c0 = in.peek();
    if (c0 != 0x1f) return false;
    in.get();
    int c1 = in.peek();
    in.unget();
    return c1 == 0x8b;
}

// Opens a text input, transparently inflating gzip files (detected by the
// 1f 8b magic, not the extension).
inline std::unique_ptr<std::istream> open_text_input(const std::string& path) {
    auto file = std::make_unique<std::ifstream>(path, std::ios::binary);
    if (!*file) throw DataError("cannot open input file: " + path);
    if (has_gzip_magic(*file)) return std::make_unique<GzipIstream>(std::move(file));
    return file;
}

}  // namespace ukge
