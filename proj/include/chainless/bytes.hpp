#pragma once

#include <array>
#include <cstdint>
#include <cstring>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace chainless {

using Bytes = std::vector<uint8_t>;

enum class Errc {
    ok = 0,
    rejected_input,
    continuity,
    out_of_range,
    queue_closed,
    unknown_block,
    pre_state_mismatch,
    insufficient_validators,
    invalid_amount,
    double_claim,
    stale_or_invalid_proof,
    pessimistic_violation,
    missing_chain,
    duplicate_delivery,
    non_accepted_receipt,
    digest_mismatch,
    continuity_violation,
    unknown_app,
    unknown_reference,
    data_unavailable,
    config,
    io,
    overwrite,
};

/// Exception carrying a stable error code; the C API maps codes 1:1.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& what) : std::runtime_error(what), code_(code) {}
    Errc code() const { return code_; }

private:
    Errc code_;
};

// --- canonical encoding: big-endian, length-prefixed ---

class ByteWriter {
public:
    void u8(uint8_t v) { buf_.push_back(v); }
    void u32(uint32_t v) {
        uint8_t t[4];
        for (int i = 0; i < 4; ++i) t[i] = uint8_t(v >> (8 * (3 - i)));
        raw(t, 4);
    }
    void u64(uint64_t v) {
        uint8_t t[8];
        for (int i = 0; i < 8; ++i) t[i] = uint8_t(v >> (8 * (7 - i)));
        raw(t, 8);
    }
    void reserve(size_t additional) { buf_.reserve(buf_.size() + additional); }
    void raw(const uint8_t* p, size_t n) { buf_.insert(buf_.end(), p, p + n); }
    void raw(const Bytes& b) { raw(b.data(), b.size()); }
    template <size_t N>
    void raw(const std::array<uint8_t, N>& a) { raw(a.data(), N); }
    void bytes(const Bytes& b) {
        u32(uint32_t(b.size()));
        raw(b);
    }
    void str(std::string_view s) {
        u32(uint32_t(s.size()));
        raw(reinterpret_cast<const uint8_t*>(s.data()), s.size());
    }
    Bytes take() { return std::move(buf_); }
    const Bytes& view() const { return buf_; }

private:
    Bytes buf_;
};

class ByteReader {
public:
    explicit ByteReader(const Bytes& b) : p_(b.data()), end_(b.data() + b.size()) {}
    ByteReader(const uint8_t* p, size_t n) : p_(p), end_(p + n) {}

    uint8_t u8() {
        need(1);
        return *p_++;
    }
    uint32_t u32() {
        need(4);
        uint32_t v = 0;
        for (int i = 0; i < 4; ++i) v = (v << 8) | *p_++;
        return v;
    }
    uint64_t u64() {
        need(8);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = (v << 8) | *p_++;
        return v;
    }
    Bytes raw(size_t n) {
        need(n);
        Bytes out(p_, p_ + n);
        p_ += n;
        return out;
    }
    template <size_t N>
    std::array<uint8_t, N> arr() {
        need(N);
        std::array<uint8_t, N> out{};
        std::memcpy(out.data(), p_, N);
        p_ += N;
        return out;
    }
    Bytes bytes() { return raw(u32()); }
    std::string str() {
        Bytes b = bytes();
        return std::string(b.begin(), b.end());
    }
    bool done() const { return p_ == end_; }
    size_t remaining() const { return size_t(end_ - p_); }

private:
    void need(size_t n) const {
        if (size_t(end_ - p_) < n) throw Error(Errc::io, "truncated encoding");
    }
    const uint8_t* p_;
    const uint8_t* end_;
};

std::string to_hex(const uint8_t* p, size_t n);
std::string to_hex(const Bytes& b);
std::optional<Bytes> from_hex(std::string_view s);

std::string base64_encode(const Bytes& b);
std::optional<Bytes> base64_decode(std::string_view s);

inline Bytes to_bytes(std::string_view s) {
    return Bytes(s.begin(), s.end());
}

}  // namespace chainless
