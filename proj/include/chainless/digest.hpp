#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>

#include "chainless/bytes.hpp"

namespace chainless {

/// 32-byte SHA-256 output. Equality is byte equality; the all-zero value is
/// the genesis / empty-tree sentinel.
struct Digest {
    std::array<uint8_t, 32> v{};

    auto operator<=>(const Digest&) const = default;
    bool is_zero() const {
        for (auto b : v)
            if (b) return false;
        return true;
    }
    std::string hex() const { return to_hex(v.data(), v.size()); }

    static Digest zero() { return Digest{}; }
    static Digest from_hex(std::string_view s);
};

Digest sha256(const uint8_t* p, size_t n);
Digest sha256(const Bytes& b);

/// HMAC-SHA-256; stands in for enclave / validator signatures.
Digest hmac_sha256(const Bytes& key, const Bytes& msg);

inline void put_digest(ByteWriter& w, const Digest& d) { w.raw(d.v); }
inline Digest get_digest(ByteReader& r) { return Digest{r.arr<32>()}; }

}  // namespace chainless
