#include "chainless/bytes.hpp"

#include <openssl/evp.h>
#include <openssl/hmac.h>

#include "chainless/digest.hpp"

namespace chainless {

static const char kHex[] = "0123456789abcdef";

std::string to_hex(const uint8_t* p, size_t n) {
    std::string out;
    out.reserve(n * 2);
    for (size_t i = 0; i < n; ++i) {
        out.push_back(kHex[p[i] >> 4]);
        out.push_back(kHex[p[i] & 0xf]);
    }
    return out;
}

std::string to_hex(const Bytes& b) { return to_hex(b.data(), b.size()); }

static int hex_val(char c) {
    if (c >= '0' && c <= '9') return c - '0';
    if (c >= 'a' && c <= 'f') return c - 'a' + 10;
    if (c >= 'A' && c <= 'F') return c - 'A' + 10;
    return -1;
}

std::optional<Bytes> from_hex(std::string_view s) {
    if (s.size() % 2) return std::nullopt;
    Bytes out;
    out.reserve(s.size() / 2);
    for (size_t i = 0; i < s.size(); i += 2) {
        int hi = hex_val(s[i]), lo = hex_val(s[i + 1]);
        if (hi < 0 || lo < 0) return std::nullopt;
        out.push_back(uint8_t(hi << 4 | lo));
    }
    return out;
}

static const char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

std::string base64_encode(const Bytes& b) {
    std::string out;
    out.reserve((b.size() + 2) / 3 * 4);
    size_t i = 0;
    for (; i + 3 <= b.size(); i += 3) {
        uint32_t v = uint32_t(b[i]) << 16 | uint32_t(b[i + 1]) << 8 | b[i + 2];
        out.push_back(kB64[v >> 18]);
        out.push_back(kB64[(v >> 12) & 63]);
        out.push_back(kB64[(v >> 6) & 63]);
        out.push_back(kB64[v & 63]);
    }
    size_t rem = b.size() - i;
    if (rem == 1) {
        uint32_t v = uint32_t(b[i]) << 16;
        out.push_back(kB64[v >> 18]);
        out.push_back(kB64[(v >> 12) & 63]);
        out += "==";
    } else if (rem == 2) {
        uint32_t v = uint32_t(b[i]) << 16 | uint32_t(b[i + 1]) << 8;
        out.push_back(kB64[v >> 18]);
        out.push_back(kB64[(v >> 12) & 63]);
        out.push_back(kB64[(v >> 6) & 63]);
        out.push_back('=');
    }
    return out;
}

static int b64_val(char c) {
    if (c >= 'A' && c <= 'Z') return c - 'A';
    if (c >= 'a' && c <= 'z') return c - 'a' + 26;
    if (c >= '0' && c <= '9') return c - '0' + 52;
    if (c == '+') return 62;
    if (c == '/') return 63;
    return -1;
}

std::optional<Bytes> base64_decode(std::string_view s) {
    if (s.size() % 4) return std::nullopt;
    Bytes out;
    out.reserve(s.size() / 4 * 3);
    for (size_t i = 0; i < s.size(); i += 4) {
        int pad = 0;
        uint32_t v = 0;
        for (int j = 0; j < 4; ++j) {
            char c = s[i + j];
            if (c == '=') {
                if (i + 4 != s.size() || j < 2) return std::nullopt;
                ++pad;
                v <<= 6;
                continue;
            }
            if (pad) return std::nullopt;
            int d = b64_val(c);
            if (d < 0) return std::nullopt;
            v = v << 6 | uint32_t(d);
        }
        out.push_back(uint8_t(v >> 16));
        if (pad < 2) out.push_back(uint8_t(v >> 8));
        if (pad < 1) out.push_back(uint8_t(v));
    }
    return out;
}

Digest sha256(const uint8_t* p, size_t n) {
    Digest d;
    unsigned int len = 32;
    EVP_Digest(p, n, d.v.data(), &len, EVP_sha256(), nullptr);
    return d;
}

Digest sha256(const Bytes& b) { return sha256(b.data(), b.size()); }

Digest hmac_sha256(const Bytes& key, const Bytes& msg) {
    Digest d;
    unsigned int len = 32;
    HMAC(EVP_sha256(), key.data(), int(key.size()), msg.data(), msg.size(), d.v.data(), &len);
    return d;
}

Digest Digest::from_hex(std::string_view s) {
    auto b = chainless::from_hex(s);
    if (!b || b->size() != 32) throw Error(Errc::io, "bad digest hex");
    Digest d;
    std::memcpy(d.v.data(), b->data(), 32);
    return d;
}

}  // namespace chainless
