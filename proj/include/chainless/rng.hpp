#pragma once

#include <cstdint>
#include <string_view>

#include "chainless/digest.hpp"

namespace chainless {

/// splitmix64 — tiny, bit-exact across platforms. std:: distributions are
/// avoided anywhere determinism feeds a fingerprint.
class Rng {
public:
    explicit Rng(uint64_t seed) : state_(seed) {}

    uint64_t next() {
        uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform in [0, bound); bound > 0.
    uint64_t below(uint64_t bound) { return next() % bound; }

    /// Sub-stream derivation: adding consumers never perturbs existing ones.
    static uint64_t derive(uint64_t root_seed, std::string_view component) {
        ByteWriter w;
        w.u64(root_seed);
        w.str(component);
        Bytes b = w.take();
        Digest d = sha256(b);
        uint64_t v = 0;
        for (int i = 0; i < 8; ++i) v = v << 8 | d.v[size_t(i)];
        return v;
    }

private:
    uint64_t state_;
};

}  // namespace chainless
