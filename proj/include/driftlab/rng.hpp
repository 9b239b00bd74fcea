#pragma once

#include <cstdint>
#include <string_view>

namespace driftlab::rng {

// splitmix64 finalizer; bijective on 64-bit words.
constexpr uint64_t mix64(uint64_t z) {
    z += 0x9e3779b97f4a7c15ull;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

constexpr uint64_t kFnvOffset = 14695981039346656037ull;
constexpr uint64_t kFnvPrime = 1099511628211ull;

constexpr uint64_t fnv1a(std::string_view s, uint64_t h = kFnvOffset) {
    for (char c : s) {
        h ^= static_cast<unsigned char>(c);
        h *= kFnvPrime;
    }
    return h;
}

uint64_t fnv1a_bytes(const void* data, size_t n, uint64_t h = kFnvOffset);

// Stream key for (master seed, module, purpose). Alternate implementations can
// reproduce every draw in the project from the master seed and these labels.
constexpr uint64_t derive(uint64_t master, std::string_view module, std::string_view purpose) {
    return mix64(mix64(master) ^ fnv1a(purpose, fnv1a(module)));
}

// Indexed sub-stream of a derived key (per scene, per sample, per chunk, ...).
constexpr uint64_t substream(uint64_t key, uint64_t index) {
    return mix64(key ^ mix64(index + 0x632be59bd9b4e019ull));
}

// Counter-based generator: word (counter, channel) depends only on the key, so
// any draw can be reproduced or made in any order.
class Stream {
public:
    explicit Stream(uint64_t key) : key_(key) {}

    uint64_t word(uint64_t counter, uint64_t channel = 0) const {
        return mix64(mix64(key_ + 0x9e3779b97f4a7c15ull * channel) ^ mix64(counter));
    }

    // (0, 1]
    double uniform(uint64_t counter, uint64_t channel = 0) const {
        return static_cast<double>((word(counter, channel) >> 11) + 1) * 0x1.0p-53;
    }

    // standard normal, Box-Muller over two channels at the same counter
    double gauss(uint64_t counter) const;

    uint64_t key() const { return key_; }

private:
    uint64_t key_;
};

// Sequential convenience wrapper; one counter step per draw.
class Sequence {
public:
    explicit Sequence(uint64_t key, uint64_t start = 0) : s_(key), n_(start) {}
    explicit Sequence(Stream s, uint64_t start = 0) : s_(s), n_(start) {}

    uint64_t next_word() { return s_.word(n_++); }
    double uniform() { return s_.uniform(n_++); }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double gauss() { return s_.gauss(n_++); }
    // inclusive range
    int uniform_int(int lo, int hi) {
        return lo + static_cast<int>(next_word() % static_cast<uint64_t>(hi - lo + 1));
    }
    uint64_t counter() const { return n_; }

private:
    Stream s_;
    uint64_t n_;
};

}  // namespace driftlab::rng
