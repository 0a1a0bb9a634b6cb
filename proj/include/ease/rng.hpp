#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <string_view>

namespace ease {

/// Deterministic random stream. Thin wrapper over mt19937_64 with hand-rolled
/// bounded draws so results do not depend on the standard library's
/// distribution implementations.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform real in [0, 1) with 53 bits of precision.
    double next_real() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    /// Uniform index in [0, n). n must be >= 1.
    std::size_t next_index(std::size_t n) {
        // multiply-shift rejection-free mapping is fine here; bias is < 2^-64*n
        // and irrelevant for the distributions we test.
        return static_cast<std::size_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    bool bernoulli(double p) { return next_real() < p; }

private:
    std::mt19937_64 engine_;
};

/// Derives labeled sub-streams from one task seed, so modules that draw
/// randomness cannot perturb each other's sequences.
class SeedSplitter {
public:
    explicit SeedSplitter(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t derive(std::string_view label) const {
        // FNV-1a over the label, mixed with the task seed.
        std::uint64_t h = 14695981039346656037ull;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        h ^= seed_ + 0x9e3779b97f4a7c15ull + (h << 6) + (h >> 2);
        return h;
    }

    Rng stream(std::string_view label) const { return Rng(derive(label)); }

private:
    std::uint64_t seed_;
};

}  // namespace ease
