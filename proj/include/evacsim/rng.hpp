#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace evacsim {

// Deterministic SplitMix64 stream. The standard-library distributions are
// implementation-defined, which would break byte-identical replay across
// toolchains, so every stochastic draw in the simulator goes through this.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : state_(seed) {}

    // Decorrelated substream: same seed, different tag -> independent stream.
    static Rng stream(std::uint64_t seed, std::uint64_t tag) {
        Rng r(seed);
        r.state_ = mix(r.state_ + 0x9e3779b97f4a7c15ULL * (tag + 1));
        return r;
    }

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // Uniform in [0, 1) with 53 random bits.
    double next_u01() {
        return static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
    }

    bool bernoulli(double p) { return next_u01() < p; }

    // Uniform integer in [0, n); n must be > 0.
    std::uint64_t below(std::uint64_t n) {
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    // Standard normal via Box-Muller (one value per two uniforms).
    double normal() {
        const double u1 = next_u01();
        const double u2 = next_u01();
        return std::sqrt(-2.0 * std::log1p(-u1)) *
               std::cos(6.283185307179586476925286766559 * u2);
    }

    template <typename T>
    void shuffle(std::vector<T>& v) {
        for (std::size_t i = v.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(below(i));
            std::swap(v[i - 1], v[j]);
        }
    }

private:
    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t state_;
};

// FNV-1a, used for trace hashing and config digests.
class Fnv1a {
public:
    void update(const void* data, std::size_t n) {
        const auto* p = static_cast<const unsigned char*>(data);
        for (std::size_t i = 0; i < n; ++i) {
            hash_ ^= p[i];
            hash_ *= 0x100000001b3ULL;
        }
    }
    void update(const std::string& s) { update(s.data(), s.size()); }
    std::uint64_t digest() const { return hash_; }

private:
    std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace evacsim
