#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <string_view>

namespace pucl {

/// Deterministic random stream. One master seed fans out to labeled
/// substreams (init, expert, rollout per iteration, eval, ...) so components
/// can be re-seeded independently without coupling their draw counts.
/// Uniform/normal draws are derived from raw engine output rather than
/// std distributions, so sequences are identical across standard libraries.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Substream seed: splitmix64 over the master seed and an FNV-1a hash
    /// of the label (plus an integer tag, e.g. an iteration index).
    static std::uint64_t substream_seed(std::uint64_t master, std::string_view label,
                                        std::uint64_t tag = 0) {
        std::uint64_t h = 1469598103934665603ull;
        for (char c : label) {
            h ^= static_cast<unsigned char>(c);
            h *= 1099511628211ull;
        }
        return splitmix(splitmix(master ^ h) + tag);
    }

    static Rng substream(std::uint64_t master, std::string_view label, std::uint64_t tag = 0) {
        return Rng(substream_seed(master, label, tag));
    }

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform in [0, 1) with 53 random bits.
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

    /// Standard normal via Box-Muller (one value per call, cached pair).
    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double u1 = uniform01();
        double u2 = uniform01();
        while (u1 <= 0.0) u1 = uniform01();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 6.283185307179586476925286766559 * u2;
        spare_ = r * std::sin(t);
        have_spare_ = true;
        return r * std::cos(t);
    }

    double normal(double mean, double std) { return mean + std * normal(); }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // Rejection-free modulo is fine here; n is tiny relative to 2^64.
        return engine_() % n;
    }

  private:
    static std::uint64_t splitmix(std::uint64_t x) {
        x += 0x9e3779b97f4a7c15ull;
        x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
        x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
        return x ^ (x >> 31);
    }

    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace pucl
