#pragma once

// Counter-based deterministic random stream. Output i is a function of
// (key, i) alone (splitmix64 finalizer over key + i*gamma), so streams keyed
// by (master seed, replication index, variable tag) reproduce bitwise under
// any scheduling and never share state.

#include <cmath>
#include <cstdint>

namespace fplsr {

class RandomStream {
  public:
    explicit RandomStream(std::uint64_t key) : key_(key) {}

    /// Stream keyed by (master seed, replication index, variable tag).
    static RandomStream keyed(std::uint64_t master, std::uint64_t rep, std::uint64_t tag) {
        std::uint64_t k = mix(master + kGamma);
        k = mix(k ^ mix(rep + kGamma * 7));
        k = mix(k ^ mix(tag + kGamma * 13));
        return RandomStream(k);
    }

    /// Independent child stream; tag values distinguish siblings.
    RandomStream fork(std::uint64_t tag) const {
        return RandomStream(mix(key_ ^ mix(tag + kGamma * 13)));
    }

    std::uint64_t next_u64() { return mix(key_ + kGamma * ++counter_); }

    /// Uniform in the open interval (0,1); never returns an endpoint.
    double uniform01() {
        return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
    }

    double uniform(double a, double b) { return a + uniform01() * (b - a); }

    /// Standard normal via Box-Muller; consumes two uniforms per call.
    double normal() {
        const double u1 = uniform01();
        const double u2 = uniform01();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * M_PI * u2);
    }

    double normal(double mean, double sd) { return mean + sd * normal(); }

  private:
    static constexpr std::uint64_t kGamma = 0x9E3779B97F4A7C15ull;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
        return z ^ (z >> 31);
    }

    std::uint64_t key_;
    std::uint64_t counter_ = 0;
};

}  // namespace fplsr
