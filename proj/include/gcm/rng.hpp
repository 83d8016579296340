#pragma once

#include <cstdint>
#include <random>

namespace gcm {

// Deterministic standard-normal sampler. Box-Muller on top of mt19937_64 so
// that streams are reproducible across standard-library implementations
// (std::normal_distribution is not portable bit-for-bit).
class GaussianSampler {
  public:
    explicit GaussianSampler(std::uint64_t seed) : gen_(seed) {}

    // Uniform in (0, 1].
    double uniform() {
        return 1.0 - (static_cast<double>(gen_() >> 11)) * 0x1.0p-53;
    }

    double operator()() {
        if (has_spare_) {
            has_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double t = 2.0 * 3.14159265358979323846 * u2;
        spare_ = r * std::sin(t);
        has_spare_ = true;
        return r * std::cos(t);
    }

  private:
    std::mt19937_64 gen_;
    bool has_spare_ = false;
    double spare_ = 0.0;
};

// Mixes (seed, index) into an independent stream seed (splitmix64 finalizer).
inline std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (index + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

}  // namespace gcm
