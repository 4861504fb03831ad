#pragma once

#include <cstdint>
#include <random>

namespace pfr {

/// Deterministic random source for sampling experiments.
///
/// The integer stream is the standard-mandated mt19937_64 sequence, and all
/// floating-point draws are derived from it by fixed arithmetic (no
/// distribution objects), so runs are reproducible across platforms.
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform draw in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    std::uint64_t integer(std::uint64_t n) { return engine_() % n; }

  private:
    std::mt19937_64 engine_;
};

}  // namespace pfr
