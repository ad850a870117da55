#pragma once

#include <cstdint>
#include <random>

namespace hydrostate {

/// Deterministic per-task random stream derived from (seed, index). Uniform
/// draws are computed from raw engine bits so results do not depend on the
/// standard library's distribution implementations.
class StreamRng {
public:
    StreamRng(std::uint64_t seed, std::uint64_t index) {
        std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                          static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
        engine_.seed(seq);
    }

    /// Uniform in [0, 1).
    double uniform01() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    std::uint64_t next() { return engine_(); }

private:
    std::mt19937_64 engine_;
};

}  // namespace hydrostate
