#pragma once

#include <cstdint>
#include <limits>
#include <random>
#include <utility>

namespace blicket {

// Seeded generator used everywhere randomness is needed. Draws are
// reproducible across runs and platforms: only the raw 64-bit engine output
// is consumed, never a library distribution.
class Rng {
   public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }

    // Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    // Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        const std::uint64_t limit = std::numeric_limits<std::uint64_t>::max() -
                                    std::numeric_limits<std::uint64_t>::max() % n;
        std::uint64_t x = engine_();
        while (x >= limit) {
            x = engine_();
        }
        return x % n;
    }

    // Child generator for an independent stream keyed by `stream`.
    Rng fork(std::uint64_t stream) const {
        std::seed_seq seq{static_cast<std::uint32_t>(seed_material_ >> 32),
                          static_cast<std::uint32_t>(seed_material_),
                          static_cast<std::uint32_t>(stream >> 32),
                          static_cast<std::uint32_t>(stream)};
        return Rng(seq);
    }

    template <typename Container>
    void shuffle(Container &c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            std::swap(c[i - 1], c[below(i)]);
        }
    }

   private:
    explicit Rng(std::seed_seq &seq) : engine_(seq) {}

    std::mt19937_64 engine_;
    std::uint64_t seed_material_ = engine_();
};

}  // namespace blicket
