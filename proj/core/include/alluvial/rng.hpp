#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

namespace alluvial {

/// splitmix64 (Steele, Lea & Flood 2014). Chosen because the step function is
/// fully specified arithmetic on uint64, so the same seed yields the same
/// stream on every platform and in any language that reimplements it.
///
/// Substream rule: `stream(seed, phase, index)` seeds a fresh generator with
/// `mix(seed + GOLDEN * (phase + 1)) ^ mix(index + 1)` where `mix` is the
/// splitmix64 finalizer and GOLDEN = 0x9e3779b97f4a7c15. Each pipeline phase
/// (and each column / wiring gap inside the generator) draws from its own
/// substream, so stages can be reordered or parallelized without changing
/// results.
class SplitMix64 {
public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    static constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;

    static std::uint64_t mix(std::uint64_t z) {
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    static SplitMix64 stream(std::uint64_t seed, std::uint64_t phase, std::uint64_t index = 0) {
        return SplitMix64(mix(seed + kGolden * (phase + 1)) ^ mix(index + 1));
    }

    std::uint64_t next() {
        std::uint64_t z = (state_ += kGolden);
        return mix(z);
    }

    /// Unbiased draw in [0, bound); bound must be nonzero.
    std::uint64_t next_below(std::uint64_t bound) {
        const std::uint64_t threshold = (0 - bound) % bound;
        for (;;) {
            const std::uint64_t v = next();
            if (v >= threshold) return v % bound;
        }
    }

    /// Uniform integer in [lo, hi], inclusive on both ends.
    int next_int(int lo, int hi) {
        return lo + static_cast<int>(next_below(static_cast<std::uint64_t>(hi - lo) + 1));
    }

    /// Uniform double in [0, 1) with 53 bits of precision.
    double next_unit() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Exp(1) draw, used for Dirichlet-style stick breaking.
    double next_exp() {
        return -std::log(1.0 - next_unit());
    }

    template <class T>
    void shuffle(std::vector<T>& items) {
        for (std::size_t i = items.size(); i > 1; --i) {
            const std::size_t j = static_cast<std::size_t>(next_below(i));
            std::swap(items[i - 1], items[j]);
        }
    }

private:
    std::uint64_t state_;
};

} // namespace alluvial
