#pragma once

#include <cstdint>
#include <random>

namespace bannerscope {

/// Seeded generator with platform-independent derived draws. The standard
/// distributions are implementation-defined, so uniform and bounded values
/// are computed from the raw 64-bit engine output instead.
class SeededRng {
public:
    explicit SeededRng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform in [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }
    /// Uniform in [0, n); n > 0.
    std::size_t below(std::size_t n) { return static_cast<std::size_t>(engine_() % n); }

    template <typename Container>
    void shuffle(Container& c) {
        for (std::size_t i = c.size(); i > 1; --i) {
            using std::swap;
            swap(c[i - 1], c[below(i)]);
        }
    }

private:
    std::mt19937_64 engine_;
};

} // namespace bannerscope
