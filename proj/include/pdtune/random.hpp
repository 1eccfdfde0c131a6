#pragma once

#include <cstdint>
#include <random>

namespace pdtune {

/// SplitMix64 finalizer; used only for seed derivation.
inline std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ull;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
    return x ^ (x >> 31);
}

/// Derives an independent 64-bit seed from a master seed and a stream index.
/// The pair (master, stream) fully determines the derived value.
inline std::uint64_t derive_seed(std::uint64_t master, std::uint64_t stream) {
    std::uint64_t h = splitmix64(master);
    h ^= splitmix64(stream + 0x632BE59BD9B4E019ull);
    return splitmix64(h);
}

/// Deterministic random stream addressed by (master_seed, stream_id).
///
/// All uniform draws are generated from the raw 64-bit engine output so the
/// sequence is identical on every platform, independent of the standard
/// library's distribution implementations.
class RngStream {
public:
    RngStream(std::uint64_t master_seed, std::uint64_t stream_id)
        : engine_(derive_seed(master_seed, stream_id)) {}

    /// Uniform double in [0, 1).
    double uniform() {
        return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
    }

    /// Uniform double in [lo, hi). Degenerate intervals return lo.
    double uniform(double lo, double hi) {
        return lo + (hi - lo) * uniform();
    }

    /// Uniform index in [0, n). Requires n > 0.
    std::size_t uniform_index(std::size_t n) {
        return static_cast<std::size_t>(engine_() % static_cast<std::uint64_t>(n));
    }

private:
    std::mt19937_64 engine_;
};

} // namespace pdtune
