#pragma once

// Counter-based random numbers (Philox4x32-10). A draw is a pure function of
// (seed, stream, index), so any sample can be regenerated on its own and
// worker threads never share generator state.

#include <array>
#include <cstdint>

namespace kronchaos {

class CounterRng {
public:
    CounterRng(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    [[nodiscard]] std::array<std::uint32_t, 4> block(std::uint64_t index) const;
    /// Uniform on the open interval (0, 1), 53-bit resolution.
    [[nodiscard]] double uniform(std::uint64_t index) const;
    /// Standard normal (Box-Muller on the two halves of one block).
    [[nodiscard]] double normal(std::uint64_t index) const;

    [[nodiscard]] std::uint64_t seed() const { return seed_; }
    [[nodiscard]] std::uint64_t stream() const { return stream_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
};

/// Mixes a tag into a seed (splitmix64 finalizer); used to derive
/// independent seeds for restarts, bootstrap resampling and replicates.
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t tag);

}  // namespace kronchaos
