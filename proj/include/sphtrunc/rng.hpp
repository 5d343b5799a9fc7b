#pragma once

#include <cstdint>
#include <random>

namespace sphtrunc {

/// Reproducible random substream.
///
/// Engine: std::mt19937_64 seeded through std::seed_seq with the four 32-bit halves of
/// (seed, stream_index). Both algorithms are fixed by the C++ standard, and the
/// normal/gamma transforms come from Boost.Random, so a given (seed, stream_index)
/// yields the same draws on every conforming platform.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_index);

    [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
    [[nodiscard]] std::uint64_t stream_index() const noexcept { return stream_index_; }

    double normal();
    double chi_square(double dof);
    /// Uniform on [0, 1).
    double uniform();

    std::mt19937_64& engine() noexcept { return engine_; }

private:
    std::uint64_t seed_;
    std::uint64_t stream_index_;
    std::mt19937_64 engine_;
};

}  // namespace sphtrunc
