#pragma once

// Counter-based random streams.
//
// Algorithm: Philox4x32-10 (Salmon et al., "Parallel random numbers: as easy
// as 1, 2, 3", SC'11). A stream is identified by a 64-bit key derived from
// (master seed, replica, role) with SplitMix64 finalizers; the i-th 64-bit
// word of a stream is words (2*(i%2), 2*(i%2)+1) of the Philox block with
// counter (i/2) in the low two lanes. Doubles take the top 52 bits and are
// centred in their bin, so they lie strictly inside (0,1).

#include <array>
#include <complex>
#include <cstdint>

namespace circlegas {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

std::uint64_t splitmix64(std::uint64_t x);

/// Roles separate independent uses of the same (seed, replica) pair.
enum class StreamRole : std::uint64_t {
    moduli = 1,
    kac_coefficients = 2,
    synthetic = 3,
    test = 4,
};

class Stream {
public:
    Stream(std::uint64_t seed, std::uint64_t replica, StreamRole role);
    explicit Stream(PhiloxKey key) : key_(key) {}

    /// Random access: the i-th 64-bit word of the stream.
    [[nodiscard]] std::uint64_t word_at(std::uint64_t index) const;
    /// Random access uniform in the open interval (0,1).
    [[nodiscard]] double uniform_at(std::uint64_t index) const;

    /// Sequential interface; position advances by one word per call.
    std::uint64_t next_word() { return word_at(position_++); }
    double uniform() { return uniform_at(position_++); }
    /// Standard real normal via Box-Muller (consumes two words).
    double normal();
    /// Complex normal with E|z|^2 = 1 and E z^2 = 0.
    std::complex<double> complex_normal();

    [[nodiscard]] std::uint64_t position() const { return position_; }
    [[nodiscard]] PhiloxKey key() const { return key_; }

private:
    PhiloxKey key_{};
    std::uint64_t position_ = 0;
};

double to_open_unit(std::uint64_t word);

}  // namespace circlegas
