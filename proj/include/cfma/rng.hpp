#pragma once

#include <array>
#include <cstdint>

namespace cfma {

// Philox4x64-10 counter-based generator. A stream is addressed by
// (seed, stream): key = {seed, 0}, counter = {block, stream, 0, 0}.
// Uniform doubles take the top 53 bits of each 64-bit output.
inline constexpr const char* rng_identifier = "philox4x64-10;key=(seed,0);counter=(block,stream,0,0);u53";

std::array<std::uint64_t, 4> philox4x64(std::array<std::uint64_t, 4> counter, std::array<std::uint64_t, 2> key);

class CounterStream {
public:
    CounterStream(std::uint64_t seed, std::uint64_t stream) : seed_(seed), stream_(stream) {}

    std::uint64_t next();
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

private:
    std::uint64_t seed_;
    std::uint64_t stream_;
    std::uint64_t block_ = 0;
    std::array<std::uint64_t, 4> buffer_{};
    int used_ = 4;
};

} // namespace cfma
