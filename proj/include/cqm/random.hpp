#pragma once

#include <cstdint>

namespace cqm {

/// Counter-based uniform stream: the value for (seed, index, lane) depends on
/// nothing else, so samples can be generated in any order or in parallel and
/// still reproduce the serial output bit for bit.
class CounterStream {
public:
    explicit CounterStream(std::uint64_t seed) : seed_(seed) {}

    std::uint64_t seed() const noexcept { return seed_; }

    /// Uniform on the open interval (0, 1).
    double uniform(std::uint64_t index, std::uint64_t lane = 0) const noexcept {
        std::uint64_t z = mix(seed_ ^ mix(index * 4 + lane + 0x632be59bd9b4e019ULL));
        return (static_cast<double>(z >> 11) + 0.5) * 0x1.0p-53;
    }

private:
    // splitmix64 finalizer
    static std::uint64_t mix(std::uint64_t z) noexcept {
        z += 0x9e3779b97f4a7c15ULL;
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    std::uint64_t seed_;
};

}  // namespace cqm
