#include "waasim/rng.hpp"

#include <cmath>
#include <numbers>

namespace waasim {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

RngStreams::RngStreams(std::uint64_t master_seed) : master_seed_(master_seed) {
    for (std::size_t i = 0; i < kStreamCount; ++i) {
        engines_[i].seed(splitmix64(master_seed + 0x100 * (i + 1)));
    }
}

std::uint64_t RngStreams::bits(Stream s) { return engines_[static_cast<std::size_t>(s)](); }

double RngStreams::uniform01(Stream s) {
    return static_cast<double>(bits(s) >> 11) * 0x1.0p-53;
}

std::int64_t RngStreams::uniform_int(Stream s, std::int64_t lo, std::int64_t hi) {
    if (lo >= hi) return lo;
    std::uint64_t range = static_cast<std::uint64_t>(hi - lo) + 1;
    // Rejection sampling keeps the draw unbiased.
    std::uint64_t limit = UINT64_MAX - UINT64_MAX % range;
    std::uint64_t r;
    do {
        r = bits(s);
    } while (r >= limit);
    return lo + static_cast<std::int64_t>(r % range);
}

double RngStreams::exponential(Stream s, double mean) {
    double u = uniform01(s);
    return -mean * std::log1p(-u);
}

double RngStreams::normal(Stream s, double mean, double stddev) {
    double u1 = uniform01(s);
    double u2 = uniform01(s);
    // Guard the log against u1 == 0.
    double r = std::sqrt(-2.0 * std::log1p(-u1));
    double z = r * std::cos(2.0 * std::numbers::pi * u2);
    return mean + stddev * z;
}

std::uint64_t RngStreams::derive_seed(std::uint64_t master, std::uint64_t index) {
    return splitmix64(master ^ splitmix64(index + 0x51ed2701));
}

}  // namespace waasim
