#pragma once

#include <array>
#include <cstdint>
#include <random>

namespace waasim {

/// Named independent RNG substreams. Each substream is a separately seeded
/// mt19937_64, so the draw sequence of one stream is unaffected by how often
/// the others are consumed. Distribution transforms are hand-rolled (inverse
/// CDF / Box-Muller) so a given seed yields the same sequence on every
/// standard library.
class RngStreams {
public:
    enum class Stream : std::size_t {
        Arrivals = 0,
        WorkloadShape,
        Budgets,
        CpuDegradation,
        BandwidthDegradation,
    };
    static constexpr std::size_t kStreamCount = 5;

    explicit RngStreams(std::uint64_t master_seed);

    std::uint64_t master_seed() const { return master_seed_; }

    std::uint64_t bits(Stream s);

    /// Uniform in [0, 1) with 53 bits of resolution.
    double uniform01(Stream s);

    /// Uniform integer in [lo, hi], both bounds inclusive.
    std::int64_t uniform_int(Stream s, std::int64_t lo, std::int64_t hi);

    /// Exponential with the given mean, via inverse CDF.
    double exponential(Stream s, double mean);

    /// Normal via Box-Muller (no spare caching; two uniforms per draw).
    double normal(Stream s, double mean, double stddev);

    /// Derives a child seed, e.g. one per replication.
    static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index);

private:
    std::uint64_t master_seed_;
    std::array<std::mt19937_64, kStreamCount> engines_;
};

}  // namespace waasim
