#pragma once

#include <cstdint>
#include <random>

namespace smm {

/// Seedable, splittable random stream.
///
/// Algorithm (frozen; golden tests depend on it):
///   * engine: std::mt19937_64, seeded through std::seed_seq with the four
///     32-bit words {seed_lo, seed_hi, stream_lo, stream_hi}. Both the engine
///     and seed_seq are fully specified by the C++ standard, so sequences are
///     identical across platforms and standard libraries.
///   * uniform(): top 53 bits of one engine draw, scaled by 2^-53, in [0, 1).
///   * normal(): Marsaglia polar method on uniform() pairs; the spare variate
///     is cached, so draw order is part of the contract.
///
/// Copying an RngStream forks it: the copy continues the same sequence
/// independently of the original.
class RngStream {
public:
    RngStream(std::uint64_t seed, std::uint64_t stream_id);

    std::uint64_t seed() const noexcept { return seed_; }
    std::uint64_t stream_id() const noexcept { return stream_id_; }

    /// Derives an independent child stream keyed by `label`. Depends only on
    /// (seed, stream_id, label), never on how many draws were made.
    RngStream split(std::uint64_t label) const;

    std::uint64_t next_u64() { return engine_(); }
    double uniform();
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
    double normal();
    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n);

private:
    std::uint64_t seed_;
    std::uint64_t stream_id_;
    std::mt19937_64 engine_;
    double spare_normal_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer, used for deriving seeds.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace smm
