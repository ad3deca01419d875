#pragma once

#include <array>
#include <cstdint>

namespace mvnt {

/// Counter-based random stream (Philox4x32-10).
///
/// A stream is identified by (master_seed, stream_id). Distinct stream ids
/// under the same seed are statistically independent, and a stream's output
/// depends only on its identity, never on allocation or scheduling order, so
/// Monte Carlo runs are bit-identical across thread counts.
class RngStream {
  public:
    explicit RngStream(std::uint64_t master_seed, std::uint64_t stream_id = 0);

    std::uint64_t master_seed() const { return seed_; }
    std::uint64_t stream_id() const { return id_; }

    /// Derived independent substream; deterministic in (stream_id, k).
    RngStream child(std::uint64_t k) const;

    std::uint64_t next_u64();

    /// Uniform on the open interval (0, 1); safe to pass to log().
    double uniform01();

    /// Standard normal (Box-Muller, second value cached).
    double normal();

    /// Exp(1).
    double exponential();

    /// Gamma(shape, 1) via Marsaglia-Tsang, any shape > 0.
    double gamma(double shape);

    double chi_squared(double nu) { return 2.0 * gamma(0.5 * nu); }

    double beta(double a, double b);

  private:
    void refill();

    std::uint64_t seed_;
    std::uint64_t id_;
    std::uint64_t block_ = 0;
    std::array<std::uint32_t, 4> buf_{};
    int buf_pos_ = 4;  // empty
    double spare_normal_ = 0.0;
    bool have_spare_normal_ = false;
};

/// SplitMix64 finalizer; used for substream id derivation.
std::uint64_t mix64(std::uint64_t z);

}  // namespace mvnt
