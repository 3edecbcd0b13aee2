#pragma once

// Counter-based Philox4x32-10 with independent substreams, and Gaussian draws
// by inverse CDF so paths are reproducible across platforms and thread counts.

#include <array>
#include <cstdint>

namespace ebl {

using PhiloxCounter = std::array<std::uint32_t, 4>;
using PhiloxKey = std::array<std::uint32_t, 2>;

PhiloxCounter philox4x32_10(PhiloxCounter ctr, PhiloxKey key);

// Standard normal quantile (Wichura's AS241, about 1e-16 relative accuracy).
// Returns -inf/+inf at 0/1 and NaN outside [0, 1].
double normal_quantile(double u);

// Stream `index` of generator `seed`: the key holds the seed and the counter
// holds (block, index), so streams never overlap.
class PhiloxStream {
public:
    PhiloxStream(std::uint64_t seed, std::uint64_t index);

    std::uint64_t next_u64();
    // In (0, 1): ((bits >> 11) + 0.5) * 2^-53.
    double uniform();
    double normal() { return normal_quantile(uniform()); }

private:
    PhiloxKey key_;
    std::uint64_t index_;
    std::uint64_t block_ = 0;
    PhiloxCounter buf_{};
    int used_ = 4;
};

} // namespace ebl
