// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <array>
#include <cstddef>
#include <cstdint>

#include <Eigen/Dense>

namespace mfpma {

// Philox4x32-10 counter-based generator (Salmon et al., SC'11). Output is a
// pure function of (counter, key), which makes draws independent of the
// order in which agents are processed.
std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key);

// Two uniforms in [0,1) keyed by (seed, agent, t, stream).
struct UniformPair {
  double first;
  double second;
};

class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed)
      : key_{static_cast<std::uint32_t>(seed),
             static_cast<std::uint32_t>(seed >> 32)} {}

  UniformPair draw(std::uint32_t agent, std::uint64_t t,
                   std::uint32_t stream = 0) const;

 private:
  std::array<std::uint32_t, 2> key_;
};

// Inverse-CDF sampling with a single uniform. Falls back to the last index
// with positive mass when rounding leaves u above the cumulative total.
// Inverse-CDF draw; entries are read at probs[i * stride].
int sample_index(const double* probs, int n, double u,
                 std::ptrdiff_t stride = 1);

inline int sample_index(const Eigen::VectorXd& probs, double u) {
  return sample_index(probs.data(), static_cast<int>(probs.size()), u);
}

}  // namespace mfpma
