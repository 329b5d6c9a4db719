// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma/rng.hpp"

namespace mfpma {
namespace {

constexpr std::uint32_t kM0 = 0xD2511F53u;
constexpr std::uint32_t kM1 = 0xCD9E8D57u;
constexpr std::uint32_t kW0 = 0x9E3779B9u;
constexpr std::uint32_t kW1 = 0xBB67AE85u;

inline void mulhilo(std::uint32_t a, std::uint32_t b, std::uint32_t* hi,
                    std::uint32_t* lo) {
  const std::uint64_t p = static_cast<std::uint64_t>(a) * b;
  *hi = static_cast<std::uint32_t>(p >> 32);
  *lo = static_cast<std::uint32_t>(p);
}

inline double to_unit(std::uint32_t hi, std::uint32_t lo) {
  const std::uint64_t bits =
      ((static_cast<std::uint64_t>(hi) << 32) | lo) >> 11;
  return static_cast<double>(bits) * 0x1.0p-53;
}

}  // namespace

std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr,
                                        std::array<std::uint32_t, 2> key) {
  for (int round = 0; round < 10; ++round) {
    if (round > 0) {
      key[0] += kW0;
      key[1] += kW1;
    }
    std::uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kM0, ctr[0], &hi0, &lo0);
    mulhilo(kM1, ctr[2], &hi1, &lo1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
  }
  return ctr;
}

UniformPair CounterRng::draw(std::uint32_t agent, std::uint64_t t,
                             std::uint32_t stream) const {
  const auto out = philox4x32({static_cast<std::uint32_t>(t),
                               static_cast<std::uint32_t>(t >> 32), agent,
                               stream},
                              key_);
  return {to_unit(out[0], out[1]), to_unit(out[2], out[3])};
}

int sample_index(const double* probs, int n, double u,
                 std::ptrdiff_t stride) {
  double cum = 0.0;
  int last_positive = 0;
  for (int i = 0; i < n; ++i) {
    const double p = probs[i * stride];
    if (p > 0.0) {
      cum += p;
      last_positive = i;
      if (u < cum) return i;
    }
  }
  return last_positive;
}

}  // namespace mfpma
