// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <cstddef>
#include <functional>

namespace mfpma {

// Worker count: MFPMA_THREADS if set and positive, else the hardware count.
int thread_count();

// Runs fn(i) for i in [0, n) on up to `threads` workers using contiguous
// static chunks. Callers must make fn(i) depend only on i so that results do
// not depend on the thread count. The first exception thrown is rethrown.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn,
                  int threads = 0);

}  // namespace mfpma
