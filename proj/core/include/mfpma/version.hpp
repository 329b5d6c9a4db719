// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

namespace mfpma {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace mfpma
