// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <string>
#include <vector>

#include "mfpma/exact.hpp"
#include "mfpma/learn.hpp"
#include "mfpma_tools/config.hpp"

namespace mfpma::tools {

// Writes to `path.tmp` and renames over `path`.
void atomic_write(const std::string& path, const std::string& content);

struct CsvTable {
  std::vector<std::string> header;
  std::vector<std::vector<double>> rows;  // empty fields read as NaN

  int column(const std::string& name) const;  // -1 when absent
};

CsvTable read_csv(const std::string& path);

Json ledger_to_json(const ConstantsLedger& c);
Json schedule_to_json(const TheoreticalSchedule& s);

}  // namespace mfpma::tools
