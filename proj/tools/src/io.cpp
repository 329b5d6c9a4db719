// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma_tools/io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>

#include "mfpma/errors.hpp"

namespace mfpma::tools {

void atomic_write(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp.string() + "'");
    out << content;
    out.flush();
    if (!out) throw Error("write failed for '" + tmp.string() + "'");
  }
  fs::rename(tmp, target);
}

int CsvTable::column(const std::string& name) const {
  for (std::size_t i = 0; i < header.size(); ++i) {
    if (header[i] == name) return static_cast<int>(i);
  }
  return -1;
}

namespace {

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream ls(line);
  while (std::getline(ls, cell, ',')) out.push_back(cell);
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

}  // namespace

CsvTable read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open CSV '" + path + "'");
  CsvTable t;
  std::string line;
  if (!std::getline(in, line)) throw ValidationError(path + ": missing header");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  t.header = split(line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto cells = split(line);
    if (cells.size() != t.header.size()) {
      throw ValidationError(path + ":" + std::to_string(lineno) +
                            ": wrong number of fields");
    }
    std::vector<double> row;
    for (const std::string& c : cells) {
      if (c.empty()) {
        row.push_back(std::numeric_limits<double>::quiet_NaN());
        continue;
      }
      std::size_t used = 0;
      double v = 0;
      try {
        v = std::stod(c, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used != c.size()) {
        throw ValidationError(path + ":" + std::to_string(lineno) +
                              ": not a number '" + c + "'");
      }
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

Json ledger_to_json(const ConstantsLedger& c) {
  Json j = {
      {"delta_h", c.delta_h},     {"L_pop_mu", c.L_pop_mu},
      {"L_pop_inf", c.L_pop_inf}, {"L_h", c.L_h},
      {"L_Vs", c.L_Vs},           {"L_Vpi", c.L_Vpi},
      {"L_Vmu", c.L_Vmu},         {"L_qpi", c.L_qpi},
      {"L_qmu", c.L_qmu},         {"L_md_q", c.L_md_q},
      {"L_md_pi", c.L_md_pi},     {"L_Gamma_q", c.L_Gamma_q},
      {"L_Gamma_eta", c.L_Gamma_eta},
      {"rho", c.rho},             {"q_max", c.q_max},
      {"h_max", c.h_max},         {"eta", c.eta},
      {"gamma", c.gamma},         {"num_states", c.num_states},
      {"num_actions", c.num_actions},
      {"contraction_ok", c.contraction_ok},
  };
  if (c.has_mixing) {
    j["mixing"] = {{"T_mix", c.mixing.T_mix},
                   {"delta_mix", c.mixing.delta_mix},
                   {"p_inf", c.mixing.p_inf}};
    j["c_eta"] = c.c_eta;
    j["mu_F"] = c.mu_F;
    j["rho_mix"] = c.rho_mix;
    j["C_mix"] = c.C_mix;
    j["t0"] = c.t0;
    j["M_td_min"] = c.M_td_min;
    j["ctd_constants"] = {{"C1", c.ctd.C1},       {"C2", c.ctd.C2},
                          {"Cpop1", c.ctd.Cpop1}, {"Cpop2", c.ctd.Cpop2},
                          {"Cpol1", c.ctd.Cpol1}, {"Cpol2", c.ctd.Cpol2},
                          {"C_h", c.ctd.C_h}};
  } else {
    j["mixing"] = nullptr;
  }
  return j;
}

Json schedule_to_json(const TheoreticalSchedule& s) {
  return {{"K", s.K}, {"M_pg", s.M_pg}, {"M_td", s.M_td}, {"branch", s.branch}};
}

}  // namespace mfpma::tools
