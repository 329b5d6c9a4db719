// Copyright 2026 The mfpma Authors.
// SPDX-License-Identifier: Apache-2.0

#include "mfpma_tools/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "mfpma/errors.hpp"

namespace mfpma::tools {
namespace {

struct Modes {
  Mode mode;
  const char* name;
};

constexpr Modes kModes[] = {
    {Mode::kConstants, "constants"},
    {Mode::kSolveExact, "solve_exact"},
    {Mode::kTrainCentralized, "train_centralized"},
    {Mode::kTrainIndependent, "train_independent"},
    {Mode::kCtdOnly, "ctd_only"},
    {Mode::kBiasScaling, "bias_scaling"},
};

[[noreturn]] void fail(const std::string& field, const std::string& what) {
  throw ValidationError("config." + field + ": " + what);
}

void only_keys(const Json& obj, const std::string& where,
               std::initializer_list<const char*> keys) {
  if (!obj.is_object()) fail(where, "must be an object");
  std::set<std::string> allowed(keys.begin(), keys.end());
  for (auto it = obj.begin(); it != obj.end(); ++it) {
    if (!allowed.count(it.key())) {
      fail(where.empty() ? it.key() : where + "." + it.key(),
           "unknown field");
    }
  }
}

std::string join(const std::string& where, const char* key) {
  return where.empty() ? key : where + "." + key;
}

template <typename T>
void read(const Json& obj, const std::string& where, const char* key, T& out) {
  if (!obj.contains(key)) return;
  const Json& v = obj.at(key);
  if constexpr (std::is_same_v<T, bool>) {
    if (!v.is_boolean()) fail(join(where, key), "must be a boolean");
    out = v.get<bool>();
  } else if constexpr (std::is_same_v<T, std::string>) {
    if (!v.is_string()) fail(join(where, key), "must be a string");
    out = v.get<std::string>();
  } else if constexpr (std::is_integral_v<T>) {
    if (!v.is_number_integer()) fail(join(where, key), "must be an integer");
    out = v.get<T>();
  } else {
    if (!v.is_number()) fail(join(where, key), "must be a number");
    out = v.get<T>();
  }
}

void positive(const std::string& field, double v) {
  if (!(v > 0.0)) fail(field, "must be positive");
}

}  // namespace

const char* mode_name(Mode m) {
  for (const auto& e : kModes) {
    if (e.mode == m) return e.name;
  }
  return "?";
}

ExperimentConfig parse_config(const Json& input) {
  const Json& doc =
      input.is_object() && input.contains("manifest_version") ? input.at("config")
                                                              : input;
  only_keys(doc, "",
            {"mode", "game", "h", "eta", "N", "seeds", "strict", "schedule",
             "tolerances", "policy", "Ns", "T", "mixing_target",
             "diagnostics", "out"});
  ExperimentConfig c;

  if (!doc.contains("mode")) fail("mode", "required");
  std::string mode;
  read(doc, "", "mode", mode);
  bool found = false;
  for (const auto& e : kModes) {
    if (mode == e.name) {
      c.mode = e.mode;
      found = true;
    }
  }
  if (!found) fail("mode", "unknown mode '" + mode + "'");

  if (doc.contains("game")) {
    const Json& g = doc.at("game");
    only_keys(g, "game", {"kind", "size", "params", "gamma"});
    read(g, "game", "kind", c.game.kind);
    read(g, "game", "size", c.game.size);
    read(g, "game", "gamma", c.game.gamma);
    if (g.contains("params")) {
      const Json& p = g.at("params");
      only_keys(p, "game.params", {"eps", "c", "kappa"});
      read(p, "game.params", "eps", c.game.eps);
      read(p, "game.params", "c", c.game.c);
      read(p, "game.params", "kappa", c.game.kappa);
    }
  }
  if (c.game.kind != "crowd_averse_torus" &&
      c.game.kind != "congestion_slowdown") {
    fail("game.kind", "unknown game '" + c.game.kind + "'");
  }
  if (c.game.size < 2) fail("game.size", "must be >= 2");
  if (!(c.game.gamma > 0.0 && c.game.gamma < 1.0)) {
    fail("game.gamma", "must lie in (0, 1)");
  }

  if (doc.contains("h")) {
    const Json& h = doc.at("h");
    only_keys(h, "h", {"kind", "tau"});
    read(h, "h", "kind", c.h_kind);
    read(h, "h", "tau", c.tau);
  }
  if (c.h_kind != "entropy" && c.h_kind != "quadratic") {
    fail("h.kind", "must be 'entropy' or 'quadratic'");
  }
  positive("h.tau", c.tau);

  read(doc, "", "eta", c.eta);
  positive("eta", c.eta);
  read(doc, "", "N", c.N);
  if (c.N < 1) fail("N", "must be >= 1");
  if (doc.contains("seeds")) {
    const Json& s = doc.at("seeds");
    if (!s.is_array() || s.empty()) fail("seeds", "must be a nonempty array");
    c.seeds.clear();
    for (const Json& v : s) {
      if (!v.is_number_unsigned() && !(v.is_number_integer() && v >= 0)) {
        fail("seeds", "entries must be nonnegative integers");
      }
      c.seeds.push_back(v.get<std::uint64_t>());
    }
  }
  read(doc, "", "strict", c.strict);

  if (doc.contains("schedule")) {
    const Json& s = doc.at("schedule");
    only_keys(s, "schedule",
              {"type", "K", "M_pg", "M_td", "M", "epsilon", "beta", "t0",
               "mtd_target"});
    ScheduleConfig& k = c.schedule;
    read(s, "schedule", "type", k.type);
    read(s, "schedule", "K", k.K);
    read(s, "schedule", "M_pg", k.M_pg);
    read(s, "schedule", "M_td", k.M_td);
    read(s, "schedule", "M", k.M);
    read(s, "schedule", "epsilon", k.epsilon);
    read(s, "schedule", "beta", k.beta);
    read(s, "schedule", "mtd_target", k.mtd_target);
    if (s.contains("t0") && !s.at("t0").is_null()) {
      double t0 = 0;
      read(s, "schedule", "t0", t0);
      positive("schedule.t0", t0);
      k.t0 = t0;
    }
  }
  const ScheduleConfig& k = c.schedule;
  if (k.type != "practical" && k.type != "theoretical") {
    fail("schedule.type", "must be 'practical' or 'theoretical'");
  }
  if (k.K < 0) fail("schedule.K", "must be >= 0");
  if (k.M_pg < 1) fail("schedule.M_pg", "must be >= 1");
  if (k.M_td != 0 && k.M_td < 2) fail("schedule.M_td", "must be 0 or >= 2");
  if (k.M < 1) fail("schedule.M", "must be >= 1");
  positive("schedule.epsilon", k.epsilon);
  if (k.beta != "mu_F" && k.beta != "1-gamma") {
    fail("schedule.beta", "must be 'mu_F' or '1-gamma'");
  }
  if (!(k.mtd_target > 0.0 && k.mtd_target < 1.0)) {
    fail("schedule.mtd_target", "must lie in (0, 1)");
  }

  if (doc.contains("tolerances")) {
    const Json& t = doc.at("tolerances");
    only_keys(t, "tolerances", {"mirror", "population", "value"});
    read(t, "tolerances", "mirror", c.tol.mirror);
    read(t, "tolerances", "population", c.tol.population);
    read(t, "tolerances", "value", c.tol.value);
  }
  positive("tolerances.mirror", c.tol.mirror);
  positive("tolerances.population", c.tol.population);
  positive("tolerances.value", c.tol.value);

  read(doc, "", "policy", c.policy);
  if (c.policy != "exact" && c.policy != "max" && c.policy != "uniform") {
    fail("policy", "must be 'exact', 'max' or 'uniform'");
  }
  if (doc.contains("Ns")) {
    const Json& n = doc.at("Ns");
    if (!n.is_array() || n.empty()) fail("Ns", "must be a nonempty array");
    c.Ns.clear();
    for (const Json& v : n) {
      if (!v.is_number_integer() || v.get<int>() < 1) {
        fail("Ns", "entries must be positive integers");
      }
      c.Ns.push_back(v.get<int>());
    }
  }
  read(doc, "", "T", c.T);
  if (c.T < 0) fail("T", "must be >= 0");
  read(doc, "", "mixing_target", c.mixing_target);
  if (c.mixing_target < 0.0 || c.mixing_target > 1.0) {
    fail("mixing_target", "must lie in [0, 1] (0 selects 0.5/|S|)");
  }
  if (doc.contains("diagnostics")) {
    const Json& d = doc.at("diagnostics");
    only_keys(d, "diagnostics", {"exploitability", "q_error"});
    read(d, "diagnostics", "exploitability", c.exploitability);
    read(d, "diagnostics", "q_error", c.q_error);
  }
  read(doc, "", "out", c.out);
  if (c.out.empty()) fail("out", "must be nonempty");
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file '" + path + "'");
  Json doc;
  try {
    doc = Json::parse(in);
  } catch (const Json::parse_error& e) {
    std::ostringstream os;
    os << path << ": " << e.what();
    throw ValidationError(os.str());
  }
  return parse_config(doc);
}

Json to_json(const ExperimentConfig& c) {
  Json j;
  j["mode"] = mode_name(c.mode);
  j["game"] = {{"kind", c.game.kind},
               {"size", c.game.size},
               {"gamma", c.game.gamma},
               {"params",
                {{"eps", c.game.eps}, {"c", c.game.c}, {"kappa", c.game.kappa}}}};
  j["h"] = {{"kind", c.h_kind}, {"tau", c.tau}};
  j["eta"] = c.eta;
  j["N"] = c.N;
  j["seeds"] = c.seeds;
  j["strict"] = c.strict;
  const ScheduleConfig& k = c.schedule;
  j["schedule"] = {{"type", k.type},       {"K", k.K},
                   {"M_pg", k.M_pg},       {"M_td", k.M_td},
                   {"M", k.M},             {"epsilon", k.epsilon},
                   {"beta", k.beta},       {"mtd_target", k.mtd_target},
                   {"t0", k.t0 ? Json(*k.t0) : Json(nullptr)}};
  j["tolerances"] = {{"mirror", c.tol.mirror},
                     {"population", c.tol.population},
                     {"value", c.tol.value}};
  j["policy"] = c.policy;
  j["Ns"] = c.Ns;
  j["T"] = c.T;
  j["mixing_target"] = c.mixing_target;
  j["diagnostics"] = {{"exploitability", c.exploitability},
                      {"q_error", c.q_error}};
  j["out"] = c.out;
  return j;
}

GameSpec build_game(const ExperimentConfig& c) {
  return make_example_game(c.game);
}

Regularizer build_regularizer(const ExperimentConfig& c) {
  return c.h_kind == "entropy" ? Regularizer::entropy(c.tau)
                               : Regularizer::quadratic(c.tau);
}

}  // namespace mfpma::tools
