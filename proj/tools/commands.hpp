#pragma once

#include <cstdint>
#include <string>

#include "json.hpp"
#include "manifest.hpp"
#include "rcm/lattice.hpp"

namespace rcm::cli {

/// Bad input detected after parsing (exit code 1).
class UsageError : public Error {
 public:
  using Error::Error;
};

struct Options {
  double q = 2.0;
  std::string p = "sd";
  int n = 1;
  int m = 2;
  std::string bc;
  std::string domain;
  std::uint64_t seed = 1;
  long long budget = 100000;
  int jobs = 1;
  std::string out = "rcm-out";

  std::string sizes;           // comma list
  std::string p_grid;          // comma list; empty = around the self-dual point
  double p_halfwidth = 0.04;
  int p_points = 9;
  double tol = 0;              // pc-scan: allowed distance from the self-dual point
  std::string admissibility = "strict";
  std::string side = "both";
  bool exact = false;
  double aspect = 1.0;
  int m_trunc = 0;
  int k = 0;                   // cover-decay: 0 = select_k(q)
  int radius = 2;
  std::string dynamics = "auto";
  bool stream = false;
  int max_connected = 8;
  int random_sets = 2000;
  std::string suite = "core";
};

nlohmann::json to_json(const std::string& command, const Options& o);

/// Resolves `--p`: a real in (0,1) or "sd".
double resolve_p(const std::string& p, double q);
Domain parse_domain(const Options& o, bool want_dobrushin);

/// Runs one subcommand, writing its outputs through `man`. Returns 0 when
/// every asserted invariant held, 2 otherwise.
int run_command(const std::string& command, const Options& o, RunManifest& man, nlohmann::json& summary);

int verify_core(const Options& o, RunManifest& man, nlohmann::json& summary);

}  // namespace rcm::cli
