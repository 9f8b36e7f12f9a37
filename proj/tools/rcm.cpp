// rcm: command-line front end for the random-cluster laboratory.
//
// Every run writes <out>/manifest.json before starting and rewrites it with
// end time, status and SHA-256 digests of the outputs when it finishes.
// Exit codes: 0 success, 1 usage error, 2 an asserted invariant failed.

#include <iostream>

#include "CLI11.hpp"
#include "commands.hpp"

namespace {

constexpr const char* kSubcommands[][2] = {
    {"exact", "Exact log Z, edge marginals and connections to the origin (exact.csv)"},
    {"sample", "Heat-bath or Chayes-Machta edge marginals (sample.csv, optional stream.txt)"},
    {"observable", "Observable on every medial edge of a Dobrushin domain (observable.csv)"},
    {"contour", "Contour sums over all sets of admissible medial vertices (contour.json, contour.csv)"},
    {"phi-scan", "Minimum boundary-connection sum over sets containing the origin (phi_scan.csv)"},
    {"crossing", "Box crossing inside a truncated strip (crossing.csv)"},
    {"strip", "Primal and dual strip crossings and the bottom-left boundary sum (strip.csv)"},
    {"cover-decay", "Connection to the inner box on truncated universal covers (cover_decay.csv)"},
    {"pc-scan", "Crossing curves of (n+1) x n boxes and their intersections (pc_curves.csv, pc_intersections.csv)"},
    {"verify", "Exact invariant suites (verify.csv)"},
};

}  // namespace

int main(int argc, char** argv) {
  using rcm::cli::Options;
  Options o;
  CLI::App app{"Random-cluster model laboratory", "rcm"};
  app.set_version_flag("--version", std::string(RCM_VERSION));
  app.set_config("--config", "", "TOML file with option values; flags given on the command line win");
  app.require_subcommand(1);
  app.fallthrough();

  app.add_option("--q", o.q, "Cluster weight q >= 1")->capture_default_str();
  app.add_option("--p", o.p, "Edge parameter in (0,1), or 'sd' for the self-dual point")->capture_default_str();
  app.add_option("--n", o.n, "Box size or strip height")->capture_default_str();
  app.add_option("--m", o.m, "Strip half-width or crossing-box half-width")->capture_default_str();
  app.add_option("--bc", o.bc, "free, wired, dobrushin or dobrushin:x,y:x,y");
  app.add_option("--domain", o.domain, "box<n>, halfbox<n>, crossing<n>, rect:x0,x1,y0,y1, strip:n,m, cover:n,k, file:path");
  app.add_option("--seed", o.seed, "Master seed")->capture_default_str();
  app.add_option("--budget", o.budget, "Sweeps per chain")->capture_default_str();
  app.add_option("--jobs", o.jobs, "Worker threads; results do not depend on it")->capture_default_str();
  app.add_option("--out", o.out, "Output directory")->capture_default_str();
  app.add_option("--sizes", o.sizes, "Comma-separated sizes (pc-scan, cover-decay)");
  app.add_option("--p-grid", o.p_grid, "Comma-separated p values (pc-scan)");
  app.add_option("--p-halfwidth", o.p_halfwidth, "Half-width of the default grid around p_sd")->capture_default_str();
  app.add_option("--p-points", o.p_points, "Points in the default grid")->capture_default_str();
  app.add_option("--tol", o.tol, "pc-scan: fail when an intersection is farther than this from p_sd");
  app.add_option("--admissibility", o.admissibility, "strict or extended")->capture_default_str();
  app.add_option("--side", o.side, "wired, free or both")->capture_default_str();
  app.add_flag("--exact", o.exact, "Exact enumeration instead of sampling");
  app.add_option("--aspect", o.aspect, "Crossing box height over half-width")->capture_default_str();
  app.add_option("--m-trunc", o.m_trunc, "Strip truncation for crossing (default: --m)");
  app.add_option("--k", o.k, "Cover truncation (default: select_k(q))");
  app.add_option("--R", o.radius, "Inner box radius for cover-decay")->capture_default_str();
  app.add_option("--dynamics", o.dynamics, "auto, heat-bath or chayes-machta")->capture_default_str();
  app.add_flag("--stream", o.stream, "sample: also write one 0/1 string per sweep");
  app.add_option("--max-connected", o.max_connected, "phi-scan: largest connected set enumerated")->capture_default_str();
  app.add_option("--random-sets", o.random_sets, "phi-scan: random sets checked when n > 1")->capture_default_str();
  app.add_option("--suite", o.suite, "verify: suite name")->capture_default_str();

  for (const auto& [name, help] : kSubcommands) app.add_subcommand(name, help);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  const std::string command = app.get_subcommands().front()->get_name();
  rcm::cli::RunManifest man(command, rcm::cli::to_json(command, o), o.out);
  nlohmann::json summary;
  try {
    man.begin();
    const int code = rcm::cli::run_command(command, o, man, summary);
    man.finish(code, code == 0 ? "ok" : "validation_failed", summary);
    std::cout << summary.dump() << '\n';
    if (code != 0) std::cerr << "rcm " << command << ": an asserted invariant failed\n";
    return code;
  } catch (const rcm::Error& e) {
    std::cerr << "rcm " << command << ": " << e.what() << '\n';
    try {
      man.finish(1, std::string("error: ") + e.what());
    } catch (const std::exception&) {
    }
    return 1;
  }
}
