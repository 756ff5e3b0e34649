// mhdp_cli <solve|converge|ns-mode|verify|basis> CONFIG [section.key=value ...]
//
// Exit status is nonzero only for hard errors.  Failed certificate checks
// are reported in the output files and on stdout but do not change it.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mhdp/config.hpp"
#include "mhdp/errors.hpp"
#include "mhdp/pipeline.hpp"

namespace {

mhdp::RunConfig load(const std::string& path, const std::vector<std::string>& overrides) {
  mhdp::RunConfig cfg = mhdp::load_config(path);
  for (const auto& o : overrides) mhdp::apply_override(cfg, o);
  return cfg;
}

void print_run(const mhdp::RunResult& r) {
  std::printf("%s: config %s\n", r.command.c_str(), r.config_hash.c_str());
  std::printf("strategy %s, residual %.3e, %d iterations, %.2f s\n", mhdp::to_string(r.orbit.strategy),
              r.orbit.residual, r.orbit.iterations, r.orbit.wall_seconds);
  if (r.closed_form_error >= 0.0) std::printf("closed-form error %.3e\n", r.closed_form_error);
  std::cout << r.report.summary();
  for (const auto& f : r.files) std::printf("wrote %s\n", f.c_str());
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Time-periodic MHD channel flow: Galerkin solver and estimate certificates"};
  app.require_subcommand(1, 1);

  std::string config;
  std::vector<std::string> overrides;
  auto add = [&](const char* name, const char* help) {
    CLI::App* sub = app.add_subcommand(name, help);
    sub->add_option("config", config, "config file")->required()->check(CLI::ExistingFile);
    sub->add_option("overrides", overrides, "section.key=value overrides");
    return sub;
  };
  CLI::App* solve = add("solve", "solve for the periodic orbit and certify it");
  CLI::App* converge = add("converge", "Galerkin convergence sweep over converge.k_list");
  CLI::App* ns = add("ns-mode", "run with zero magnetic data and check h stays zero");
  CLI::App* verify = add("verify", "re-run the certificate on a saved orbit");
  CLI::App* basis = add("basis", "build the basis cache");

  CLI11_PARSE(app, argc, argv);

  try {
    const mhdp::RunConfig cfg = load(config, overrides);
    if (solve->parsed()) {
      print_run(mhdp::cmd_solve(cfg));
    } else if (ns->parsed()) {
      print_run(mhdp::cmd_ns_mode(cfg));
    } else if (converge->parsed()) {
      const mhdp::SweepResult s = mhdp::cmd_converge(cfg);
      std::printf("%-4s %-6s %-12s %s\n", "k", "ok", "residual", "gap");
      std::size_t g = 0;
      for (std::size_t i = 0; i < s.runs.size(); ++i) {
        const auto& e = s.runs[i];
        std::printf("%-4d %-6s %-12.3e", e.k, e.ok ? "yes" : "no", e.residual);
        if (e.ok && i > 0 && g < s.gaps.size() && s.runs[i - 1].ok) std::printf(" %.3e", s.gaps[g++]);
        if (!e.ok) std::printf(" %s", e.error.c_str());
        std::printf("\n");
      }
      std::printf("sweep %s in %.1f s\n", s.pass ? "PASS" : "FAIL", s.wall_seconds);
    } else if (verify->parsed()) {
      std::cout << mhdp::cmd_verify(cfg).summary();
    } else if (basis->parsed()) {
      std::printf("basis cache %s\n", mhdp::cmd_basis(cfg).c_str());
    }
  } catch (const mhdp::Error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 3;
  }
  return 0;
}
