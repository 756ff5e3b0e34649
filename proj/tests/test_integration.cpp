#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "json.hpp"
#include "mhdp/config.hpp"
#include "mhdp/errors.hpp"
#include "mhdp/hashing.hpp"
#include "mhdp/pipeline.hpp"

using namespace mhdp;
namespace fs = std::filesystem;

namespace {

const fs::path kData = MHDP_TEST_DATA;

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mhdp_it_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

RunConfig stokes_config(const fs::path& dir) {
  std::ofstream(dir / "forcing.txt") << "tau = 10.0\n[forcing]\nx 0 1 1.0 0.0 1\n";
  RunConfig c = parse_config(
      "[domain]\nn_x = 8\nn_y = 24\n"
      "[model]\nk = 16\ntau = 10.0\nnu = 2.0\nchi = 2.0\nnonlinear = false\n"
      "[inputs]\nforcing = \"forcing.txt\"\n"
      "[solver]\nn_steps = 2048\nn_t = 32\n"
      "[verify]\nprobe_trials = 10\ndecay_periods = 0\n",
      dir);
  c.dir = (dir / "out").string();
  return c;
}

}  // namespace

TEST_CASE("linear runs record the closed-form comparison for every strategy") {
  const fs::path dir = scratch("linear");
  RunConfig c = stokes_config(dir);
  for (const char* st : {"march", "newton", "picard"}) {
    apply_override(c, std::string("solver.strategy=") + st);
    const RunResult r = cmd_solve(c);
    const auto m = nlohmann::json::parse(slurp(dir / "out" / "manifest.json"));
    REQUIRE(m.contains("closed_form_error"));
    CHECK_MESSAGE(m["closed_form_error"].get<double>() < 1e-7, st);
    CHECK(m["strategy"] == st);
    CHECK(m["config_hash"] == r.config_hash);
    CHECK(m["files"]["orbit.csv"] == nlohmann::json(sha256_file((dir / "out" / "orbit.csv").string())));
  }
}

TEST_CASE("identical config and seed give byte-identical artifacts") {
  RunConfig c = load_config((kData / "lifted.toml").string());
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  c.dir = a.string();
  const RunResult ra = cmd_solve(c);
  c.dir = b.string();
  const RunResult rb = cmd_solve(c);
  CHECK(ra.config_hash == rb.config_hash);
  for (const char* f : {"orbit.csv", "certificate.csv", "summary.txt"}) CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
}

TEST_CASE("lifted small-data run passes its certificate") {
  RunConfig c = load_config((kData / "lifted.toml").string());
  c.dir = scratch("lifted").string();
  const RunResult r = cmd_solve(c);
  CHECK(r.orbit.residual <= 1e-9);
  for (const auto& chk : r.report.checks) CHECK_MESSAGE(chk.pass, chk.name, ": ", chk.note);
  CHECK(r.report.find("contraction") != nullptr);
}

TEST_CASE("verify re-runs the certificate and detects foreign orbits") {
  RunConfig c = load_config((kData / "lifted.toml").string());
  c.dir = scratch("verify").string();
  c.decay_periods = 0;
  const RunResult r = cmd_solve(c);
  const EstimateReport v = cmd_verify(c);
  REQUIRE(v.checks.size() == r.report.checks.size());
  for (std::size_t i = 0; i < v.checks.size(); ++i) {
    CHECK(v.checks[i].name == r.report.checks[i].name);
    CHECK(v.checks[i].lhs == doctest::Approx(r.report.checks[i].lhs).epsilon(1e-12));
  }
  CHECK(fs::exists(fs::path(c.dir) / "verify_certificate.csv"));
  apply_override(c, "model.nu=1.1");
  try {
    cmd_verify(c);
    FAIL("expected ConfigMismatch");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ConfigMismatch);
  }
}

TEST_CASE("navier-stokes mode keeps the magnetic field at zero") {
  RunConfig c = load_config((kData / "lifted.toml").string());
  c.magnetic_boundary.clear();
  c.decay_periods = 0;
  c.dir = scratch("ns").string();
  const RunResult r = cmd_ns_mode(c);
  double sup_u = 0;
  for (const auto& y : r.orbit.y) {
    CHECK(y.tail(r.orbit.k).norm() == 0.0);
    sup_u = std::max(sup_u, y.head(r.orbit.k).norm());
  }
  CHECK(sup_u > 0.0);
  const auto m = nlohmann::json::parse(r.manifest);
  CHECK(m["ns_mode"]["pass"] == true);

  RunConfig z;
  z.domain.n_x = 8;
  z.domain.n_y = 16;
  z.k = 6;
  z.n_steps = 64;
  z.n_t = 16;
  z.decay_periods = 0;
  z.dir = scratch("ns_zero").string();
  CHECK_NOTHROW(cmd_ns_mode(z));

  c.magnetic_boundary = (kData / "lifted_wall.txt").string();
  try {
    cmd_ns_mode(c);
    FAIL("expected refusal");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::InvalidArgument);
  }
}

TEST_CASE("linear sweep: gaps vanish once the forcing is in the span") {
  const fs::path dir = scratch("sweep_linear");
  std::ofstream(dir / "f.txt") << "[forcing]\nx 0 1 1.0 0.0 1\n";
  RunConfig c = parse_config(
      "[domain]\nn_x = 8\nn_y = 24\n[model]\ntau = 1.0\nnonlinear = false\n"
      "[inputs]\nforcing = \"f.txt\"\n[solver]\nn_steps = 256\nn_t = 16\n[converge]\nk_list = [2, 4, 8]\n",
      dir);
  c.dir = (dir / "out").string();
  const SweepResult s = cmd_converge(c);
  REQUIRE(s.gaps.size() == 2);
  for (double g : s.gaps) CHECK(g < 1e-14);
  CHECK(s.pass);
  CHECK(fs::exists(dir / "out" / "converge.csv"));
}

TEST_CASE("sweep records per-resolution failures") {
  RunConfig c;
  c.domain.n_x = 4;
  c.domain.n_y = 4;
  c.n_steps = 64;
  c.n_t = 16;
  c.k_list = {4, 40};
  const SweepResult s = cmd_converge(c, false);
  REQUIRE(s.runs.size() == 2);
  CHECK(s.runs[0].ok);
  CHECK_FALSE(s.runs[1].ok);
  CHECK(s.runs[1].error.find("basis") != std::string::npos);
  CHECK_FALSE(s.pass);
}

TEST_CASE("basis cache is reused by later runs") {
  const fs::path dir = scratch("cache");
  RunConfig c;
  c.domain.n_x = 8;
  c.domain.n_y = 24;
  c.k = 10;
  c.k_list = {12};
  c.cache_dir = (dir / "cache").string();
  const std::string path = cmd_basis(c);
  CHECK(fs::exists(path));
  const auto with = build_system(c, 12);
  c.cache_dir.clear();
  const auto without = build_system(c, 12);
  CHECK((with->sys.lambda - without->sys.lambda).norm() == 0.0);
}

TEST_CASE("shipped configs load") {
  for (const char* name : {"small.toml", "stokes.toml", "ns.toml", "sweep.toml"}) {
    const fs::path p = kData.parent_path().parent_path() / "configs" / name;
    RunConfig c;
    CHECK_NOTHROW(c = load_config(p.string()));
    CHECK_NOTHROW(c.validate());
  }
}
