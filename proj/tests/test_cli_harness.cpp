#include <filesystem>
#include <fstream>

#include "doctest.h"
#include "mhdp/config.hpp"
#include "mhdp/errors.hpp"
#include "mhdp/pipeline.hpp"

using namespace mhdp;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("mhdp_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

void write(const fs::path& p, const std::string& text) { std::ofstream(p) << text; }

ErrorKind kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("no error thrown");
  return ErrorKind::InvalidArgument;
}

}  // namespace

TEST_CASE("config file parsing") {
  const fs::path dir = scratch("parse");
  write(dir / "f.txt", "[forcing]\nx 0 1 1.0 0.0 1\n");
  const RunConfig c = parse_config(
      "# units: lengths in gap units\n"
      "[domain]\nn_x = 12\nlength_x = 3.5   # periodic length\n"
      "[model]\nk = 20\nnu = 0.5\nnonlinear = false\n"
      "[inputs]\nforcing = \"f.txt\"\n"
      "[solver]\nstrategy = \"march\"\ntol_fp = 1e-10\n"
      "[converge]\nk_list = [4, 8]\n",
      dir, "test.toml");
  CHECK(c.domain.n_x == 12);
  CHECK(c.domain.length_x == 3.5);
  CHECK(c.k == 20);
  CHECK(c.nu == 0.5);
  CHECK(c.chi == 1.0);
  CHECK_FALSE(c.nonlinear);
  CHECK(c.forcing == (dir / "f.txt").string());
  CHECK(c.strategy == Strategy::March);
  CHECK(c.tol_fp == 1e-10);
  CHECK(c.k_list == std::vector<int>{4, 8});
  CHECK_NOTHROW(c.validate());
}

TEST_CASE("config errors carry their location") {
  try {
    parse_config("[model]\nk = 3\nbogus = 1\n", ".", "run.toml");
    FAIL("expected a parse error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::Parse);
    CHECK(std::string(e.what()).find("run.toml:3") != std::string::npos);
  }
  CHECK(kind_of([] { parse_config("[model]\nk = 3\nk = 4\n", "."); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_config("[model]\nk = three\n", "."); }) == ErrorKind::Parse);
  CHECK(kind_of([] { parse_config("k = 3\n", "."); }) == ErrorKind::Parse);
}

TEST_CASE("validation") {
  RunConfig c;
  CHECK_NOTHROW(c.validate());
  c.nu = 0.0;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.n_steps = 1000;
  c.n_t = 64;
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.k_list = {16, 8};
  CHECK_THROWS_AS(c.validate(), Error);
  c = RunConfig{};
  c.forcing = "/nonexistent/forcing.txt";
  CHECK(kind_of([&] { c.validate(); }) == ErrorKind::Io);
}

TEST_CASE("overrides") {
  RunConfig c;
  apply_override(c, "model.nu=0.25");
  apply_override(c, "solver.strategy=picard");
  apply_override(c, "converge.k_list=8,16");
  apply_override(c, "model.nonlinear=false");
  CHECK(c.nu == 0.25);
  CHECK(c.strategy == Strategy::PicardPhi);
  CHECK(c.k_list == std::vector<int>{8, 16});
  CHECK_FALSE(c.nonlinear);
  CHECK_THROWS_AS(apply_override(c, "model.nu"), Error);
  CHECK_THROWS_AS(apply_override(c, "model.mu=1"), Error);
}

TEST_CASE("config hash follows content, not paths or output location") {
  const fs::path dir = scratch("hash");
  write(dir / "a.txt", "[forcing]\nx 0 1 1.0 0.0 1\n");
  write(dir / "b.txt", "[forcing]\nx 0 1 1.0 0.0 1\n");
  RunConfig a, b;
  a.forcing = (dir / "a.txt").string();
  b.forcing = (dir / "b.txt").string();
  b.dir = "elsewhere";
  CHECK(config_hash(a) == config_hash(b));
  write(dir / "b.txt", "[forcing]\nx 0 1 2.0 0.0 1\n");
  CHECK(config_hash(a) != config_hash(b));
  RunConfig c = a;
  c.seed = 2;
  CHECK(config_hash(a) != config_hash(c));
  CHECK(config_hash(a).size() == 64);
  CHECK(canonical_config(a).find("model.nu = ") != std::string::npos);
}

TEST_CASE("orbit csv round trip") {
  const fs::path dir = scratch("csv");
  PeriodicOrbit o;
  o.k = 2;
  o.strategy = Strategy::PicardPhi;
  for (int n = 0; n <= 4; ++n) {
    o.t.push_back(0.25 * n);
    Eigen::VectorXd y(4);
    y << 0.1 * n, 1.0 / 3.0, -2e-17, 5.0 + n;
    o.y.push_back(y);
  }
  const std::string path = (dir / "orbit.csv").string();
  write_orbit_csv(path, o, "abc123", 1.0);
  std::string hash;
  const PeriodicOrbit r = read_orbit_csv(path, &hash);
  CHECK(hash == "abc123");
  CHECK(r.k == 2);
  CHECK(r.strategy == Strategy::PicardPhi);
  REQUIRE(r.y.size() == o.y.size());
  for (std::size_t n = 0; n < o.y.size(); ++n) {
    CHECK(r.t[n] == o.t[n]);
    CHECK((r.y[n] - o.y[n]).norm() == 0.0);
  }
  std::ifstream in(path);
  std::string l1, l2, l3;
  std::getline(in, l1);
  std::getline(in, l2);
  std::getline(in, l3);
  CHECK(l1 == "# config_hash=abc123");
  CHECK(l3 == "t,c_1,c_2,d_1,d_2");
  write(dir / "bad.csv", "t,c_1,d_1\n0,1\n");
  CHECK(kind_of([&] { read_orbit_csv((dir / "bad.csv").string(), nullptr); }) == ErrorKind::Parse);
}

TEST_CASE("sweep pass rule") {
  CHECK(sweep_passes({}));
  CHECK(sweep_passes({1.0, 0.5, 0.2}));
  CHECK(sweep_passes({1.0, 0.5, 0.25}));
  CHECK_FALSE(sweep_passes({1.0, 0.5, 0.3}));  // last above first / 4
  CHECK_FALSE(sweep_passes({1.0, 1.2, 0.1}));  // increases
  CHECK(sweep_passes({1.0, 0.0, 0.0}));
  CHECK_FALSE(sweep_passes({1e-17, 3e-17}));
  CHECK(sweep_passes({1e-17, 3e-17}, 1e-15));
}

TEST_CASE("orbit gap pads the coarser orbit") {
  PeriodicOrbit a, b;
  a.k = 1;
  b.k = 2;
  for (int n = 0; n < 3; ++n) {
    a.t.push_back(n);
    b.t.push_back(n);
    a.y.push_back(Eigen::Vector2d(1.0, 2.0));
    b.y.push_back(Eigen::Vector4d(1.0, 3.0, 2.0, 0.0));
  }
  CHECK(orbit_gap(a, b, 4.0) == doctest::Approx(std::sqrt(4.0 * 9.0)));
  b.y.pop_back();
  CHECK_THROWS_AS(orbit_gap(a, b, 1.0), Error);
}

TEST_CASE("zero-input solve writes tagged outputs and passes every check") {
  const fs::path dir = scratch("zero");
  RunConfig c;
  c.domain.n_x = 8;
  c.domain.n_y = 16;
  c.k = 6;
  c.n_steps = 64;
  c.n_t = 16;
  c.probe_trials = 5;
  c.decay_periods = 0;
  c.dir = (dir / "out").string();
  const RunResult r = cmd_solve(c);
  for (const auto& y : r.orbit.y) CHECK(y.norm() == 0.0);
  CHECK(r.report.all_pass());
  CHECK(r.files.size() == 4);
  for (const auto& f : r.files) {
    REQUIRE(fs::exists(f));
    std::ifstream in(f);
    std::string all((std::istreambuf_iterator<char>(in)), {});
    CHECK_MESSAGE(all.find(r.config_hash) != std::string::npos, f);
  }
  CHECK(r.closed_form_error == -1.0);
}

TEST_CASE("stage labels on errors") {
  RunConfig c;
  c.domain.n_x = 4;
  c.domain.n_y = 4;
  c.k = 100;
  try {
    build_system(c, c.k);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(std::string(e.what()).find("basis: ") != std::string::npos);
  }
}

TEST_CASE("single-resolution sweep is trivially passing") {
  RunConfig c;
  c.domain.n_x = 8;
  c.domain.n_y = 16;
  c.n_steps = 64;
  c.n_t = 16;
  c.k_list = {6};
  const SweepResult s = cmd_converge(c, false);
  CHECK(s.gaps.empty());
  CHECK(s.pass);
  REQUIRE(s.runs.size() == 1);
  CHECK(s.runs[0].ok);
}
