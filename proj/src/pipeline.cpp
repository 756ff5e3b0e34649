#include "mhdp/pipeline.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include "json.hpp"
#include <sstream>

#include "mhdp/basis_cache.hpp"
#include "mhdp/errors.hpp"
#include "mhdp/hashing.hpp"
#include "mhdp/parallel.hpp"

namespace mhdp {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

using Clock = std::chrono::steady_clock;

template <class F>
auto stage(const char* name, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    std::string msg = e.what();
    const std::string kind = std::string(to_string(e.kind())) + ": ";
    if (msg.rfind(kind, 0) == 0) msg.erase(0, kind.size());
    throw Error(e.kind(), std::string(name) + ": " + msg);
  }
}

HarmonicFile read_input(const std::string& path, double tau) {
  if (path.empty()) return {};
  HarmonicFile h = read_harmonic_file(path);
  if (h.tau && std::abs(*h.tau - tau) > 1e-12 * tau)
    throw Error(ErrorKind::ConfigMismatch, path + " declares tau = " + std::to_string(*h.tau) +
                                               " but the model period is " + std::to_string(tau));
  return h;
}

std::string basis_cache_path(const RunConfig& cfg) {
  if (cfg.cache_dir.empty()) return {};
  return (fs::path(cfg.cache_dir) / ("basis-" + hex64(cfg.domain.hash()) + ".bin")).string();
}

std::string fmt(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string write_text(const fs::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw Error(ErrorKind::Io, "cannot write " + path.string());
  f << text;
  if (!f) throw Error(ErrorKind::Io, "write failed for " + path.string());
  return path.string();
}

double closed_form_error(const RunSystem& rs, const PeriodicOrbit& o) {
  double err = 0.0, scale = 0.0;
  for (std::size_t n = 0; n < o.y.size(); ++n) {
    const Eigen::VectorXd ex = linear_response(rs.sys, o.t[n]);
    err = std::max(err, (o.y[n] - ex).cwiseAbs().maxCoeff());
    scale = std::max(scale, ex.cwiseAbs().maxCoeff());
  }
  return scale > 0.0 ? err / scale : err;
}

json extension_json(const ExtensionField& B) {
  if (B.zero()) return nullptr;
  return {{"epsilon", B.epsilon}, {"delta", B.delta}, {"inner_radius", B.inner_radius}, {"log_span", B.log_span}};
}

RunResult solve_and_verify(const RunConfig& cfg, const std::string& command) {
  stage("config", [&] { cfg.validate(); });
  const auto start = Clock::now();
  RunResult res;
  res.command = command;
  res.config_hash = config_hash(cfg);
  const auto rs = build_system(cfg, cfg.k);
  const SolverConfig sc = cfg.solver_config();
  res.orbit = stage("solve", [&] { return solve_periodic(rs->sys, sc); });

  const bool linear_free = !cfg.nonlinear && rs->B1.zero() && rs->B2.zero();
  if (linear_free) res.closed_form_error = closed_form_error(*rs, res.orbit);

  res.report = stage("verify", [&] {
    VerifyOptions vo;
    vo.probe_trials = cfg.probe_trials;
    vo.seed = cfg.seed;
    EstimateReport rep = verify_orbit(res.orbit, rs->inputs(), vo);
    if (cfg.decay_periods > 0) {
      try {
        const DecayReport d =
            contraction_probe(rs->sys, res.orbit, cfg.decay_size, cfg.decay_periods, sc.integrator, cfg.seed);
        rep.add(contraction_check(d));
        rep.set_constant("q_emp", d.q_emp);
        rep.set_constant("q_structure", d.q_structure);
        rep.set_constant("l_emp", d.l_emp);
      } catch (const Error& e) {
        rep.add(make_check("contraction", INFINITY, 1.0, e.what()));
      }
    }
    if (!cfg.cross_check.empty()) {
      SolverConfig other = sc;
      other.strategy = parse_strategy(cfg.cross_check);
      try {
        const PeriodicOrbit o2 = solve_periodic(rs->sys, other);
        CheckRecord r = uniqueness_gap_check(res.orbit, o2, cfg.alpha);
        r.note += std::string(" against ") + to_string(other.strategy);
        rep.add(r);
      } catch (const Error& e) {
        rep.add(make_check("uniqueness-gap", INFINITY, 0.0, e.what()));
      }
    }
    if (cfg.drift_check) {
      SolverConfig fine = sc;
      fine.integrator.n_steps *= 2;
      try {
        const PeriodicOrbit o2 = solve_periodic(rs->sys, fine);
        const double drift = higher_order_drift(higher_order_report(res.orbit, rs->sys),
                                                higher_order_report(o2, rs->sys));
        rep.add(make_check("higher-order-drift", drift, 0.1, "relative change at doubled n_steps"));
      } catch (const Error& e) {
        rep.add(make_check("higher-order-drift", INFINITY, 0.1, e.what()));
      }
    }
    return rep;
  });

  json m;
  m["command"] = command;
  m["config_hash"] = res.config_hash;
  json conf = json::object();
  for (const auto& [k, v] : config_fields(cfg)) conf[k] = v;
  m["config"] = conf;
  m["strategy"] = to_string(res.orbit.strategy);
  m["k"] = cfg.k;
  m["tol_fp"] = cfg.tol_fp;
  m["n_steps"] = cfg.n_steps;
  m["seed"] = cfg.seed;
  m["residual"] = res.orbit.residual;
  m["iterations"] = res.orbit.iterations;
  m["history"] = res.orbit.history;
  m["solve_seconds"] = res.orbit.wall_seconds;
  m["wall_seconds"] = std::chrono::duration<double>(Clock::now() - start).count();
  if (res.orbit.superposition_error >= 0.0) m["superposition_error"] = res.orbit.superposition_error;
  if (res.closed_form_error >= 0.0) m["closed_form_error"] = res.closed_form_error;
  m["lift_velocity"] = extension_json(rs->B1);
  m["lift_magnetic"] = extension_json(rs->B2);
  int passed = 0;
  for (const auto& c : res.report.checks) passed += c.pass;
  m["certificate"] = {{"passed", passed}, {"total", res.report.checks.size()}, {"all_pass", res.report.all_pass()}};
  json consts = json::object();
  for (const auto& [k, v] : res.report.constants) consts[k] = std::isfinite(v) ? json(v) : json(fmt(v));
  m["constants"] = consts;
  res.manifest = m.dump(2);
  return res;
}

void write_outputs(const RunConfig& cfg, RunResult& res) {
  stage("output", [&] {
    fs::create_directories(cfg.dir);
    const fs::path dir(cfg.dir);
    std::ostringstream orbit, cert;
    const std::string orbit_path = (dir / "orbit.csv").string();
    write_orbit_csv(orbit_path, res.orbit, res.config_hash, cfg.tau);
    cert << "# config_hash=" << res.config_hash << '\n';
    res.report.write_csv(cert);
    write_text(dir / "certificate.csv", cert.str());
    write_text(dir / "summary.txt", "# config_hash=" + res.config_hash + "\n" + res.report.summary());
    json m = json::parse(res.manifest);
    json files = json::object();
    for (const char* f : {"orbit.csv", "certificate.csv", "summary.txt"}) files[f] = sha256_file((dir / f).string());
    m["files"] = files;
    res.manifest = m.dump(2);
    write_text(dir / "manifest.json", res.manifest + "\n");
    res.files = {orbit_path, (dir / "certificate.csv").string(), (dir / "summary.txt").string(),
                 (dir / "manifest.json").string()};
  });
}

}  // namespace

std::unique_ptr<RunSystem> build_system(const RunConfig& cfg, int k) {
  auto rs = std::make_unique<RunSystem>();
  rs->cfg = cfg;
  rs->k = k;
  const HarmonicFile fh = stage("inputs", [&] { return read_input(cfg.forcing, cfg.tau); });
  const HarmonicFile vh = stage("inputs", [&] { return read_input(cfg.velocity_boundary, cfg.tau); });
  const HarmonicFile mh = stage("inputs", [&] { return read_input(cfg.magnetic_boundary, cfg.tau); });
  rs->forcing.tau = cfg.tau;
  rs->forcing.terms = fh.forcing;
  rs->beta1 = vh.boundary;
  rs->beta2 = mh.boundary;
  rs->beta1.tau = rs->beta2.tau = cfg.tau;

  stage("basis", [&] {
    const std::string path = basis_cache_path(cfg);
    rs->basis.emplace(path.empty() ? build_basis(cfg.domain, k) : cached_basis(path, cfg.domain, k));
  });
  stage("extension", [&] {
    if (!rs->beta1.zero()) rs->B1 = build_extension(rs->beta1, cfg.epsilon, *rs->basis, cfg.n_t);
    if (!rs->beta2.zero()) rs->B2 = build_extension(rs->beta2, cfg.epsilon, *rs->basis, cfg.n_t);
  });
  stage("assembly", [&] {
    AssemblyOptions opt;
    opt.nonlinear = cfg.nonlinear;
    opt.n_t = cfg.n_t;
    rs->sys = assemble(*rs->basis, rs->B1, rs->B2, rs->forcing, {cfg.alpha, cfg.nu, cfg.chi}, opt);
  });
  return rs;
}

RunResult cmd_solve(const RunConfig& cfg, bool write) {
  RunResult res = solve_and_verify(cfg, "solve");
  if (write) write_outputs(cfg, res);
  return res;
}

RunResult cmd_ns_mode(const RunConfig& cfg, bool write) {
  if (!cfg.magnetic_boundary.empty()) {
    const HarmonicFile mh = stage("inputs", [&] { return read_input(cfg.magnetic_boundary, cfg.tau); });
    if (!mh.boundary.zero())
      throw Error(ErrorKind::InvalidArgument, "ns-mode requires zero magnetic boundary data");
  }
  RunResult res = solve_and_verify(cfg, "ns-mode");
  double sup_h = 0.0, sup_u = 0.0;
  for (const auto& y : res.orbit.y) {
    sup_u = std::max(sup_u, y.head(res.orbit.k).norm());
    sup_h = std::max(sup_h, y.tail(res.orbit.k).norm());
  }
  const double bound = 1e-12 * (1.0 + sup_u);
  json m = json::parse(res.manifest);
  m["ns_mode"] = {{"sup_h", sup_h}, {"sup_u", sup_u}, {"bound", bound}, {"pass", sup_h <= bound}};
  res.manifest = m.dump(2);
  if (write) write_outputs(cfg, res);
  if (!(sup_h <= bound))
    throw Error(ErrorKind::MagneticLeak, "sup|h| = " + fmt(sup_h) + " exceeds " + fmt(bound));
  return res;
}

double orbit_gap(const PeriodicOrbit& a, const PeriodicOrbit& b, double alpha) {
  if (a.y.size() != b.y.size()) throw Error(ErrorKind::GridMismatch, "orbits use different time grids");
  const int K = std::max(a.k, b.k);
  auto pad = [K](const PeriodicOrbit& o, std::size_t n) {
    Eigen::VectorXd y = Eigen::VectorXd::Zero(2 * K);
    y.head(o.k) = o.y[n].head(o.k);
    y.segment(K, o.k) = o.y[n].tail(o.k);
    return y;
  };
  double gap = 0.0;
  for (std::size_t n = 0; n < a.y.size(); ++n) gap = std::max(gap, energy_norm(pad(a, n) - pad(b, n), alpha));
  return gap;
}

bool sweep_passes(const std::vector<double>& gaps, double floor) {
  if (gaps.size() < 2) return true;
  auto g = [&](std::size_t i) { return gaps[i] <= floor ? 0.0 : gaps[i]; };
  for (std::size_t i = 1; i < gaps.size(); ++i)
    if (!(g(i) <= g(i - 1))) return false;
  return g(gaps.size() - 1) <= g(0) / 4.0;
}

SweepResult cmd_converge(const RunConfig& cfg, bool write) {
  stage("config", [&] { cfg.validate(); });
  if (cfg.k_list.empty()) throw Error(ErrorKind::InvalidArgument, "converge.k_list is empty");
  const auto start = Clock::now();
  SweepResult out;
  out.runs.resize(cfg.k_list.size());
  const SolverConfig sc = cfg.solver_config();
  parallel_for(static_cast<int>(cfg.k_list.size()), [&](int i) {
    SweepEntry& e = out.runs[i];
    e.k = cfg.k_list[i];
    try {
      const auto rs = build_system(cfg, e.k);
      e.orbit = stage("solve", [&] { return solve_periodic(rs->sys, sc); });
      e.ok = true;
      e.residual = e.orbit.residual;
      e.iterations = e.orbit.iterations;
      e.wall_seconds = e.orbit.wall_seconds;
    } catch (const Error& err) {
      e.error = err.what();
    }
  });
  const SweepEntry* prev = nullptr;
  std::vector<double> gap_of(out.runs.size(), -1.0);
  for (std::size_t i = 0; i < out.runs.size(); ++i) {
    if (!out.runs[i].ok) continue;
    if (prev) {
      gap_of[i] = orbit_gap(prev->orbit, out.runs[i].orbit, cfg.alpha);
      out.gaps.push_back(gap_of[i]);
    }
    prev = &out.runs[i];
  }
  const bool all_ok = std::all_of(out.runs.begin(), out.runs.end(), [](const SweepEntry& e) { return e.ok; });
  double scale = 0.0;
  for (const auto& e : out.runs)
    for (const auto& y : e.orbit.y) scale = std::max(scale, energy_norm(y, cfg.alpha));
  out.pass = all_ok && sweep_passes(out.gaps, 1e-13 * scale);
  out.wall_seconds = std::chrono::duration<double>(Clock::now() - start).count();

  if (write) {
    stage("output", [&] {
      fs::create_directories(cfg.dir);
      const std::string hash = config_hash(cfg);
      std::ostringstream csv;
      csv << "# config_hash=" << hash << "\nk,ok,residual,iterations,gap_to_previous,error\n";
      for (std::size_t i = 0; i < out.runs.size(); ++i) {
        const auto& e = out.runs[i];
        csv << e.k << ',' << (e.ok ? "true" : "false") << ',' << fmt(e.residual) << ',' << e.iterations << ','
            << (gap_of[i] >= 0.0 ? fmt(gap_of[i]) : std::string()) << ",\"" << e.error << "\"\n";
      }
      const fs::path dir(cfg.dir);
      write_text(dir / "converge.csv", csv.str());
      json m;
      m["command"] = "converge";
      m["config_hash"] = hash;
      m["k_list"] = cfg.k_list;
      m["gaps"] = out.gaps;
      m["pass"] = out.pass;
      m["wall_seconds"] = out.wall_seconds;
      m["files"] = {{"converge.csv", sha256_file((dir / "converge.csv").string())}};
      write_text(dir / "converge_manifest.json", m.dump(2) + "\n");
    });
  }
  return out;
}

EstimateReport cmd_verify(const RunConfig& cfg, bool write) {
  stage("config", [&] { cfg.validate(); });
  const std::string path = cfg.orbit.empty() ? (fs::path(cfg.dir) / "orbit.csv").string() : cfg.orbit;
  std::string recorded;
  const PeriodicOrbit orbit = stage("load", [&] { return read_orbit_csv(path, &recorded); });
  const std::string hash = config_hash(cfg);
  if (recorded != hash)
    throw Error(ErrorKind::ConfigMismatch, path + " was written for config " + recorded + ", not " + hash);
  const auto rs = build_system(cfg, cfg.k);
  if (orbit.k != rs->sys.k) throw Error(ErrorKind::ConfigMismatch, "orbit has a different number of modes");
  EstimateReport rep = stage("verify", [&] {
    VerifyOptions vo;
    vo.probe_trials = cfg.probe_trials;
    vo.seed = cfg.seed;
    return verify_orbit(orbit, rs->inputs(), vo);
  });
  if (write) {
    stage("output", [&] {
      fs::create_directories(cfg.dir);
      std::ostringstream cert;
      cert << "# config_hash=" << hash << '\n';
      rep.write_csv(cert);
      write_text(fs::path(cfg.dir) / "verify_certificate.csv", cert.str());
    });
  }
  return rep;
}

std::string cmd_basis(const RunConfig& cfg) {
  stage("config", [&] { cfg.validate(); });
  const std::string path = basis_cache_path(cfg);
  if (path.empty()) throw Error(ErrorKind::InvalidArgument, "output.cache_dir is not set");
  int k = cfg.k;
  for (int kk : cfg.k_list) k = std::max(k, kk);
  stage("basis", [&] {
    fs::create_directories(cfg.cache_dir);
    cached_basis(path, cfg.domain, k);
  });
  return path;
}

void write_orbit_csv(const std::string& path, const PeriodicOrbit& orbit, const std::string& config_hash,
                     double tau) {
  std::string out;
  out.reserve(orbit.y.size() * (2 * orbit.k + 1) * 24);
  out += "# config_hash=" + config_hash + "\n";
  out += "# strategy=" + std::string(to_string(orbit.strategy)) + " k=" + std::to_string(orbit.k) +
         " tau=" + fmt(tau) + "\n";
  out += "t";
  for (int j = 1; j <= orbit.k; ++j) out += ",c_" + std::to_string(j);
  for (int j = 1; j <= orbit.k; ++j) out += ",d_" + std::to_string(j);
  out += '\n';
  for (std::size_t n = 0; n < orbit.y.size(); ++n) {
    out += fmt(orbit.t[n]);
    for (Eigen::Index i = 0; i < orbit.y[n].size(); ++i) {
      out += ',';
      out += fmt(orbit.y[n](i));
    }
    out += '\n';
  }
  write_text(path, out);
}

PeriodicOrbit read_orbit_csv(const std::string& path, std::string* config_hash) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open " + path);
  PeriodicOrbit o;
  std::string line;
  int lineno = 0;
  bool header = false;
  while (std::getline(f, line)) {
    ++lineno;
    if (line.empty()) continue;
    if (line[0] == '#') {
      const std::string key = "# config_hash=";
      if (line.rfind(key, 0) == 0 && config_hash) *config_hash = line.substr(key.size());
      const auto s = line.find("strategy=");
      if (s != std::string::npos) o.strategy = parse_strategy(line.substr(s + 9, line.find(' ', s) - s - 9));
      continue;
    }
    if (!header) {
      int cols = 0;
      for (char ch : line) cols += ch == ',';
      if (cols % 2 != 0 || line.rfind("t,", 0) != 0)
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": bad orbit header");
      o.k = cols / 2;
      header = true;
      continue;
    }
    std::stringstream ss(line);
    std::string cell;
    std::vector<double> vals;
    while (std::getline(ss, cell, ',')) {
      try {
        std::size_t used = 0;
        vals.push_back(std::stod(cell, &used));
        if (used != cell.size()) throw std::invalid_argument(cell);
      } catch (const std::exception&) {
        throw Error(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": bad number " + cell);
      }
    }
    if (static_cast<int>(vals.size()) != 2 * o.k + 1)
      throw Error(ErrorKind::Parse, path + ":" + std::to_string(lineno) + ": wrong column count");
    o.t.push_back(vals[0]);
    o.y.push_back(Eigen::Map<Eigen::VectorXd>(vals.data() + 1, 2 * o.k));
  }
  if (o.y.size() < 2) throw Error(ErrorKind::Parse, path + ": orbit has fewer than two rows");
  o.residual = (o.y.back() - o.y.front()).norm();
  return o;
}

}  // namespace mhdp
