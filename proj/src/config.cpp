#include "mhdp/config.hpp"

#include <algorithm>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "mhdp/errors.hpp"
#include "mhdp/hashing.hpp"

namespace mhdp {

namespace {

[[noreturn]] void parse_error(const std::string& where, const std::string& what) {
  throw Error(ErrorKind::Parse, where + ": " + what);
}

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string strip_comment(const std::string& line) {
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"') quoted = !quoted;
    if (line[i] == '#' && !quoted) return line.substr(0, i);
  }
  return line;
}

std::string as_string(const std::string& v, const std::string& where) {
  if (v.size() >= 2 && v.front() == '"' && v.back() == '"') return v.substr(1, v.size() - 2);
  parse_error(where, "expected a quoted string, got " + v);
}

double as_double(const std::string& v, const std::string& where) {
  double out = 0.0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) parse_error(where, "expected a number, got " + v);
  return out;
}

long long as_int(const std::string& v, const std::string& where) {
  long long out = 0;
  const auto r = std::from_chars(v.data(), v.data() + v.size(), out);
  if (r.ec != std::errc() || r.ptr != v.data() + v.size()) parse_error(where, "expected an integer, got " + v);
  return out;
}

bool as_bool(const std::string& v, const std::string& where) {
  if (v == "true") return true;
  if (v == "false") return false;
  parse_error(where, "expected true or false, got " + v);
}

std::vector<int> as_int_list(const std::string& v, const std::string& where) {
  if (v.size() < 2 || v.front() != '[' || v.back() != ']') parse_error(where, "expected [a, b, ...], got " + v);
  std::vector<int> out;
  std::stringstream ss(v.substr(1, v.size() - 2));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(static_cast<int>(as_int(item, where)));
  }
  return out;
}

std::string resolve(const std::string& p, const std::filesystem::path& base) {
  if (p.empty()) return p;
  const std::filesystem::path path(p);
  return path.is_absolute() ? path.lexically_normal().string() : (base / path).lexically_normal().string();
}

void set_field(RunConfig& c, const std::string& key, const std::string& v, const std::string& where) {
  auto S = [&] { return as_string(v, where); };
  auto D = [&] { return as_double(v, where); };
  auto I = [&] { return static_cast<int>(as_int(v, where)); };
  auto B = [&] { return as_bool(v, where); };
  if (key == "domain.length_x") c.domain.length_x = D();
  else if (key == "domain.wall_gap") c.domain.wall_gap = D();
  else if (key == "domain.n_x") c.domain.n_x = I();
  else if (key == "domain.n_y") c.domain.n_y = I();
  else if (key == "model.k") c.k = I();
  else if (key == "model.tau") c.tau = D();
  else if (key == "model.alpha") c.alpha = D();
  else if (key == "model.nu") c.nu = D();
  else if (key == "model.chi") c.chi = D();
  else if (key == "model.gamma") c.gamma = D();
  else if (key == "model.epsilon") c.epsilon = D();
  else if (key == "model.nonlinear") c.nonlinear = B();
  else if (key == "inputs.forcing") c.forcing = resolve(S(), c.base_dir);
  else if (key == "inputs.velocity_boundary") c.velocity_boundary = resolve(S(), c.base_dir);
  else if (key == "inputs.magnetic_boundary") c.magnetic_boundary = resolve(S(), c.base_dir);
  else if (key == "solver.strategy") c.strategy = parse_strategy(S());
  else if (key == "solver.tol_fp") c.tol_fp = D();
  else if (key == "solver.n_steps") c.n_steps = I();
  else if (key == "solver.n_t") c.n_t = I();
  else if (key == "solver.max_periods") c.max_periods = I();
  else if (key == "solver.max_newton") c.max_newton = I();
  else if (key == "solver.max_picard") c.max_picard = I();
  else if (key == "solver.growth_limit") c.growth_limit = D();
  else if (key == "solver.max_rejections") c.max_rejections = I();
  else if (key == "solver.seed") c.seed = static_cast<std::uint64_t>(as_int(v, where));
  else if (key == "solver.cross_check") {
    c.cross_check = S();
    if (!c.cross_check.empty()) parse_strategy(c.cross_check);
  } else if (key == "verify.probe_trials") c.probe_trials = I();
  else if (key == "verify.decay_periods") c.decay_periods = I();
  else if (key == "verify.decay_size") c.decay_size = D();
  else if (key == "verify.drift_check") c.drift_check = B();
  else if (key == "verify.orbit") c.orbit = resolve(S(), c.base_dir);
  else if (key == "converge.k_list") c.k_list = as_int_list(v, where);
  else if (key == "output.dir") c.dir = resolve(S(), c.base_dir);
  else if (key == "output.cache_dir") c.cache_dir = resolve(S(), c.base_dir);
  else parse_error(where, "unknown key " + key);
}

std::string num(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string quote_str(const std::string& s) { return '"' + s + '"'; }

}  // namespace

SolverConfig RunConfig::solver_config() const {
  SolverConfig s;
  s.strategy = strategy;
  s.tol_fp = tol_fp;
  s.max_periods = max_periods;
  s.max_newton = max_newton;
  s.max_picard = max_picard;
  s.seed = seed;
  s.integrator.n_steps = n_steps;
  s.integrator.growth_limit = growth_limit;
  s.integrator.max_rejections = max_rejections;
  return s;
}

void RunConfig::validate() const {
  domain.validate();
  auto positive = [](double v, const char* name) {
    if (!(v > 0.0)) throw Error(ErrorKind::NonpositiveCoefficient, std::string(name) + " must be positive");
  };
  positive(alpha, "model.alpha");
  positive(nu, "model.nu");
  positive(chi, "model.chi");
  positive(tau, "model.tau");
  positive(epsilon, "model.epsilon");
  positive(tol_fp, "solver.tol_fp");
  if (gamma < 0.0) throw Error(ErrorKind::InvalidArgument, "model.gamma must be >= 0");
  if (k < 1) throw Error(ErrorKind::InvalidArgument, "model.k must be >= 1");
  if (n_steps < 1 || n_t < 2) throw Error(ErrorKind::InvalidArgument, "solver.n_steps >= 1 and solver.n_t >= 2");
  if (n_steps % n_t != 0) throw Error(ErrorKind::InvalidArgument, "solver.n_steps must be a multiple of solver.n_t");
  if (probe_trials < 0 || decay_periods < 0) throw Error(ErrorKind::InvalidArgument, "verify counts must be >= 0");
  if (decay_periods == 1) throw Error(ErrorKind::InvalidArgument, "verify.decay_periods must be 0 or >= 2");
  for (std::size_t i = 1; i < k_list.size(); ++i)
    if (k_list[i] <= k_list[i - 1]) throw Error(ErrorKind::InvalidArgument, "converge.k_list must be increasing");
  for (const std::string* p : {&forcing, &velocity_boundary, &magnetic_boundary})
    if (!p->empty() && !std::filesystem::exists(*p)) throw Error(ErrorKind::Io, "input file not found: " + *p);
}

RunConfig parse_config(const std::string& text, const std::filesystem::path& base_dir, const std::string& origin) {
  RunConfig c;
  c.base_dir = base_dir;
  c.dir = resolve(c.dir, base_dir);
  std::istringstream in(text);
  std::string line, section;
  int lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string where = origin + ":" + std::to_string(lineno);
    line = trim(strip_comment(line));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line.back() != ']') parse_error(where, "unterminated section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) parse_error(where, "expected key = value");
    if (section.empty()) parse_error(where, "key outside of a section");
    const std::string key = section + "." + trim(line.substr(0, eq));
    if (std::find(seen.begin(), seen.end(), key) != seen.end()) parse_error(where, "duplicate key " + key);
    seen.push_back(key);
    set_field(c, key, trim(line.substr(eq + 1)), where);
  }
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorKind::Io, "cannot open config " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  const auto base = std::filesystem::absolute(path).parent_path();
  return parse_config(ss.str(), base, path);
}

void apply_override(RunConfig& cfg, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw Error(ErrorKind::Parse, "override must be section.key=value: " + assignment);
  const std::string key = trim(assignment.substr(0, eq));
  std::string value = trim(assignment.substr(eq + 1));
  // Bare words are accepted for string keys on the command line.
  const bool stringy = key.rfind("inputs.", 0) == 0 || key == "solver.strategy" || key == "solver.cross_check" ||
                       key == "verify.orbit" || key.rfind("output.", 0) == 0;
  if (stringy && (value.empty() || value.front() != '"')) value = quote_str(value);
  if (key == "converge.k_list" && (value.empty() || value.front() != '[')) value = "[" + value + "]";
  // Paths given on the command line are relative to the working directory.
  RunConfig tmp = cfg;
  if (stringy) tmp.base_dir = std::filesystem::current_path();
  set_field(tmp, key, value, "override " + assignment);
  tmp.base_dir = cfg.base_dir;
  cfg = std::move(tmp);
}

std::vector<std::pair<std::string, std::string>> config_fields(const RunConfig& c) {
  std::string ks;
  for (std::size_t i = 0; i < c.k_list.size(); ++i) ks += (i ? ", " : "") + std::to_string(c.k_list[i]);
  std::vector<std::pair<std::string, std::string>> f = {
      {"domain.length_x", num(c.domain.length_x)},
      {"domain.wall_gap", num(c.domain.wall_gap)},
      {"domain.n_x", std::to_string(c.domain.n_x)},
      {"domain.n_y", std::to_string(c.domain.n_y)},
      {"model.k", std::to_string(c.k)},
      {"model.tau", num(c.tau)},
      {"model.alpha", num(c.alpha)},
      {"model.nu", num(c.nu)},
      {"model.chi", num(c.chi)},
      {"model.gamma", num(c.gamma)},
      {"model.epsilon", num(c.epsilon)},
      {"model.nonlinear", c.nonlinear ? "true" : "false"},
      {"inputs.forcing", quote_str(c.forcing)},
      {"inputs.velocity_boundary", quote_str(c.velocity_boundary)},
      {"inputs.magnetic_boundary", quote_str(c.magnetic_boundary)},
      {"solver.strategy", quote_str(to_string(c.strategy))},
      {"solver.tol_fp", num(c.tol_fp)},
      {"solver.n_steps", std::to_string(c.n_steps)},
      {"solver.n_t", std::to_string(c.n_t)},
      {"solver.max_periods", std::to_string(c.max_periods)},
      {"solver.max_newton", std::to_string(c.max_newton)},
      {"solver.max_picard", std::to_string(c.max_picard)},
      {"solver.growth_limit", num(c.growth_limit)},
      {"solver.max_rejections", std::to_string(c.max_rejections)},
      {"solver.seed", std::to_string(c.seed)},
      {"solver.cross_check", quote_str(c.cross_check)},
      {"verify.probe_trials", std::to_string(c.probe_trials)},
      {"verify.decay_periods", std::to_string(c.decay_periods)},
      {"verify.decay_size", num(c.decay_size)},
      {"verify.drift_check", c.drift_check ? "true" : "false"},
      {"converge.k_list", "[" + ks + "]"},
  };
  std::sort(f.begin(), f.end());
  return f;
}

std::string canonical_config(const RunConfig& cfg) {
  std::string out;
  for (const auto& [k, v] : config_fields(cfg)) out += k + " = " + v + "\n";
  return out;
}

std::string config_hash(const RunConfig& cfg) {
  std::string text;
  for (const auto& [k, v] : config_fields(cfg))
    if (k.rfind("inputs.", 0) != 0) text += k + " = " + v + "\n";
  const std::pair<const char*, const std::string*> inputs[] = {
      {"forcing", &cfg.forcing}, {"velocity_boundary", &cfg.velocity_boundary},
      {"magnetic_boundary", &cfg.magnetic_boundary}};
  for (const auto& [name, p] : inputs) text += std::string(name) + " " + (p->empty() ? "-" : sha256_file(*p)) + "\n";
  return sha256_hex(text);
}

}  // namespace mhdp
