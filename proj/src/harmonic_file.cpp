#include "mhdp/harmonic_file.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "mhdp/errors.hpp"

namespace mhdp {

bool BoundaryData::zero() const {
  for (const auto& w : walls)
    for (const auto& h : w)
      if (h.amplitude != 0.0) return false;
  return true;
}

int BoundaryData::max_m_t() const {
  int m = 0;
  for (const auto& w : walls)
    for (const auto& h : w) m = std::max(m, std::abs(h.m_t));
  return m;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

HarmonicFile parse_harmonic_text(const std::string& text, const std::string& origin) {
  HarmonicFile out;
  enum { None, Bottom, Top, Forcing } section = None;
  std::istringstream in(text);
  std::string raw;
  int lineno = 0;
  auto fail = [&](const std::string& msg) {
    throw Error(ErrorKind::Parse, origin + ":" + std::to_string(lineno) + ": " + msg);
  };
  while (std::getline(in, raw)) {
    ++lineno;
    std::string line = trim(raw.substr(0, raw.find('#')));
    if (line.empty()) continue;
    if (line.front() == '[') {
      if (line == "[wall bottom]") section = Bottom;
      else if (line == "[wall top]") section = Top;
      else if (line == "[forcing]") section = Forcing;
      else fail("unknown section " + line);
      continue;
    }
    if (const auto eq = line.find('='); eq != std::string::npos) {
      const std::string key = trim(line.substr(0, eq));
      if (key != "tau") fail("unknown key " + key);
      try {
        out.tau = std::stod(trim(line.substr(eq + 1)));
      } catch (const std::exception&) {
        fail("bad tau value");
      }
      if (!(*out.tau > 0.0)) fail("tau must be positive");
      continue;
    }
    std::istringstream ls(line);
    std::string kind;
    ls >> kind;
    if (section == Bottom || section == Top) {
      WallHarmonic h;
      if (kind == "tangential") h.component = WallHarmonic::Tangential;
      else if (kind == "normal") h.component = WallHarmonic::Normal;
      else fail("expected tangential or normal, got " + kind);
      if (!(ls >> h.m_x >> h.m_t >> h.amplitude >> h.phase)) fail("expected m_x m_t amplitude phase");
      if (h.m_x < 0) fail("m_x must be nonnegative");
      if (!std::isfinite(h.amplitude) || !std::isfinite(h.phase)) fail("non-finite coefficient");
      out.boundary.walls[section == Bottom ? 0 : 1].push_back(h);
    } else if (section == Forcing) {
      ForcingHarmonic f;
      if (kind == "x") f.component = 0;
      else if (kind == "y") f.component = 1;
      else fail("expected x or y, got " + kind);
      if (!(ls >> f.m_x >> f.m_t >> f.amplitude >> f.phase >> f.p_y))
        fail("expected m_x m_t amplitude phase p_y");
      if (f.m_x < 0 || f.p_y < 1) fail("m_x must be >= 0 and p_y >= 1");
      if (!std::isfinite(f.amplitude) || !std::isfinite(f.phase)) fail("non-finite coefficient");
      out.forcing.push_back(f);
    } else {
      fail("data line outside a section");
    }
    std::string extra;
    if (ls >> extra) fail("trailing token " + extra);
  }
  if (out.tau) out.boundary.tau = *out.tau;
  return out;
}

HarmonicFile read_harmonic_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorKind::Io, "cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_harmonic_text(ss.str(), path);
}

}  // namespace mhdp
