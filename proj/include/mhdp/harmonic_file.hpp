#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace mhdp {

/// A cos(kappa_{m_x} x + 2 pi m_t t / tau + phase) on one wall.  The normal
/// component is the outward normal component beta . n.
struct WallHarmonic {
  enum Component { Tangential, Normal } component = Tangential;
  int m_x = 0;
  int m_t = 0;
  double amplitude = 0.0;
  double phase = 0.0;
};

/// tau-periodic boundary values on the walls y = 0 (index 0) and y = gap
/// (index 1).
struct BoundaryData {
  double tau = 1.0;
  std::array<std::vector<WallHarmonic>, 2> walls;

  bool zero() const;
  int max_m_t() const;
};

/// One forcing term: amplitude * sin(p_y pi y / gap) *
/// cos(kappa_{m_x} x + 2 pi m_t t / tau + phase) in the x or y component.
struct ForcingHarmonic {
  int component = 0;
  int m_x = 0;
  int m_t = 0;
  double amplitude = 0.0;
  double phase = 0.0;
  int p_y = 1;
};

struct HarmonicFile {
  std::optional<double> tau;
  BoundaryData boundary;
  std::vector<ForcingHarmonic> forcing;
};

/// Parses the harmonic-list text format:
///
///   tau = 2.0
///   [wall bottom]
///   tangential 0 1 0.5 0.0        # m_x m_t amplitude phase
///   [wall top]
///   normal 1 0 0.1 0.0
///   [forcing]
///   x 0 1 1.0 0.0 1               # m_x m_t amplitude phase p_y
HarmonicFile parse_harmonic_text(const std::string& text, const std::string& origin = "<text>");
HarmonicFile read_harmonic_file(const std::string& path);

}  // namespace mhdp
