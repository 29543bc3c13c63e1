#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "vinesim/common.hpp"
#include "vinesim/spam.hpp"

namespace vinesim {

/// An actuated section: n_units sPAM cells of unit length l_0 bonded to the
/// vine starting at arc_start, on one side. Straight (unactuated) stretches
/// are the gaps between sections.
struct ActuatorSection {
  double arc_start = 0;  // [m] arc-length position along the vine
  int n_units = 0;
  double l_0 = 0;    // [m] actuator unit length
  double P_act = 0;  // [Pa]
  int side = 1;      // +1 bends toward +theta, -1 toward -theta

  double arc_length() const { return n_units * l_0; }
  double arc_end() const { return arc_start + arc_length(); }
};

struct ActuatorDesign {
  std::vector<ActuatorSection> sections;  // ordered by arc_start, non-overlapping

  void validate() const {
    for (size_t i = 0; i < sections.size(); ++i) {
      const auto& s = sections[i];
      if (s.n_units <= 0 || s.l_0 <= 0 || s.P_act < 0 || (s.side != 1 && s.side != -1))
        throw DomainError("design: malformed section");
      if (i > 0 && s.arc_start < sections[i - 1].arc_end() - 1e-12)
        throw DomainError("design: sections overlap or are out of order");
    }
  }

  /// Section covering the given arc position, or nullptr for straight vine.
  const ActuatorSection* section_at(double arc) const {
    for (auto& s : sections) {
      if (arc >= s.arc_start && arc < s.arc_end()) return &s;
      if (s.arc_start > arc) break;
    }
    return nullptr;
  }

  int section_count() const { return int(sections.size()); }
};

/// Fabrication constraints: pressures come from a discrete set, unit lengths
/// from a 1 mm grid inside [l_min, l_max].
struct DesignCatalog {
  std::vector<double> pressures;  // [Pa], ascending
  double length_resolution = 1e-3;
  double l_min = 0.020;
  double l_max = 0.060;

  static DesignCatalog standard() {
    DesignCatalog c;
    for (int k = 1; k <= 5; ++k) c.pressures.push_back(psi_to_pa(0.5 * k));
    return c;
  }

  void validate() const {
    if (pressures.empty()) throw DomainError("catalog: empty pressure set");
    if (!std::is_sorted(pressures.begin(), pressures.end()))
      throw DomainError("catalog: pressures must be ascending");
    if (!(l_min >= length_resolution && l_max >= l_min))
      throw DomainError("catalog: bad length range");
  }

  int length_steps() const {
    return int(std::round((l_max - l_min) / length_resolution)) + 1;
  }
  double length_at(int i) const { return l_min + i * length_resolution; }

  /// nearest catalog length (1 mm grid)
  double snap_length(double l) const {
    double snapped = std::round(l / length_resolution) * length_resolution;
    return clamp(snapped, l_min, l_max);
  }
};

// ---------------------------------------------------------------------------
// design file format (lengths in mm, pressures in psi)

inline std::string print_design(const ActuatorDesign& d) {
  std::ostringstream os;
  os << "vinesim-design v1\n";
  os << "units mm psi\n";
  os << "# section: start_mm n_units l0_mm P_psi side\n";
  for (auto& s : d.sections) {
    os << "section " << detail::fmt_g17(m_to_mm(s.arc_start)) << " " << s.n_units << " "
       << detail::fmt_g17(m_to_mm(s.l_0)) << " " << detail::fmt_g17(pa_to_psi(s.P_act))
       << " " << s.side << "\n";
  }
  return os.str();
}

inline ActuatorDesign parse_design(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int lineno = 0;
  ActuatorDesign d;
  bool have_header = false;
  auto fail = [&](const std::string& what) {
    throw ParseError("design parse error at line " + std::to_string(lineno) + ": " + what);
  };
  while (std::getline(is, line)) {
    ++lineno;
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (!have_header) {
      if (tag != "vinesim-design") fail("expected 'vinesim-design v1' header");
      std::string ver;
      ls >> ver;
      if (ver != "v1") fail("unsupported design version '" + ver + "'");
      have_header = true;
      continue;
    }
    if (tag == "units") {
      std::string lu, pu;
      ls >> lu >> pu;
      if (lu != "mm" || pu != "psi") fail("design files use units 'mm psi'");
    } else if (tag == "section") {
      double start_mm, l0_mm, p_psi;
      int n_units, side;
      if (!(ls >> start_mm >> n_units >> l0_mm >> p_psi >> side))
        fail("section needs start_mm n_units l0_mm P_psi side");
      d.sections.push_back(ActuatorSection{mm_to_m(start_mm), n_units, mm_to_m(l0_mm),
                                           psi_to_pa(p_psi), side});
    } else {
      fail("unknown tag '" + tag + "'");
    }
  }
  if (!have_header) throw ParseError("design parse error at line 1: empty design file");
  d.validate();
  return d;
}

inline ActuatorDesign load_design(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw ParseError("cannot open design file: " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_design(ss.str());
}

inline void save_design(const ActuatorDesign& d, const std::string& path) {
  std::ofstream f(path);
  if (!f) throw ParseError("cannot write design file: " + path);
  f << print_design(d);
}

}  // namespace vinesim
