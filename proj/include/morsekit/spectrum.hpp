#pragma once
#include "morsekit/potential.hpp"
#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

namespace morsekit {

enum class Method { pps, nhd, fdm, diag };

constexpr std::string_view to_string(Method m) {
  switch (m) {
  case Method::pps: return "pps";
  case Method::nhd: return "nhd";
  case Method::fdm: return "fdm";
  case Method::diag: return "diag";
  }
  return "?";
}

struct Level {
  int index = 0;
  double energy = 0.0;
  //! Method-specific: Laguerre gamma (nhd), fit residual (pps), grid step (fdm),
  //! mu_n (diag).
  double diagnostic = 0.0;
  //! Estimated truncation error where the method provides one, NaN otherwise.
  double uncertainty = std::numeric_limits<double>::quiet_NaN();
  int support = 0; // pps: number of scan rows backing the fit
  bool near_threshold = false;
};

//! Bound-state energies E_0 < E_1 < ... < 0 with method metadata.
struct Spectrum {
  Method method = Method::nhd;
  PotentialParams params;
  std::string diagnostic_name;
  std::vector<Level> levels;

  std::size_t size() const noexcept { return levels.size(); }
  bool empty() const noexcept { return levels.empty(); }

  std::vector<double> energies() const {
    std::vector<double> e;
    e.reserve(levels.size());
    for (const auto &l : levels)
      e.push_back(l.energy);
    return e;
  }
};

} // namespace morsekit
