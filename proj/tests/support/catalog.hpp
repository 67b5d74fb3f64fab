#pragma once

#include <string>
#include <vector>

#include "tsfloquet/shifts.hpp"

namespace tsfloquet::testing {

/// A builtin shift system paired with a window it is periodic on.
struct CatalogEntry {
  std::string name;
  ShiftSystem sys;
  TimeScaleWindow ts;
};

inline std::vector<CatalogEntry> builtin_catalog() {
  std::vector<CatalogEntry> out;
  out.push_back({"additive_integer", ShiftSystem::additive(3), TimeScaleWindow::integer(-40, 200)});
  out.push_back({"additive_real", ShiftSystem::additive(2.5), TimeScaleWindow::real(-10, 60)});
  out.push_back({"multiplicative_qscale", ShiftSystem::multiplicative(2),
                 TimeScaleWindow::q_scale(2, std::pow(2.0, -12), std::pow(2.0, 30))});
  out.push_back({"multiplicative_union", ShiftSystem::multiplicative(3),
                 TimeScaleWindow::geometric_union(3, 2, 1.0 / 243, 3 * 243)});
  out.push_back({"multiplicative_real", ShiftSystem::multiplicative(4),
                 TimeScaleWindow::real(1, 4096)});
  out.push_back({"sqrt_naturals", ShiftSystem::sqrt_shift(2), TimeScaleWindow::sqrt_naturals(0, 60)});
  // The signed-squares maps are increasing only on the nonnegative half.
  out.push_back({"signed_squares", ShiftSystem::signed_squares(1),
                 TimeScaleWindow::signed_squares(0, 3600)});
  // Near 0 and 1 the logit round trip loses digits, so the window stays moderate.
  out.push_back({"logistic", ShiftSystem::logistic(2.0 / 3.0), TimeScaleWindow::logistic(2, -16, 16)});
  return out;
}

}  // namespace tsfloquet::testing
