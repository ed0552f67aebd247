#pragma once

#include <algorithm>
#include <cmath>
#include <functional>
#include <span>
#include <vector>

namespace scsl::testing {

inline constexpr double kFiniteDifferenceStep = 1e-5;
// Keeps near-zero gradient components from inflating the relative error.
inline constexpr double kRelativeErrorFloor = 1e-6;

// Largest |analytic - numeric| / max(|analytic|, |numeric|, floor) over all
// coordinates, with central differences of step h.
inline double max_relative_error(const std::function<double(std::span<const double>)>& loss,
                                 std::vector<double> params, std::span<const double> analytic,
                                 double h = kFiniteDifferenceStep) {
  double worst = 0.0;
  for (std::size_t i = 0; i < params.size(); ++i) {
    const double saved = params[i];
    params[i] = saved + h;
    const double up = loss(params);
    params[i] = saved - h;
    const double down = loss(params);
    params[i] = saved;
    const double numeric = (up - down) / (2.0 * h);
    const double denom = std::max({std::abs(analytic[i]), std::abs(numeric), kRelativeErrorFloor});
    worst = std::max(worst, std::abs(analytic[i] - numeric) / denom);
  }
  return worst;
}

}  // namespace scsl::testing
