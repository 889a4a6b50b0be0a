#pragma once

#include <algorithm>
#include <span>
#include <vector>

#include "f2m/core/error.hpp"
#include "f2m/geometry/pose_error.hpp"

namespace f2m {

namespace detail {

inline double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace detail

/// Component-wise median; even lengths average the two middle values.
inline PoseError median_errors(std::span<const PoseError> errors) {
  if (errors.empty()) throw Error(ErrorCode::DegenerateInput, "median of an empty error list");
  std::vector<double> m, d;
  for (const auto& e : errors) {
    m.push_back(e.meters);
    d.push_back(e.degrees);
  }
  return {detail::median_of(std::move(m)), detail::median_of(std::move(d))};
}

/// Percentage of errors within both thresholds (inclusive).
inline double accuracy_at(std::span<const PoseError> errors, double thresh_m, double thresh_deg) {
  if (errors.empty()) throw Error(ErrorCode::DegenerateInput, "accuracy of an empty error list");
  if (!(thresh_m > 0.0 && thresh_deg > 0.0)) throw Error(ErrorCode::InvalidInput, "thresholds must be positive");
  const auto hits = std::count_if(errors.begin(), errors.end(),
                                  [&](const PoseError& e) { return e.meters <= thresh_m && e.degrees <= thresh_deg; });
  return 100.0 * static_cast<double>(hits) / static_cast<double>(errors.size());
}

}  // namespace f2m
