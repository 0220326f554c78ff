// dive/metrics.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "dive/csv_mixing.hpp"
#include "dive/simgen.hpp"
#include "dive/types.hpp"

namespace dive {

// Aggregates stay finite when a run hits exact extraction.
inline constexpr double kIsrFloorDb = -120.0;

// Interference-to-signal ratio of w against the true mixing of dataset k, in
// dB (lower is better).  With the per-segment gains g_t = A_{k,t}^H w, the
// background leaks with unit power per channel while the source of interest
// enters with the block-averaged profile power times the coupling scale:
//
//   ISR = 10 log10( <sum_{i>=2} |g_t(i)|^2>_t
//                   / <|g_t(1)|^2 * soi_scale_k * <sigma^2(t, l)>_l>_t ).
//
// Zero gain on the source of interest returns +inf; ratios at or below 1e-12
// clamp to the -120 dB floor so perfect extraction stays representable.
inline double isr_db(const VecC& w, const GroundTruth& gt, int k) {
  if (k < 0 || k >= static_cast<int>(gt.params.size()))
    throw ShapeError("isr_db: dataset index out of range");
  const auto& segs = gt.params[k];
  if (w.size() != segs[0].dim()) throw ShapeError("isr_db: dimension mismatch");

  double num = 0.0;
  double den = 0.0;
  const int T = static_cast<int>(segs.size());
  for (int t = 0; t < T; ++t) {
    const MatC A = build_mixing(segs[t]);
    const VecC g = A.adjoint() * w;
    num += g.tail(g.size() - 1).squaredNorm() / T;
    den += std::norm(g(0)) * gt.soi_scale(k) * gt.variances.row(t).mean() / T;
  }
  if (den == 0.0) return std::numeric_limits<double>::infinity();
  const double ratio = num / den;
  if (ratio <= 1e-12) return kIsrFloorDb;
  return 10.0 * std::log10(ratio);
}

// Two-sided trimmed mean: drops the ceil(fraction * n) largest and smallest
// values, capped so at least one value always survives, then averages.
inline double trimmed_mean(std::vector<double> values, double fraction = 0.01) {
  if (values.empty()) throw InvalidParamsError("trimmed_mean: no values");
  if (!(fraction >= 0.0))
    throw InvalidParamsError("trimmed_mean: fraction must be >= 0");
  const auto n = static_cast<Eigen::Index>(values.size());
  const auto m = std::min(
      static_cast<Eigen::Index>(std::ceil(fraction * static_cast<double>(n))),
      (n - 1) / 2);
  std::sort(values.begin(), values.end());
  double sum = 0.0;
  for (Eigen::Index i = m; i < n - m; ++i) sum += values[i];
  return sum / static_cast<double>(n - 2 * m);
}

inline double median(std::vector<double> values) {
  if (values.empty()) throw InvalidParamsError("median: no values");
  std::sort(values.begin(), values.end());
  const std::size_t n = values.size();
  if (n % 2 == 1) return values[n / 2];
  return 0.5 * (values[n / 2 - 1] + values[n / 2]);
}

}  // namespace dive
