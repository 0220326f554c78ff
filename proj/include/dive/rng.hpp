// dive/rng.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <cmath>
#include <cstdint>
#include <initializer_list>
#include <random>

#include "dive/types.hpp"

namespace dive {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Derives independent, reproducible random streams from one master seed.
// Every consumer names its stream by a tag tuple (for data cells the tuple is
// (purpose, k, t, l)), so draws are independent of evaluation order and of
// how work is distributed over threads.
class StreamRng {
 public:
  explicit StreamRng(std::uint64_t seed) : seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::mt19937_64 stream(std::initializer_list<std::uint64_t> tags) const {
    std::uint64_t h = splitmix64(seed_ ^ 0x6a09e667f3bcc909ull);
    for (std::uint64_t t : tags) h = splitmix64(h ^ splitmix64(t));
    return std::mt19937_64(h);
  }

 private:
  std::uint64_t seed_;
};

// Stream purposes used by the simulation generator.
enum StreamTag : std::uint64_t {
  kTagSoi = 1,
  kTagBackground = 2,
  kTagMixing = 3,
  kTagDependence = 4,
  kTagInit = 5,
  kTagTrial = 6,
};

// One draw from CN(0, 1): E[|z|^2] = 1, E[z^2] = 0.
inline cd draw_cnormal(std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  const double re = n(g);
  const double im = n(g);
  return {re, im};
}

inline MatC cnormal_matrix(Eigen::Index rows, Eigen::Index cols,
                           std::mt19937_64& g) {
  std::normal_distribution<double> n(0.0, std::sqrt(0.5));
  MatC m(rows, cols);
  for (Eigen::Index c = 0; c < cols; ++c)
    for (Eigen::Index r = 0; r < rows; ++r) {
      const double re = n(g);
      const double im = n(g);
      m(r, c) = cd(re, im);
    }
  return m;
}

inline VecC cnormal_vector(Eigen::Index n, std::mt19937_64& g) {
  MatC m = cnormal_matrix(n, 1, g);
  return m.col(0);
}

}  // namespace dive
