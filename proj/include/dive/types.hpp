// dive/types.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace dive {

using cd = std::complex<double>;
using MatC = Eigen::MatrixXcd;
using VecC = Eigen::VectorXcd;
using RowVecC = Eigen::RowVectorXcd;
using MatR = Eigen::MatrixXd;
using VecR = Eigen::VectorXd;
using RowVecR = Eigen::RowVectorXd;

// Inconsistent dimensions, lengths that do not divide evenly, etc.
struct ShapeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid or inconsistent model parameters (gamma = 0, violated
// distortionless constraint, ...).
struct InvalidParamsError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A matrix that must be inverted is singular or numerically unusable.
struct SingularMatrixError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A sample statistic degenerated (zero variance, vanishing normalization).
struct DegenerateStatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed experiment configuration.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dive
