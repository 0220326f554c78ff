// tools/acceptance_main.cpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#include <cstdlib>
#include <iostream>

#include "acceptance.hpp"

int main(int argc, char** argv) {
  int threads = 0;
  if (argc > 1) threads = std::atoi(argv[1]);
  return dive::acceptance::run_all(std::cout, threads) == 0 ? EXIT_SUCCESS
                                                            : EXIT_FAILURE;
}
