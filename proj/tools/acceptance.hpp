// tools/acceptance.hpp
//
// Copyright 2026  dive authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0

#pragma once

#include <ostream>

namespace dive::acceptance {

// Runs every release gate and prints one PASS/FAIL line per check with the
// measured quantities.  Returns the number of failed checks (0 = release
// ready).  All tolerances are pinned in the implementation.
int run_all(std::ostream& out, int threads = 0);

}  // namespace dive::acceptance
