// Copyright 2026 The BLADE Authors. All Rights Reserved.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "blade/parallel.h"

#include <omp.h>

#include <atomic>
#include <cstdlib>

namespace blade {
namespace {

std::atomic<int> g_override{-1};

}  // namespace

int NumThreads() {
  int n = g_override.load();
  if (n < 0) {
    n = 0;
    if (const char* env = std::getenv("BLADE_THREADS")) n = std::atoi(env);
  }
  if (n <= 0) n = omp_get_max_threads();
  return n < 1 ? 1 : n;
}

void SetNumThreads(int n) { g_override.store(n); }

}  // namespace blade
