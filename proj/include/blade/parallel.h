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

#ifndef BLADE_PARALLEL_H_
#define BLADE_PARALLEL_H_

namespace blade {

// Thread count for OpenMP regions. Reads BLADE_THREADS on every call
// (0 or unset = OpenMP default); SetNumThreads overrides the environment.
int NumThreads();
void SetNumThreads(int n);

}  // namespace blade

#endif  // BLADE_PARALLEL_H_
