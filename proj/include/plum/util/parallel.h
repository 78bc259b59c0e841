// Copyright 2026 The Plum Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PLUM_UTIL_PARALLEL_H_
#define PLUM_UTIL_PARALLEL_H_

#include <cstddef>
#include <functional>

namespace plum {

// Runs fn(0) .. fn(n - 1) on up to `parallelism` threads. Items are claimed
// in index order. The first exception thrown by any item is rethrown after
// all workers stop; remaining unclaimed items are abandoned.
void ParallelFor(size_t n, int parallelism,
                 const std::function<void(size_t)>& fn);

}  // namespace plum

#endif  // PLUM_UTIL_PARALLEL_H_
