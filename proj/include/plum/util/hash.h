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

#ifndef PLUM_UTIL_HASH_H_
#define PLUM_UTIL_HASH_H_

#include <cstdint>
#include <string>
#include <string_view>

namespace plum {

uint32_t Fnv1a32(std::string_view data);
uint64_t Fnv1a64(std::string_view data);

// Eight lowercase hex digits.
std::string Hex8(uint32_t value);

}  // namespace plum

#endif  // PLUM_UTIL_HASH_H_
