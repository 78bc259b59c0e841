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

#ifndef PLUM_PY_UNPARSER_H_
#define PLUM_PY_UNPARSER_H_

#include <string>

#include "plum/py/ast.h"

namespace plum::py {

// Renders a tree back to source with four-space indentation. Parentheses
// are inserted from operator precedence, so `Parse(Unparse(m))` dumps the
// same as `m`. Comments and original formatting are not preserved; literal
// spellings are. The output ends with a newline unless the module is empty.
std::string Unparse(const Module& module);
std::string Unparse(const Expr& expr);

}  // namespace plum::py

#endif  // PLUM_PY_UNPARSER_H_
