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

#ifndef PLUM_PY_PARSER_H_
#define PLUM_PY_PARSER_H_

#include <string_view>

#include "plum/py/ast.h"
#include "plum/py/tokenizer.h"

namespace plum::py {

// Parses a module. Accepts the Python 3.10 grammar, including `match`
// statements and parenthesized context managers, with the same
// accept/reject boundary as `ast.parse` (checks performed later by the
// bytecode compiler, such as `return` outside a function, are not made).
// Throws SyntaxError.
Module Parse(std::string_view source);

// Parses a single expression, as used inside f-string replacement fields.
ExprPtr ParseExpression(std::string_view source);

}  // namespace plum::py

#endif  // PLUM_PY_PARSER_H_
