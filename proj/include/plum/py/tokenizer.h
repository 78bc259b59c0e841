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

#ifndef PLUM_PY_TOKENIZER_H_
#define PLUM_PY_TOKENIZER_H_

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "plum/py/ast.h"

namespace plum::py {

class SyntaxError : public std::runtime_error {
 public:
  SyntaxError(const std::string& message, SourceLoc loc);

  const std::string& message() const { return message_; }
  SourceLoc loc() const { return loc_; }

 private:
  std::string message_;
  SourceLoc loc_;
};

enum class TokenKind {
  kName,
  kNumber,
  kString,
  kOp,
  kNewline,
  kIndent,
  kDedent,
  kEndMarker,
};

struct Token {
  TokenKind kind;
  std::string text;
  SourceLoc loc;

  bool IsOp(std::string_view op) const {
    return kind == TokenKind::kOp && text == op;
  }
  bool IsName(std::string_view name) const {
    return kind == TokenKind::kName && text == name;
  }
};

// Splits source into tokens, producing the NEWLINE/INDENT/DEDENT structure
// of the language. Comments, blank lines and explicit or implicit line
// joins are consumed here. Throws SyntaxError on malformed input
// (unterminated strings, inconsistent dedent, stray characters, unbalanced
// brackets).
std::vector<Token> Tokenize(std::string_view source);

bool IsKeyword(std::string_view word);

}  // namespace plum::py

#endif  // PLUM_PY_TOKENIZER_H_
