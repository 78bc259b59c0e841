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

#include "plum/py/tokenizer.h"

#include <algorithm>
#include <array>
#include <cctype>
#include <string>
#include <utility>

namespace plum::py {

SyntaxError::SyntaxError(const std::string& message, SourceLoc loc)
    : std::runtime_error("line " + std::to_string(loc.line) + ":" +
                         std::to_string(loc.col) + ": " + message),
      message_(message),
      loc_(loc) {}

namespace {

constexpr std::array<std::string_view, 35> kKeywords = {
    "False",  "None",   "True",    "and",      "as",       "assert", "async",
    "await",  "break",  "class",   "continue", "def",      "del",    "elif",
    "else",   "except", "finally", "for",      "from",     "global", "if",
    "import", "in",     "is",      "lambda",   "nonlocal", "not",    "or",
    "pass",   "raise",  "return",  "try",      "while",    "with",   "yield"};

// Longest operators first so a greedy scan picks `**=` over `**` over `*`.
constexpr std::array<std::string_view, 47> kOperators = {
    "**=", "//=", ">>=", "<<=", "...", "**", "//", ">>", "<<", "<=",
    ">=",  "==",  "!=",  "->",  "+=",  "-=", "*=", "/=", "%=", "&=",
    "|=",  "^=",  "@=",  ":=",  "+",   "-",  "*",  "/",  "%",  "&",
    "|",   "^",   "~",   "<",   ">",   "(",  ")",  "[",  "]",  "{",
    "}",   ",",   ":",   ".",   ";",   "@",  "="};

bool IsIdentStart(unsigned char c) {
  return std::isalpha(c) || c == '_' || c >= 0x80;
}

bool IsIdentChar(unsigned char c) {
  return std::isalnum(c) || c == '_' || c >= 0x80;
}

bool IsStringPrefix(std::string_view word) {
  std::string lower(word);
  std::transform(lower.begin(), lower.end(), lower.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return lower == "r" || lower == "u" || lower == "f" || lower == "b" ||
         lower == "br" || lower == "rb" || lower == "fr" || lower == "rf";
}

class Tokenizer {
 public:
  explicit Tokenizer(std::string_view source) : src_(Normalize(source)) {}

  std::vector<Token> Run() {
    if (src_.find('\0') != std::string::npos) {
      throw SyntaxError("source code cannot contain null bytes", {1, 0});
    }
    indents_.push_back({0, 0});
    bool at_line_start = true;
    while (pos_ < src_.size()) {
      if (at_line_start && brackets_.empty()) {
        if (!HandleIndentation()) continue;  // blank or comment-only line
        at_line_start = false;
      }
      char c = src_[pos_];
      if (c == '\n') {
        if (brackets_.empty() && line_has_tokens_) {
          Emit(TokenKind::kNewline, "\n", Here());
          line_has_tokens_ = false;
        }
        Advance();
        at_line_start = brackets_.empty();
        continue;
      }
      if (c == ' ' || c == '\t' || c == '\f') {
        Advance();
        continue;
      }
      if (c == '#') {
        while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
        continue;
      }
      if (c == '\\') {
        SourceLoc loc = Here();
        Advance();
        if (pos_ >= src_.size()) {
          throw SyntaxError("unexpected EOF while parsing", loc);
        }
        if (src_[pos_] != '\n') {
          throw SyntaxError(
              "unexpected character after line continuation character", loc);
        }
        Advance();
        if (pos_ >= src_.size()) {
          throw SyntaxError("unexpected EOF while parsing", loc);
        }
        continue;
      }
      ScanToken();
    }
    SourceLoc end = Here();
    if (!brackets_.empty()) {
      throw SyntaxError(std::string("'") + brackets_.back().first +
                            "' was never closed",
                        brackets_.back().second);
    }
    if (line_has_tokens_) Emit(TokenKind::kNewline, "", end);
    while (indents_.size() > 1) {
      indents_.pop_back();
      Emit(TokenKind::kDedent, "", end);
    }
    Emit(TokenKind::kEndMarker, "", end);
    return std::move(tokens_);
  }

 private:
  struct Indent {
    int col;
    int alt_col;  // column with tab size 1, for tab/space consistency
  };

  static std::string Normalize(std::string_view source) {
    std::string out;
    out.reserve(source.size() + 1);
    for (size_t i = 0; i < source.size(); ++i) {
      if (source[i] == '\r') {
        out.push_back('\n');
        if (i + 1 < source.size() && source[i + 1] == '\n') ++i;
      } else {
        out.push_back(source[i]);
      }
    }
    return out;
  }

  SourceLoc Here() const { return {line_, static_cast<int>(pos_ - line_start_)}; }

  void Advance() {
    if (src_[pos_] == '\n') {
      ++line_;
      line_start_ = pos_ + 1;
    }
    ++pos_;
  }

  void Emit(TokenKind kind, std::string text, SourceLoc loc) {
    tokens_.push_back(Token{kind, std::move(text), loc});
    if (kind != TokenKind::kNewline && kind != TokenKind::kIndent &&
        kind != TokenKind::kDedent) {
      line_has_tokens_ = true;
    }
  }

  // Returns false when the physical line is blank or holds only a comment;
  // such lines are consumed entirely and never affect indentation.
  bool HandleIndentation() {
    int col = 0;
    int alt_col = 0;
    size_t p = pos_;
    while (p < src_.size()) {
      char c = src_[p];
      if (c == ' ') {
        ++col;
        ++alt_col;
      } else if (c == '\t') {
        col = (col / 8 + 1) * 8;
        ++alt_col;
      } else if (c == '\f') {
        col = alt_col = 0;
      } else {
        break;
      }
      ++p;
    }
    if (p >= src_.size() || src_[p] == '\n' || src_[p] == '#' ||
        (src_[p] == '\\' && p + 1 < src_.size() && src_[p + 1] == '\n')) {
      if (p < src_.size() && src_[p] == '\\') {
        // A continuation on an otherwise empty line joins with the next
        // line; CPython treats the result as a normal logical line.
        while (pos_ < p) Advance();
        return true;
      }
      while (pos_ < src_.size() && src_[pos_] != '\n') Advance();
      if (pos_ < src_.size()) Advance();
      return false;
    }
    SourceLoc loc{line_, static_cast<int>(p - line_start_)};
    while (pos_ < p) Advance();
    const Indent& top = indents_.back();
    if (col == top.col) {
      if (alt_col != top.alt_col) {
        throw SyntaxError("inconsistent use of tabs and spaces in indentation",
                          loc);
      }
    } else if (col > top.col) {
      if (alt_col <= top.alt_col) {
        throw SyntaxError("inconsistent use of tabs and spaces in indentation",
                          loc);
      }
      indents_.push_back({col, alt_col});
      Emit(TokenKind::kIndent, "", loc);
    } else {
      while (indents_.size() > 1 && col < indents_.back().col) {
        indents_.pop_back();
        Emit(TokenKind::kDedent, "", loc);
      }
      if (col != indents_.back().col) {
        throw SyntaxError(
            "unindent does not match any outer indentation level", loc);
      }
      if (alt_col != indents_.back().alt_col) {
        throw SyntaxError("inconsistent use of tabs and spaces in indentation",
                          loc);
      }
    }
    return true;
  }

  void ScanToken() {
    SourceLoc loc = Here();
    unsigned char c = static_cast<unsigned char>(src_[pos_]);
    if (IsIdentStart(c)) {
      size_t start = pos_;
      while (pos_ < src_.size() &&
             IsIdentChar(static_cast<unsigned char>(src_[pos_]))) {
        Advance();
      }
      std::string_view word(src_.data() + start, pos_ - start);
      if (pos_ < src_.size() && (src_[pos_] == '\'' || src_[pos_] == '"') &&
          IsStringPrefix(word)) {
        ScanString(start, loc);
        return;
      }
      Emit(TokenKind::kName, std::string(word), loc);
      return;
    }
    if (std::isdigit(c) ||
        (c == '.' && pos_ + 1 < src_.size() &&
         std::isdigit(static_cast<unsigned char>(src_[pos_ + 1])))) {
      ScanNumber(loc);
      return;
    }
    if (c == '\'' || c == '"') {
      ScanString(pos_, loc);
      return;
    }
    for (std::string_view op : kOperators) {
      if (src_.compare(pos_, op.size(), op) == 0) {
        for (size_t i = 0; i < op.size(); ++i) Advance();
        TrackBracket(op, loc);
        Emit(TokenKind::kOp, std::string(op), loc);
        return;
      }
    }
    if (c == '!') {
      throw SyntaxError("invalid syntax", loc);
    }
    std::string shown = c < 0x80 && std::isprint(c)
                            ? std::string(1, static_cast<char>(c))
                            : "\\x" + std::to_string(c);
    throw SyntaxError("invalid character '" + shown + "'", loc);
  }

  void TrackBracket(std::string_view op, SourceLoc loc) {
    char c = op.size() == 1 ? op[0] : 0;
    if (c == '(' || c == '[' || c == '{') {
      brackets_.push_back({c, loc});
      return;
    }
    if (c == ')' || c == ']' || c == '}') {
      if (brackets_.empty()) {
        throw SyntaxError(std::string("unmatched '") + c + "'", loc);
      }
      char open = brackets_.back().first;
      char expected = open == '(' ? ')' : open == '[' ? ']' : '}';
      if (c != expected) {
        throw SyntaxError(std::string("closing parenthesis '") + c +
                              "' does not match opening parenthesis '" + open +
                              "'",
                          loc);
      }
      brackets_.pop_back();
    }
  }

  bool Peek(char c, size_t offset = 0) const {
    return pos_ + offset < src_.size() && src_[pos_ + offset] == c;
  }

  bool PeekDigit(size_t offset = 0) const {
    return pos_ + offset < src_.size() &&
           std::isdigit(static_cast<unsigned char>(src_[pos_ + offset]));
  }

  // digit (['_'] digit)*, with the digit class given by `is_digit`.
  template <typename Pred>
  void ScanDigits(Pred is_digit, SourceLoc loc, bool require_one) {
    bool any = false;
    while (pos_ < src_.size()) {
      unsigned char c = static_cast<unsigned char>(src_[pos_]);
      if (is_digit(c)) {
        Advance();
        any = true;
      } else if (c == '_' && any && pos_ + 1 < src_.size() &&
                 is_digit(static_cast<unsigned char>(src_[pos_ + 1]))) {
        Advance();
      } else {
        break;
      }
    }
    if (pos_ < src_.size() && src_[pos_] == '_') {
      throw SyntaxError("invalid decimal literal", loc);
    }
    if (require_one && !any) {
      throw SyntaxError("invalid decimal literal", loc);
    }
  }

  void ScanNumber(SourceLoc loc) {
    size_t start = pos_;
    auto dec = [](unsigned char c) { return std::isdigit(c) != 0; };
    if (Peek('0') && pos_ + 1 < src_.size() &&
        std::string_view("xXoObB").find(src_[pos_ + 1]) !=
            std::string_view::npos) {
      char base = static_cast<char>(std::tolower(src_[pos_ + 1]));
      Advance();
      Advance();
      if (Peek('_')) Advance();
      auto in_base = [base](unsigned char c) {
        if (base == 'x') return std::isxdigit(c) != 0;
        if (base == 'o') return c >= '0' && c <= '7';
        return c == '0' || c == '1';
      };
      const char* name = base == 'x'   ? "hexadecimal"
                         : base == 'o' ? "octal"
                                       : "binary";
      if (!(pos_ < src_.size() &&
            in_base(static_cast<unsigned char>(src_[pos_])))) {
        throw SyntaxError(std::string("invalid ") + name + " literal", loc);
      }
      ScanDigits(in_base, loc, true);
      if (PeekDigit()) {
        throw SyntaxError(std::string("invalid digit '") + src_[pos_] +
                              "' in " + name + " literal",
                          loc);
      }
      FinishNumber(start, loc);
      return;
    }
    bool is_float = false;
    bool leading_zero_int = false;
    if (!Peek('.')) {
      ScanDigits(dec, loc, true);
      std::string_view digits(src_.data() + start, pos_ - start);
      leading_zero_int =
          digits.size() > 1 && digits[0] == '0' &&
          digits.find_first_not_of("0_") != std::string_view::npos;
    }
    if (Peek('.')) {
      is_float = true;
      Advance();
      if (PeekDigit()) ScanDigits(dec, loc, true);
    }
    if (Peek('e') || Peek('E')) {
      size_t save = pos_;
      Advance();
      if (Peek('+') || Peek('-')) Advance();
      if (!PeekDigit()) {
        pos_ = save;
        throw SyntaxError("invalid decimal literal", loc);
      }
      ScanDigits(dec, loc, true);
      is_float = true;
    }
    bool imaginary = false;
    if (Peek('j') || Peek('J')) {
      Advance();
      imaginary = true;
    }
    if (leading_zero_int && !is_float && !imaginary) {
      throw SyntaxError(
          "leading zeros in decimal integer literals are not permitted; use "
          "an 0o prefix for octal integers",
          loc);
    }
    FinishNumber(start, loc);
  }

  void FinishNumber(size_t start, SourceLoc loc) {
    if (pos_ < src_.size() &&
        IsIdentStart(static_cast<unsigned char>(src_[pos_]))) {
      // A keyword may directly follow a literal (`1if x else y`).
      static constexpr std::array<std::string_view, 8> kAllowed = {
          "and", "else", "for", "if", "in", "is", "not", "or"};
      bool ok = false;
      for (std::string_view kw : kAllowed) {
        if (src_.compare(pos_, kw.size(), kw) == 0) ok = true;
      }
      if (!ok) throw SyntaxError("invalid decimal literal", loc);
    }
    Emit(TokenKind::kNumber, src_.substr(start, pos_ - start), loc);
  }

  void ScanString(size_t start, SourceLoc loc) {
    std::string prefix = src_.substr(start, pos_ - start);
    bool is_bytes = prefix.find_first_of("bB") != std::string::npos;
    char quote = src_[pos_];
    bool triple = Peek(quote, 1) && Peek(quote, 2);
    size_t quote_len = triple ? 3 : 1;
    for (size_t i = 0; i < quote_len; ++i) Advance();
    while (true) {
      if (pos_ >= src_.size()) {
        throw SyntaxError(triple ? "unterminated triple-quoted string literal"
                                 : "unterminated string literal",
                          loc);
      }
      char c = src_[pos_];
      if (c == '\\') {
        Advance();
        if (pos_ < src_.size()) Advance();
        continue;
      }
      if (c == '\n' && !triple) {
        throw SyntaxError("unterminated string literal", loc);
      }
      if (c == quote) {
        if (!triple) {
          Advance();
          break;
        }
        if (Peek(quote, 1) && Peek(quote, 2)) {
          Advance();
          Advance();
          Advance();
          break;
        }
      }
      if (is_bytes && static_cast<unsigned char>(c) >= 0x80) {
        throw SyntaxError("bytes can only contain ASCII literal characters",
                          loc);
      }
      Advance();
    }
    Emit(TokenKind::kString, src_.substr(start, pos_ - start), loc);
  }

  std::string src_;
  size_t pos_ = 0;
  int line_ = 1;
  size_t line_start_ = 0;
  bool line_has_tokens_ = false;
  std::vector<Indent> indents_;
  std::vector<std::pair<char, SourceLoc>> brackets_;
  std::vector<Token> tokens_;
};

}  // namespace

bool IsKeyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

std::vector<Token> Tokenize(std::string_view source) {
  return Tokenizer(source).Run();
}

}  // namespace plum::py
