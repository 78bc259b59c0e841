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

// Reads Python source on stdin. Prints the unparsed module, or
// "SyntaxError: <message>" and exits 1.

#include <iostream>
#include <iterator>
#include <string>

#include "plum/py/parser.h"
#include "plum/py/unparser.h"

int main() {
  std::string source((std::istreambuf_iterator<char>(std::cin)),
                     std::istreambuf_iterator<char>());
  try {
    plum::py::Module module = plum::py::Parse(source);
    std::cout << plum::py::Unparse(module);
  } catch (const plum::py::SyntaxError& e) {
    std::cout << "SyntaxError: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
