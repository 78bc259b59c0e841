# Copyright 2026 The Plum Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#     http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Compares the C++ parser against the host interpreter's ast module.

For every input file: both sides must agree on accept/reject, and for
accepted input ast.dump of the C++ unparse must equal ast.dump of the
original.
"""
import ast
import glob
import os
import subprocess
import sys
import tempfile


def check(tool, path):
    with open(path, "rb") as f:
        data = f.read()
    try:
        src = data.decode("utf-8")
    except UnicodeDecodeError:
        return None
    try:
        expected = ast.dump(ast.parse(src))
    except (SyntaxError, ValueError):
        expected = None
    proc = subprocess.run([tool], input=data, capture_output=True)
    out = proc.stdout.decode("utf-8", "replace")
    if expected is None:
        if proc.returncode == 0:
            return "accepted invalid source"
        return None
    if proc.returncode != 0:
        return "rejected valid source: " + out.strip()
    try:
        got = ast.dump(ast.parse(out))
    except SyntaxError as e:
        return "unparse output does not parse: %s" % e
    if got != expected:
        return "round trip changed the tree"
    return None


def snippet_paths(tmp):
    sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))
    from syntax_snippets import SNIPPETS
    paths = []
    for i, snippet in enumerate(SNIPPETS):
        path = os.path.join(tmp, "snippet_%03d.py" % i)
        with open(path, "w") as f:
            f.write(snippet)
        paths.append(path)
    return paths


def expand(args):
    paths = []
    for arg in args:
        if os.path.isdir(arg):
            paths.extend(sorted(glob.glob(os.path.join(arg, "*.py"))))
        else:
            paths.append(arg)
    return paths


def main():
    tool = sys.argv[1]
    with tempfile.TemporaryDirectory() as tmp:
        paths = expand(a for a in sys.argv[2:] if a != "--snippets")
        if "--snippets" in sys.argv[2:]:
            paths.extend(snippet_paths(tmp))
        failures = 0
        for path in paths:
            problem = check(tool, path)
            if problem:
                failures += 1
                with open(path, errors="replace") as f:
                    print("%s: %s\n%s" % (path, problem, f.read()[:200]))
        print("%d files, %d failures" % (len(paths), failures))
    sys.exit(1 if failures else 0)


if __name__ == "__main__":
    main()
