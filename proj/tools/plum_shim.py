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

"""Test driver executed inside the sandbox.

Usage: plum_shim.py [--smoke] PROGRAM

Exit codes: 0 pass, 10 assertion failure, 11 runtime error, 12 load
failure, 120 internal fault. The last stderr line is always
PLUM:<STATUS>:<summary>.
"""
import builtins
import os
import signal
import sys

EXIT_CODES = {
    "PASS": 0,
    "TESTFAIL": 10,
    "RUNTIME": 11,
    "LOADFAIL": 12,
    "INTERNAL": 120,
}

PROXY_VARS = (
    "http_proxy", "https_proxy", "ftp_proxy", "all_proxy", "no_proxy",
    "HTTP_PROXY", "HTTPS_PROXY", "FTP_PROXY", "ALL_PROXY", "NO_PROXY",
)


def summarize(exc):
    name = type(exc).__name__
    try:
        text = str(exc)
    except BaseException:
        text = ""
    line = name + (": " + text if text else "")
    line = line.replace("\r", " ").replace("\n", " ")
    return line[:200]


def finish(status, summary):
    try:
        sys.stdout.flush()
    except BaseException:
        pass
    try:
        sys.stderr.flush()
    except BaseException:
        pass
    marker = "\nPLUM:%s:%s\n" % (status, summary)
    try:
        os.write(2, marker.encode("utf-8", "replace"))
    except BaseException:
        pass
    os._exit(EXIT_CODES[status])


def classify(exc, smoke):
    if isinstance(exc, MemoryError):
        return "RUNTIME", "MemoryError"
    if smoke or isinstance(exc, ImportError):
        return "LOADFAIL", summarize(exc)
    if isinstance(exc, AssertionError):
        return "TESTFAIL", summarize(exc)
    return "RUNTIME", summarize(exc)


def run(argv):
    args = argv[1:]
    smoke = False
    if args and args[0] == "--smoke":
        smoke = True
        args = args[1:]
    if len(args) != 1:
        finish("INTERNAL", "usage: plum_shim.py [--smoke] PROGRAM")
    path = os.path.abspath(args[0])
    if hasattr(signal, "SIGXFSZ"):
        signal.signal(signal.SIGXFSZ, signal.SIG_DFL)
    if os.environ.get("PLUM_NO_NETWORK"):
        for var in PROXY_VARS:
            os.environ.pop(var, None)
    try:
        with open(path, encoding="utf-8") as f:
            source = f.read()
    except (OSError, UnicodeDecodeError) as exc:
        finish("INTERNAL", summarize(exc))
    try:
        code = compile(source, path, "exec")
    except (SyntaxError, ValueError) as exc:
        finish("LOADFAIL", summarize(exc))
    namespace = {"__name__": "__main__", "__file__": path,
                 "__builtins__": builtins}
    sys.argv = [path]
    sys.path.insert(0, os.path.dirname(path))
    try:
        exec(code, namespace)
    except SystemExit as exc:
        if exc.code is None or exc.code == 0:
            finish("PASS", "SystemExit(0)")
        finish("LOADFAIL" if smoke else "RUNTIME", summarize(exc))
    except BaseException as exc:
        status, summary = classify(exc, smoke)
        finish(status, summary)
    finish("PASS", "ok")


def main():
    try:
        run(sys.argv)
    except BaseException as exc:
        finish("INTERNAL", summarize(exc))


if __name__ == "__main__":
    main()
