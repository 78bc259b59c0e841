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
"""Runs every stage subcommand of the plum CLI over five fixture instructions.

usage: cli_check.py PLUM_BINARY FIXTURE_DIR
"""
import json
import os
import subprocess
import sys
import tempfile


def main():
    plum, fixtures = sys.argv[1], sys.argv[2]
    data = os.path.join(fixtures, "data")
    with tempfile.TemporaryDirectory(prefix="plum-cli-") as tmp:
        with open(os.path.join(data, "instructions.jsonl")) as f:
            corpus = f.readlines()[:5]
        with open(os.path.join(tmp, "corpus.jsonl"), "w") as f:
            f.writelines(corpus)
        config = {
            "corpus": {"path": "corpus.jsonl", "source_tag": "cli"},
            "testgen": {"backend": "stub", "stub_path": os.path.join(data, "testgen_stub.jsonl")},
            "sampler": {"backend": "stub", "stub_path": os.path.join(data, "policy_stub.jsonl"), "k": 7},
            "sandbox": {"interpreter_args": ["-S"], "time_limit_seconds": 2,
                        "parallelism": 8, "short_circuit": True},
            "preference": {"kto_balance_ratio": 1.0},
            "mutation": {"p": 0.5},
        }
        with open(os.path.join(tmp, "plum.json"), "w") as f:
            json.dump(config, f)

        def run(*args):
            proc = subprocess.run([plum, *args, "--config", "plum.json"], cwd=tmp,
                                  capture_output=True, text=True)
            if proc.returncode != 0:
                sys.exit("plum %s failed (%d):\n%s" % (args[0], proc.returncode, proc.stderr))

        def lines(name):
            with open(os.path.join(tmp, name)) as f:
                return [json.loads(l) for l in f if l.strip()]

        run("gen-tests", "--out", "tests.jsonl")
        run("filter-consistency", "--input", "tests.jsonl", "--out-dir", "cons")
        run("sample", "--tests", "cons/test_artifacts.jsonl", "--out", "cands.jsonl",
            "--prompts-out", "prompts.jsonl")
        run("grade", "--candidates", "cands.jsonl", "--tests", "cons/test_artifacts.jsonl",
            "--prompts", "prompts.jsonl", "--out", "groups.jsonl")
        run("build", "dpo", "--groups", "groups.jsonl", "--out", "dpo.jsonl")
        run("build", "kto", "--groups", "groups.jsonl", "--out", "kto.jsonl")
        run("mutate", "--input", "cands.jsonl", "--out", "mutants.jsonl")
        run("stats", "--artifacts", "cons/test_artifacts.jsonl", "--groups", "groups.jsonl",
            "--dpo", "dpo.jsonl", "--kto", "kto.jsonl", "--out-dir", "stats")

        tests = lines("tests.jsonl")
        kept = [t for t in lines("cons/test_artifacts.jsonl") if t.get("consistent")]
        groups = lines("groups.jsonl")
        dpo, kto = lines("dpo.jsonl"), lines("kto.jsonl")
        with open(os.path.join(tmp, "stats", "summary.json")) as f:
            summary = json.load(f)
        problems = []
        if len(groups) != 5:
            problems.append("expected 5 groups, got %d" % len(groups))
        if not kept or len(kept) >= len(tests):
            problems.append("consistency filter kept %d of %d" % (len(kept), len(tests)))
        desirable = sum(r["label"] == "desirable" for r in kto)
        if not dpo or desirable * 2 != len(kto):
            problems.append("dpo=%d kto=%d desirable=%d" % (len(dpo), len(kto), desirable))
        if summary["datasets"]["pairs"] != len(dpo):
            problems.append("summary pairs mismatch")
        for m in lines("mutants.jsonl"):
            if not m["applied_rules"]:
                problems.append("mutant without applied rules")
                break
        if problems:
            sys.exit("\n".join(problems))
        print("cli stages ok: %d tests, %d kept, %d pairs, %d kto" %
              (len(tests), len(kept), len(dpo), len(kto)))


if __name__ == "__main__":
    main()
