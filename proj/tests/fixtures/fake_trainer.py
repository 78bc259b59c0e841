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

"""Stand-in trainer hook for tests.

Records each invocation next to the config and bumps
sampler.policy_identifier to "policy-r<round>".
"""

import argparse
import json
import os
import sys


def count_lines(path):
    with open(path) as f:
        return sum(1 for line in f if line.strip())


def main():
    parser = argparse.ArgumentParser()
    parser.add_argument("--round", type=int, required=True)
    parser.add_argument("--dpo", required=True)
    parser.add_argument("--kto", required=True)
    parser.add_argument("--policy-id", required=True)
    parser.add_argument("--config", required=True)
    args = parser.parse_args()

    env_ok = (os.environ.get("PLUM_ROUND") == str(args.round)
              and os.environ.get("PLUM_DPO_PATH") == args.dpo
              and os.environ.get("PLUM_KTO_PATH") == args.kto
              and os.environ.get("PLUM_POLICY_ID") == args.policy_id
              and os.environ.get("PLUM_CONFIG") == args.config)
    record = {"round": args.round, "policy_id": args.policy_id, "env_ok": env_ok,
              "dpo_records": count_lines(args.dpo), "kto_records": count_lines(args.kto)}
    calls = os.path.join(os.path.dirname(args.config), "hook_calls.jsonl")
    with open(calls, "a") as f:
        f.write(json.dumps(record) + "\n")

    with open(args.config) as f:
        config = json.load(f)
    config.setdefault("sampler", {})["policy_identifier"] = "policy-r%d" % args.round
    tmp = args.config + ".tmp"
    with open(tmp, "w") as f:
        json.dump(config, f, indent=2)
    os.replace(tmp, args.config)
    print("trained round %d from %s" % (args.round, args.policy_id))
    return 0


if __name__ == "__main__":
    sys.exit(main())
