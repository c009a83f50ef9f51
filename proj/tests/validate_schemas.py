# Copyright 2026 The fairbound Authors
#
# Licensed under the Apache License, Version 2.0 (the "License");
# you may not use this file except in compliance with the License.
# You may obtain a copy of the License at
#
#      http://www.apache.org/licenses/LICENSE-2.0
#
# Unless required by applicable law or agreed to in writing, software
# distributed under the License is distributed on an "AS IS" BASIS,
# WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
# See the License for the specific language governing permissions and
# limitations under the License.

"""Runs each CLI command once and checks its JSON outputs against docs/schemas."""

import argparse
import json
import pathlib
import shutil
import subprocess
import sys

import jsonschema


def write(path, text):
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_text(text)
    return str(path)


def run(cli, *args):
    proc = subprocess.run([cli, *args], capture_output=True, text=True)
    if proc.returncode != 0:
        sys.stderr.write(proc.stderr)
        raise SystemExit(f"command failed ({proc.returncode}): {' '.join(args)}")


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("--cli", required=True)
    ap.add_argument("--schemas", required=True)
    ap.add_argument("--data", required=True)
    ap.add_argument("--work", required=True)
    a = ap.parse_args()

    schemas = pathlib.Path(a.schemas)
    data = pathlib.Path(a.data)
    work = pathlib.Path(a.work)
    shutil.rmtree(work, ignore_errors=True)
    work.mkdir(parents=True)

    internal = write(work / "in" / "i.csv",
                     "s,o,prob\n0,0,0.35\n0,1,0.15\n1,0,0.15\n1,1,0.35\n")
    external = write(work / "in" / "e.csv",
                     "o,e,prob\n0,0,0.25\n0,1,0.25\n1,0,0.25\n1,1,0.25\n")
    clf = write(work / "in" / "c.csv",
                "s,o,p_yes\n0,0,0\n0,1,1\n1,0,1\n1,1,0\n")
    d1 = write(work / "in" / "d1.csv", "a,b\n0,x\n1,x\n0,y\n1,y\n1,x\n")
    d2 = write(work / "in" / "d2.csv", "e,b\n0,x\n1,y\n0,y\n1,x\n0,x\n")
    part = write(work / "in" / "p.json",
                 '{"internal":["a"],"external":["e"],"common":["b"]}')

    runs = {
        "bounds": ["bounds", "--internal", internal, "--external", external,
                   "--classifier", clf, "--di-cap", "1000", "--resolution", "20"],
        "simulate": ["simulate", "--ground-truths", "10", "--resolution", "10",
                     "--seed", "1"],
        "latent": ["estimate", "--d1", d1, "--d2", d2, "--partition", part,
                   "--method", "latent", "--K", "2", "--restarts", "2"],
        "marginal": ["estimate", "--d1", d1, "--d2", d2, "--partition", part,
                     "--method", "marginal"],
        "feasible": ["experiment", "--recipe", str(data / "recipes" / "german.json"),
                     "--split", str(data / "splits" / "german.json"),
                     "--method", "feasible", "--resolution", "20"],
        "exp_marginal": ["experiment", "--recipe", str(data / "recipes" / "german.json"),
                         "--split", str(data / "splits" / "german.json"),
                         "--method", "marginal", "--bootstrap", "20"],
    }
    checks = {
        "bounds": [("summary.json", "bounds_summary")],
        "simulate": [("aggregate.json", "aggregate")],
        "latent": [("estimate.json", "estimate"), ("model.json", "model")],
        "marginal": [("estimate.json", "estimate")],
        "feasible": [("summary.json", "experiment_summary")],
        "exp_marginal": [("report.json", "experiment_report")],
    }

    failures = 0
    for name, args in runs.items():
        out = work / name
        flag = "--out" if args[0] in ("bounds", "estimate") else "--out-dir"
        run(a.cli, *args, flag, str(out))
        for fname, sname in checks[name] + [("manifest.json", "manifest")]:
            schema = json.loads((schemas / f"{sname}.schema.json").read_text())
            doc = json.loads((out / fname).read_text())
            validator = jsonschema.Draft202012Validator(
                schema, format_checker=jsonschema.FormatChecker())
            errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.path))
            status = "ok" if not errors else "INVALID"
            print(f"{name}/{fname} against {sname}: {status}")
            for e in errors[:5]:
                print(f"  {list(e.path)}: {e.message}")
            failures += bool(errors)
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
