"""Validate shipped scenarios and CLI reports against the JSON schemas in docs/."""

import glob
import json
import os
import subprocess
import sys
import tempfile

import jsonschema


def load(path):
    with open(path, encoding="utf-8") as f:
        return json.load(f)


def main():
    root, cli = sys.argv[1], sys.argv[2]
    scenario_schema = load(os.path.join(root, "docs", "scenario.schema.json"))
    report_schema = load(os.path.join(root, "docs", "report.schema.json"))
    files = sorted(glob.glob(os.path.join(root, "scenarios", "*.json")))
    if not files:
        sys.exit("no scenario files found")
    for path in files:
        jsonschema.validate(load(path), scenario_schema)
    with tempfile.TemporaryDirectory() as tmp:
        out = os.path.join(tmp, "report.json")
        subprocess.run([cli, "run", "-q", "--json", out, *files], check=True)
        jsonschema.validate(load(out), report_schema)
    print(f"{len(files)} scenario files and their report match the schemas")


if __name__ == "__main__":
    main()
