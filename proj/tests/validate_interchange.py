#!/usr/bin/env python3
# SPDX-License-Identifier: Apache-2.0
"""Validates `qviz visualize --format json` output against the interchange schema."""

import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    qviz, schema_path, queries = sys.argv[1], pathlib.Path(sys.argv[2]), pathlib.Path(sys.argv[3])
    schema = json.loads(schema_path.read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    validator = jsonschema.Draft202012Validator(schema)
    schema_file = queries / "rs_schema.json"
    failures = 0
    checked = 0
    for sql in sorted(queries.glob("*.sql")):
        for dialect in ("queryvis", "rd"):
            for forall in ("--forall", "--no-forall"):
                cmd = [qviz, "visualize", str(sql), "--format", "json", "--dialect", dialect, forall]
                if sql.stem.startswith("not_"):
                    cmd += ["--schema", str(schema_file)]
                run = subprocess.run(cmd, capture_output=True, text=True, check=False)
                if run.returncode != 0:
                    print(f"FAIL {sql.name} {dialect} {forall}: exit {run.returncode}: {run.stderr.strip()}")
                    failures += 1
                    continue
                errors = list(validator.iter_errors(json.loads(run.stdout)))
                for error in errors:
                    print(f"FAIL {sql.name} {dialect} {forall}: {error.json_path}: {error.message}")
                failures += bool(errors)
                checked += 1
    print(f"{checked} documents validated, {failures} failures")
    return 1 if failures or checked == 0 else 0


if __name__ == "__main__":
    sys.exit(main())
