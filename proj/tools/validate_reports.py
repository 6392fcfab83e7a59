#!/usr/bin/env python3
"""Run the bellext CLI over the builtins and sample files and validate every
JSON report (and exported scenario) against the shipped schemas."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource


def load_registry(schema_dir):
    schemas = {}
    for path in sorted(schema_dir.glob("*.schema.json")):
        schemas[path.name] = json.loads(path.read_text())
    registry = Registry().with_resources(
        (name, Resource.from_contents(s)) for name, s in schemas.items())
    return schemas, registry


def main():
    if len(sys.argv) != 4:
        sys.exit("usage: validate_reports.py BELLEXT SCHEMA_DIR SCENARIO_DIR")
    exe = sys.argv[1]
    schema_dir = pathlib.Path(sys.argv[2])
    scenario_dir = pathlib.Path(sys.argv[3])
    schemas, registry = load_registry(schema_dir)

    def validator(name):
        return jsonschema.Draft202012Validator(schemas[name], registry=registry)

    report = validator("report.schema.json")
    scenario = validator("scenario.schema.json")
    graph = validator("graph.schema.json")

    runs = []
    for b in ("singlet", "hardy", "ghsz"):
        src = ["--builtin", b]
        runs += [(["predict", *src], 0), (["check", *src], 1), (["export", *src], 0)]
    for w in ("B1", "B2"):
        runs.append((["range", "--builtin", "singlet", "--target", "A1,A2", "--with", w], 0))
        runs.append((["range", "--builtin", "hardy", "--target", "A1,A2", "--with", w], 0))
    runs.append((["range", "--builtin", "ghsz", "--target", "A1,A2,B1,B2", "--with", "C1"], 0))
    runs.append((["check", "--file", str(scenario_dir / "product.json")], 0))
    runs.append((["check", "--file", str(scenario_dir / "singlet_moments.json")], 1))
    runs.append((["predict", "--file", str(scenario_dir / "product.json")], 0))
    runs.append((["extend", "--file", str(scenario_dir / "tree_graph.json")], 0))
    runs.append((["extend", "--file", str(scenario_dir / "mismatched_graph.json")], 1))
    runs.append((["selfcheck", "--samples", "200"], 0))

    failures = 0
    with tempfile.TemporaryDirectory() as tmp:
        for k, (args, expected) in enumerate(runs):
            out = pathlib.Path(tmp) / f"r{k}.json"
            proc = subprocess.run([exe, *args, "--json", str(out)], capture_output=True, text=True)
            label = " ".join(args)
            if proc.returncode != expected:
                print(f"FAIL {label}: exit {proc.returncode}, expected {expected}\n{proc.stderr}")
                failures += 1
                continue
            doc = json.loads(out.read_text())
            v = scenario if args[0] == "export" else report
            errors = sorted(v.iter_errors(doc), key=lambda e: list(e.path))
            if errors:
                print(f"FAIL {label}: {errors[0].message} at {list(errors[0].path)}")
                failures += 1
            else:
                print(f"ok   {label}")

    for path in sorted(scenario_dir.glob("*.json")):
        doc = json.loads(path.read_text())
        v = graph if "nodes" in doc else scenario
        errors = list(v.iter_errors(doc))
        print(f"{'FAIL' if errors else 'ok  '} {path.name}")
        failures += bool(errors)

    # the schemas must reject broken documents too
    broken = [
        (report, {"command": "check", "scenario": "x", "lp_feasible": True, "witness": None}),
        (report, {"command": "range", "scenario": "x", "target": ["A"], "with": [], "constraints": 1,
                  "lp": {"range": [0, 1], "empty": False}, "closed_form": None, "agree": True}),
        (report, {"command": "frobnicate"}),
        (scenario, {"name": "x", "domain": "binary", "variables": [], "contexts": [],
                    "source": {"type": "moments", "entries": {}}}),
        (graph, {"nodes": [{"block": []}], "edges": []}),
    ]
    for v, doc in broken:
        if v.is_valid(doc):
            print(f"FAIL schema accepted a broken document: {json.dumps(doc)}")
            failures += 1

    print(f"{failures} failure(s)")
    return 1 if failures else 0


if __name__ == "__main__":
    sys.exit(main())
