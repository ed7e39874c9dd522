#!/usr/bin/env python3
"""Validate shipped scenarios and model files against the schemas in docs/."""
import json
import sys
from pathlib import Path

import jsonschema

root = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent


def validator(name):
    schema = json.loads((root / "docs" / name).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    return jsonschema.Draft202012Validator(schema)


scenario = validator("scenario.schema.json")
model = validator("model.schema.json")
failures = 0


def check(v, doc, label):
    global failures
    errors = sorted(v.iter_errors(doc), key=lambda e: list(e.absolute_path))
    for e in errors:
        print(f"{label}: /{'/'.join(map(str, e.absolute_path))}: {e.message}")
    failures += len(errors)


for path in sorted((root / "scenarios").glob("*.scenario")):
    doc = json.loads(path.read_text())
    check(scenario, doc, path.name)
    if "initialModel" in doc:
        check(model, doc["initialModel"], path.name + " initialModel")
for path in sorted((root / "tests" / "golden").glob("*.json")):
    check(model, json.loads(path.read_text()), path.name)

# The schema must reject what the loader rejects at the top level.
bad = json.loads((root / "tests" / "data" / "unknown-rst.scenario").read_text())
bad["colour"] = "blue"
if scenario.is_valid(bad):
    print("scenario schema accepted an unknown top-level field")
    failures += 1

print("ok" if failures == 0 else f"{failures} problem(s)")
sys.exit(1 if failures else 0)
