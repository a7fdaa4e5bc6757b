"""Validates every result.json under the given directories against the published schema."""

import json
import pathlib
import sys

import jsonschema

schema = json.loads(pathlib.Path(sys.argv[1]).read_text())
validator = jsonschema.Draft202012Validator(schema)
checked = 0
for root in sys.argv[2:]:
    for path in sorted(pathlib.Path(root).rglob("result.json")):
        errors = sorted(validator.iter_errors(json.loads(path.read_text())), key=str)
        if errors:
            print(f"{path}: {errors[0].message}")
            sys.exit(1)
        checked += 1
if checked == 0:
    print("no result.json files found")
    sys.exit(1)
print(f"{checked} result.json files valid")
