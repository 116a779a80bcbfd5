"""Checks the emitted JSON Schemas with an independent validator."""

import json
import pathlib
import re
import subprocess
import sys
import tempfile

import jsonschema

cli, docs = sys.argv[1], pathlib.Path(sys.argv[2])


def emit(what):
    return json.loads(subprocess.run([cli, "schema", "emit", "--what", what], check=True,
                                     capture_output=True, text=True).stdout)


schemas = {w: emit(w) for w in ("product", "rules", "predicate", "program")}
for what, s in schemas.items():
    jsonschema.validators.validator_for(s).check_schema(s)

with tempfile.TemporaryDirectory() as tmp:
    subprocess.run([cli, "corpus", "generate", "--preset", "gamma", "--pages", "60", "--out", tmp],
                   check=True, capture_output=True)
    lines = pathlib.Path(tmp, "truth.jsonl").read_text().splitlines()
    for line in lines:
        jsonschema.validate(json.loads(line)["product"], schemas["product"])

examples = re.findall(r"```json\n(.*?)```", (docs / "dsl.md").read_text(), re.S)
for ex in examples[:2]:
    jsonschema.validate(json.loads(ex), schemas["program"])

bad = {"kind": "decision", "program_id": "x", "created_by": "m", "predicate": {"op": "xor", "args": []}}
try:
    jsonschema.validate(bad, schemas["program"])
    sys.exit("unknown predicate op was accepted")
except jsonschema.ValidationError:
    pass

print(f"{len(schemas)} schemas valid, {len(lines)} truth products and {len(examples[:2])} doc examples conform")
