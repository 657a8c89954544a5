"""Validate the JSON schemas in docs/ against shipped files and fresh CLI output."""

import json
import pathlib
import subprocess
import sys
import tempfile

import jsonschema
from referencing import Registry, Resource

root = pathlib.Path(sys.argv[1])
cli = sys.argv[2]
docs = root / "docs"

schemas = {p.name: json.loads(p.read_text()) for p in docs.glob("*.schema.json")}
registry = Registry().with_resources(
    (name, Resource.from_contents(s)) for name, s in schemas.items()
)
validators = {}
for name, schema in schemas.items():
    jsonschema.Draft202012Validator.check_schema(schema)
    validators[name] = jsonschema.Draft202012Validator(schema, registry=registry)
failures = 0


def check(schema_name, instance, where):
    global failures
    errors = list(validators[schema_name].iter_errors(instance))
    for e in errors[:3]:
        print(f"{where}: {schema_name}: {e.message} at {list(e.absolute_path)}")
    failures += bool(errors)


check("rulebase.schema.json", json.loads((root / "config/default-rulebase.json").read_text()), "default-rulebase.json")
for scenario in sorted((root / "scenarios").glob("*.json")):
    check("scenario.schema.json", json.loads(scenario.read_text()), scenario.name)

with tempfile.TemporaryDirectory() as tmp:
    t = pathlib.Path(tmp)
    subprocess.run([cli, "keygen", "--devices", "356938035643809=a,490154203237518=b", "--out", t / "keys.json",
                    "--pool-size", "16", "--seed", "3"], check=True, capture_output=True)
    check("registry.schema.json", json.loads((t / "keys.json").read_text()), "keygen")
    subprocess.run([cli, "simulate", "--scenario", root / "scenarios/multihop.json", "--out", t / "trace.jsonl",
                    "--log", t / "events.log", "--registry-out", t / "registry.json"], check=True, capture_output=True)
    check("registry.schema.json", json.loads((t / "registry.json").read_text()), "simulate registry")
    for n, line in enumerate((t / "trace.jsonl").read_text().splitlines(), 1):
        check("trace-event.schema.json", json.loads(line), f"trace:{n}")
    for n, line in enumerate((t / "events.log").read_text().splitlines(), 1):
        entry = json.loads(line.split(" ", 1)[1])
        check("log-entry.schema.json", entry, f"log:{n}")
        if entry["kind"] == "measurement":
            check("measurement.schema.json", entry["payload"]["measurement"], f"log:{n}")

config = {"host": "0.0.0.0", "port": 0, "log_path": "x.log", "registry_path": "r.json", "clock": "data",
          "users": [{"username": "ops", "role": "operator",
                     "password_hash": "pbkdf2-sha256$1000$00ff$" + "ab" * 32}]}
check("service-config.schema.json", config, "service config sample")

print("schemas:", len(schemas), "failures:", failures)
sys.exit(1 if failures else 0)
