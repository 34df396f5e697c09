"""Run a small experiment with the CLI and validate summary.json against the schema."""
import json
import pathlib
import subprocess
import sys

import jsonschema


def main() -> int:
    cli, schema_path, workdir = sys.argv[1:4]
    work = pathlib.Path(workdir)
    work.mkdir(parents=True, exist_ok=True)
    config = work / "config.yaml"
    config.write_text(
        "preset: ackley-3mod\n"
        "methods: [lambo, gp-ucb, gp-ei, random, ei-per-cost]\n"
        "horizon: 6\n"
        "replications: 2\n"
        "seed: 3\n"
        f"output: {work / 'out'}\n"
        "model:\n"
        "  candidates_per_dim: 8\n"
    )
    subprocess.run([cli, "run", str(config)], check=True, stdout=subprocess.DEVNULL)
    summary = json.loads((work / "out" / "summary.json").read_text())
    schema = json.loads(pathlib.Path(schema_path).read_text())
    jsonschema.Draft202012Validator.check_schema(schema)
    jsonschema.validate(summary, schema, cls=jsonschema.Draft202012Validator)
    traces = sorted(p.name for p in (work / "out" / "traces").iterdir())
    if len(traces) != 10:
        print(f"expected 10 trace files, found {traces}")
        return 1
    print("summary.json valid;", len(traces), "trace files")
    return 0


if __name__ == "__main__":
    sys.exit(main())
