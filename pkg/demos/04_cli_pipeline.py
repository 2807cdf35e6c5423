"""Drive the whole conversion through the command-line interface.

Builds the bundled toy fixture in a scratch directory, runs
``tokmap pipeline``, and shows the manifest that pins the run: re-running
with the same seed reproduces every artifact hash.
"""

import json
import subprocess
import sys
import tempfile
from pathlib import Path

from tokmap.fixtures import build_toy_fixture


def run_pipeline(config_path):
    proc = subprocess.run(
        [sys.executable, "-m", "tokmap.cli", "pipeline",
         "--config", str(config_path)],
        capture_output=True, text=True, check=True)
    return proc.stdout.strip().splitlines()


def main():
    with tempfile.TemporaryDirectory() as scratch:
        paths = build_toy_fixture(scratch, seed=42)
        print("fixture files:")
        for name, path in paths.items():
            print(f"  {name:20s} {Path(path).name}")

        artifacts = run_pipeline(paths["config"])
        print("\npipeline artifacts:")
        for line in artifacts:
            print(f"  {Path(line).name}")

        manifest = json.loads((Path(scratch) / "out" / "manifest.json").read_text())
        print("\nmanifest artifact hashes:")
        for name, digest in manifest["artifacts"].items():
            print(f"  {name:24s} {digest[:16]}...")

        first = dict(manifest["artifacts"])
        run_pipeline(paths["config"])
        manifest = json.loads((Path(scratch) / "out" / "manifest.json").read_text())
        print(f"\nsecond run reproduces all hashes: {manifest['artifacts'] == first}")

        report = json.loads((Path(scratch) / "out" / "report.json").read_text())
        print(f"case counts: {report['case_counts']}")


if __name__ == "__main__":
    main()
