#!/usr/bin/env python3
"""Download the UCI evaluation datasets (ARFF format) into datasets/.

The repository ships with these files already; this script re-fetches
them if the directory was stripped.  Sources are tried in order: the
primary GitHub mirror of the classic ARFF conversions, then any mirror
base URLs passed with --mirror (e.g. an artifact proxy that forwards to
github.com).
"""

import argparse
import sys
import urllib.request
from pathlib import Path

DATASETS = ["zoo", "vowel", "segment", "pendigits", "optdigits", "glass"]

PRIMARY = "https://raw.githubusercontent.com/renatopp/arff-datasets/master/classification"
GITHUB_PATH = "renatopp/arff-datasets/raw/master/classification"


def fetch(name: str, bases: list[str], out_dir: Path) -> bool:
    target = out_dir / f"{name}.arff"
    if target.exists() and target.stat().st_size > 0:
        print(f"{name}: already present")
        return True
    for base in bases:
        url = f"{base}/{name}.arff"
        try:
            with urllib.request.urlopen(url, timeout=30) as resp:
                data = resp.read()
            if data.strip():
                target.write_bytes(data)
                print(f"{name}: fetched from {url} ({len(data)} bytes)")
                return True
        except OSError as exc:
            print(f"{name}: {url} failed ({exc})", file=sys.stderr)
    return False


def main() -> int:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument(
        "--out", default=str(Path(__file__).resolve().parents[1] / "datasets")
    )
    parser.add_argument(
        "--mirror",
        action="append",
        default=[],
        help="base URL that forwards github.com paths, e.g. "
        "https://proxy.example/github",
    )
    args = parser.parse_args()
    out_dir = Path(args.out)
    out_dir.mkdir(parents=True, exist_ok=True)

    bases = [PRIMARY] + [f"{m.rstrip('/')}/{GITHUB_PATH}" for m in args.mirror]
    missing = [name for name in DATASETS if not fetch(name, bases, out_dir)]
    if missing:
        print(f"could not fetch: {', '.join(missing)}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
