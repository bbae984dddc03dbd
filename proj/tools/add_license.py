#!/usr/bin/env python3
"""Prepends the license header to every .h/.cc under include/, src/, tests/ and tools/.

Files that already start with the header are left alone, so the script is
safe to re-run.
"""
import pathlib
import sys

ROOT = pathlib.Path(__file__).resolve().parent.parent
HEADER_PATH = pathlib.Path(sys.argv[1]) if len(sys.argv) > 1 else ROOT / "LICENSE_HEADER"


def main():
    header = HEADER_PATH.read_text().rstrip("\n") + "\n\n"
    changed = 0
    for folder in ("include", "src", "tests", "tools"):
        for path in sorted((ROOT / folder).rglob("*")):
            if path.suffix not in (".h", ".cc"):
                continue
            text = path.read_text()
            if text.startswith(header.rstrip("\n")):
                continue
            path.write_text(header + text)
            changed += 1
    print(f"added header to {changed} file(s)")


if __name__ == "__main__":
    main()
