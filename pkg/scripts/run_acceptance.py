#!/usr/bin/env python3
"""Run the shipped acceptance configuration and summarize it.

Prints one line per check plus a status tally.  An optional first
argument saves the full JSON bundle to that path ("-" prints it).
Exit code 0 iff nothing failed.
"""

import sys
from collections import Counter

from drinfeld.cli import acceptance_entries, bundle_exit_code, report_bundle
from drinfeld.report import dumps


def main() -> int:
    out_path = sys.argv[1] if len(sys.argv) > 1 else None
    bundle = report_bundle(acceptance_entries())
    for r in bundle["reports"]:
        params = " ".join(f"{k}={v}" for k, v in sorted(r["params"].items()))
        print(f"{r['status']:8s} {r['check_id']:24s} {params}")
    tally = Counter(r["status"] for r in bundle["reports"])
    print("----")
    print(", ".join(f"{k}: {v}" for k, v in sorted(tally.items())))
    text = dumps(bundle)
    if out_path == "-":
        print(text)
    elif out_path:
        with open(out_path, "w", encoding="utf-8") as fh:
            fh.write(text)
        print(f"bundle written to {out_path}")
    return bundle_exit_code(bundle)


if __name__ == "__main__":
    sys.exit(main())
