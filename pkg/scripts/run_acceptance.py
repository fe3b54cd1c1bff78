#!/usr/bin/env python3
"""Run the acceptance criteria outside pytest and print one line per criterion.

    python3 scripts/run_acceptance.py          # all ten
    python3 scripts/run_acceptance.py 2 7 9    # a subset
"""
import sys
from pathlib import Path

ROOT = Path(__file__).resolve().parents[1]
sys.path[:0] = [str(ROOT / "src"), str(ROOT / "tests")]

import test_acceptance as acc  # noqa: E402


def main(argv):
    wanted = {int(x) for x in argv} or {c[0] for c in acc.CRITERIA}
    failed = 0
    for num, title, limit, fn in acc.CRITERIA:
        if num not in wanted:
            continue
        try:
            acc._run(num, title, limit, fn)  # prints its own line
        except AssertionError:
            failed += 1
    print(f"{len(wanted) - failed}/{len(wanted)} criteria passed")
    return 1 if failed else 0


if __name__ == "__main__":
    sys.exit(main(sys.argv[1:]))
