#!/usr/bin/env python3
"""Run both 13-node benchmark scenarios and print a short summary.

Writes artifacts under out/case_study_40pct and out/case_study_3pct:
the 40% regime exercises the error bands close to the deadline, the 3%
regime stops at the guaranteed early-termination time and checks that
every node kept a correct parent.
"""

import pathlib
import sys

sys.path.insert(0, str(pathlib.Path(__file__).resolve().parents[1] / "src"))

from dbmc import load_scenario, run_scenario  # noqa: E402

ROOT = pathlib.Path(__file__).resolve().parents[1]


def main() -> int:
    worst_exit = 0
    for name in ("case_study_40pct", "case_study_3pct"):
        sc = load_scenario(str(ROOT / "scenarios" / f"{name}.ini"))
        result = run_scenario(sc, ROOT / "out" / name)
        s = result.summary
        ts = "n/a" if s["t_s_guaranteed"] is None else f"{s['t_s_guaranteed']:.4f}"
        print(
            f"{name}: u-={s['u_minus']:.3g} u+={s['u_plus']:.3g} "
            f"gap={s['path_gap']} D={s['effective_diameter']} "
            f"guaranteed stop={ts} ({s['termination_status']}) "
            f"ran to t={s['t_end']:.4f} "
            f"identification={'ok' if s['overall'] else 'FAILED'}"
        )
        print(f"  artifacts: {result.out_dir}")
        worst_exit = max(worst_exit, result.exit_code)
    return worst_exit


if __name__ == "__main__":
    sys.exit(main())
