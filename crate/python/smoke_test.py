"""Smoke test for the tccbf_py extension module.

Build and run from the repository root:

    cargo build -p tccbf-python --release --features extension-module
    cp target/release/libtccbf_py.so python/tccbf_py.so
    python3 python/smoke_test.py
"""

import json
import math
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent))

import tccbf_py as t


def check(cond, what):
    if not cond:
        raise AssertionError(what)
    print(f"ok  {what}")


def raises(exc, fn):
    try:
        fn()
    except exc:
        return True
    return False


def main():
    names = t.builtin_names()
    check(len(names) == 6 and "unicycle-static" in names, "six builtin scenarios")

    check(t.smooth_max(1.0, 1.0, 5.0) == 1.0, "smooth_max of equal arguments")
    s = t.smooth_max(3.0, -1.0, 2.0)
    check(3.0 - math.log(2) / 2.0 <= s <= 3.0, "smooth_max sandwich")

    obs = t.Obstacle(15.0, 0.0, 2.0)
    ed = t.BarrierConfig("ed")
    tc = t.BarrierConfig("tc")
    pose = (0.0, 0.0, 0.0, 2.0)
    h_tc = t.barrier_value(pose, obs, tc)
    right, left = t.tc_components(pose, obs, tc)
    check(abs(right - left) < 1e-12, "turning circles symmetric on the centerline")
    check(h_tc <= max(right, left), "tc below the larger circle clearance")
    check(len(t.barrier_gradient(pose, obs, ed)) == 4, "gradient has four entries")

    check(raises(ValueError, lambda: t.BarrierConfig("xx")), "bad barrier kind raises ValueError")
    check(raises(KeyError, lambda: t.Scenario.builtin("nope")), "unknown scenario raises KeyError")

    sc = t.Scenario.builtin("unicycle-overtaking").with_overrides(barrier="ed", alpha_e=0.04)
    check(sc.barrier.kind == "ed", "override barrier kind")
    again = t.Scenario.from_json(sc.to_json())
    check(json.loads(again.to_json())["barrier"]["alpha_e"] == 0.04, "JSON round trip keeps overrides")

    run_ed = sc.run()
    run_tc = t.Scenario.builtin("unicycle-overtaking").run()
    check(run_ed.outcome == "reached" and run_tc.outcome == "reached", "both runs reach the goal")
    m = run_tc.metrics()
    check(m.controller == "MPC-TCCBF" and m.t_a is not None, f"metrics {m!r}")
    checked, bad = run_tc.decay_violations()
    check(checked > 0 and not bad, "closed-loop decay holds")
    check(run_tc.to_csv() == again.with_overrides(barrier="tc", alpha_e=0.05).run().to_csv(),
          "rerun from JSON reproduces the CSV")
    check(run_tc.svg().startswith("<svg"), "trajectory figure")
    plain_ed = t.Scenario.builtin("unicycle-overtaking").with_overrides(barrier="ed").run()
    table = t.compare([plain_ed, run_tc])
    check("MPC-EDCBF" in table and "MPC-TCCBF" in table, "comparison table")
    print(table)
    check(raises(ValueError, lambda: t.compare([run_ed, run_tc])), "comparing different tunings raises ValueError")

    grids = [t.level_set(c, t.Obstacle(0.0, 0.0, 2.0), 0.0, 1.5) for c in (ed, tc)]
    ed_w, tc_w = (g.perpendicular_extent() for g in grids)
    check(ed_w > tc_w, f"ED exclusion wider across the course ({ed_w:.2f} > {tc_w:.2f})")


if __name__ == "__main__":
    main()
