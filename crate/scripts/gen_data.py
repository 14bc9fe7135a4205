#!/usr/bin/env python3
"""Regenerate the synthetic drive cycles and the demo motor efficiency map
bundled under crates/core/data/.

The traces are built from smooth micro-trips (half-cosine speed ramps, cruise
plateaus, idle) sampled at 1 Hz and rounded to 0.1 km/h. They are synthetic
stand-ins with realistic shape, not copies of any regulatory cycle.
"""
import math
import os
import sys

DATA = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "data")
OUT = os.path.join(DATA, "cycles")


def trip(v0, v1, seconds):
    """Half-cosine ramp from v0 to v1 (km/h) over `seconds`, excluding the start sample."""
    return [v0 + (v1 - v0) * 0.5 * (1 - math.cos(math.pi * k / seconds)) for k in range(1, seconds + 1)]


def build(plan):
    speeds = [0.0]
    for kind, secs, target in plan:
        cur = speeds[-1]
        if kind == "ramp":
            speeds += trip(cur, target, secs)
        elif kind == "hold":
            # gentle +-2 km/h wobble so cruise is not perfectly flat
            speeds += [max(0.0, target + 1.0 * math.sin(2 * math.pi * k / 37.0)) if target > 0 else 0.0
                       for k in range(1, secs + 1)]
        else:
            raise ValueError(kind)
    return [round(v, 1) for v in speeds]


def micro(peak, t_acc, t_cruise, t_dec, t_idle):
    return [("ramp", t_acc, peak), ("hold", t_cruise, peak), ("ramp", t_dec, 0.0), ("hold", t_idle, 0.0)]


def urban():
    plan = [("hold", 10, 0.0)]
    trips = [(32, 12, 25, 10, 18), (45, 15, 40, 13, 20), (38, 13, 30, 12, 15), (50, 16, 35, 14, 22),
             (28, 10, 15, 9, 12), (42, 14, 35, 12, 25), (48, 16, 40, 14, 18), (35, 12, 20, 11, 16)]
    for rep in range(2):
        for p in trips:
            plan += micro(*p)
    return build(plan)


def mixed():
    plan = [("hold", 11, 0.0)]
    low = [(25, 10, 10, 9, 15), (45, 16, 38, 14, 22), (52, 18, 55, 16, 30), (38, 14, 30, 12, 18),
           (56, 20, 60, 18, 40), (30, 11, 20, 10, 16)]
    medium = [(60, 20, 70, 18, 20), (76, 26, 95, 22, 30), (55, 18, 40, 16, 15), (70, 24, 60, 20, 18)]
    high = [(90, 30, 80, 26, 15), (97, 34, 95, 30, 20), (80, 26, 65, 22, 10)]
    for p in low + medium + high:
        plan += micro(*p)
    plan += [("ramp", 45, 110.0), ("hold", 35, 110.0), ("ramp", 25, 131.0), ("hold", 36, 131.0),
             ("ramp", 50, 0.0)]
    sp = build(plan)
    # pad idle to exactly 1800 s (1801 samples)
    sp += [0.0] * (1801 - len(sp))
    return sp[:1801]


def highway():
    plan = [("ramp", 40, 75.0), ("hold", 120, 78.0), ("ramp", 20, 95.0), ("hold", 200, 96.0),
            ("ramp", 25, 70.0), ("hold", 90, 72.0), ("ramp", 25, 100.0), ("hold", 160, 100.0),
            ("ramp", 60, 0.0), ("hold", 5, 0.0)]
    return build(plan)


def write(name, speeds):
    path = os.path.join(OUT, name)
    with open(path, "w") as f:
        f.write("time_s,speed_kmh\n")
        for t, v in enumerate(speeds):
            f.write(f"{t},{v:.1f}\n")
    dist = sum((speeds[k] + speeds[k + 1]) / 2 / 3.6 for k in range(len(speeds) - 1))
    print(f"{name}: {len(speeds) - 1} s, {dist / 1000:.3f} km, vmax {max(speeds)} km/h", file=sys.stderr)


def motor_map():
    """Smooth PMSM-like efficiency surface on a 13 x 11 speed/torque grid."""
    path = os.path.join(DATA, "maps", "compact_pmsm.csv")
    with open(path, "w") as f:
        f.write("speed_radps,torque_nm,efficiency\n")
        for w in range(0, 1201, 100):
            for t in range(0, 251, 25):
                eta = (0.955 - 0.10 * math.exp(-t / 40.0) - 0.04 * (w / 1200.0) ** 2
                       - 0.05 * math.exp(-w / 60.0) - 0.02 * (t / 250.0) ** 2)
                eta = min(max(eta, 0.70), 0.96)
                f.write(f"{w},{t},{eta:.4f}\n")


if __name__ == "__main__":
    motor_map()
    write("urban_stop_start.csv", urban())
    write("mixed_synthetic.csv", mixed())
    write("highway_synthetic.csv", highway())
