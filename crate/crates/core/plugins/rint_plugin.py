#!/usr/bin/env python3
"""Internal-resistance battery running over the line protocol.

Reproduces the builtin `rint` model: the current follows from the requested
power at nominal voltage, clamped to the C-rate limits, and SoC is coulomb
counted inside [soc_min, soc_max].
"""
import json
import sys

PROTOCOL = 1


def send(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


def clamp(x, lo, hi):
    return max(lo, min(hi, x))


class Rint:
    def __init__(self, p):
        self.v_nom = p["v_nom_v"]
        self.r = p["r_int_ohm"]
        self.q_ah = p["capacity_ah"]
        self.soc_min = p["soc_min"]
        self.soc_max = p["soc_max"]
        self.i_min = -p["c_rate_charge_max"] * self.q_ah
        self.i_max = p["c_rate_discharge_max"] * self.q_ah
        self.soc = p["initial_soc"]

    def step(self, inputs):
        i_ideal = inputs["p_net_w"] / self.v_nom
        i = clamp(i_ideal, self.i_min, self.i_max)
        v = self.v_nom - i * self.r
        self.soc = clamp(self.soc - i * inputs["dt_s"] / (self.q_ah * 3600.0), self.soc_min, self.soc_max)
        return {
            "soc": self.soc,
            "v_batt_v": v,
            "i_batt_a": i,
            "power_shortfall_w": abs((i_ideal - i) * self.v_nom),
        }


def main():
    model = None
    for line in sys.stdin:
        if not line.strip():
            continue
        msg = json.loads(line)
        kind = msg.get("type")
        if kind == "init":
            try:
                model = Rint(msg["params"])
            except KeyError as e:
                send({"type": "error", "message": f"missing parameter {e}"})
                return
            send({"type": "ready", "protocol": PROTOCOL})
        elif kind == "step":
            send({"type": "output", "outputs": model.step(msg["inputs"])})
        elif kind == "shutdown":
            return


if __name__ == "__main__":
    main()
