#!/usr/bin/env python3
"""Lumped cabin with a proportional heat pump, over the line protocol.

Same physics as the builtin `lumped_cabin` model. A starting point for
custom HVAC controllers.
"""
import json
import sys

PROTOCOL = 1
CP_AIR = 1005.0


def send(obj):
    sys.stdout.write(json.dumps(obj) + "\n")
    sys.stdout.flush()


class Cabin:
    def __init__(self, p):
        self.p = p
        self.t = p["initial_t_cabin_c"]
        self.setpoint = p.get("active_setpoint_c")

    def step(self, u):
        p = self.p
        d = u["t_amb_c"] - self.t
        q_passive = (
            (p["ua_body_w_per_k"] + p["k_v_w_per_k_per_mps"] * u["speed_mps"]) * d
            + u["g_solar"] * p["glass_area_m2"] * p["solar_transmittance"]
            + p["air_massflow_kg_per_s"] * CP_AIR * d
            + u["n_occ"] * p["occupant_heat_w"]
        )
        if self.setpoint is None:
            q_hvac = 0.0
        else:
            rated = p["rated_thermal_power_w"]
            demand = p["controller_gain_w_per_k"] * (self.setpoint - self.t) - q_passive
            q_hvac = max(-rated, min(rated, demand))
        if q_hvac < 0:
            p_hvac = -q_hvac / p["cop_cooling"]
        elif q_hvac > 0:
            p_hvac = q_hvac / p["cop_heating"]
        else:
            p_hvac = 0.0
        self.t = self.t + (q_passive + q_hvac) * u["dt_s"] / p["cabin_capacitance_j_per_k"]
        return {"q_hvac_w": q_hvac, "p_hvac_w": p_hvac, "t_cabin_c": self.t}


def main():
    model = None
    for line in sys.stdin:
        if not line.strip():
            continue
        msg = json.loads(line)
        kind = msg.get("type")
        if kind == "init":
            model = Cabin(msg["params"])
            send({"type": "ready", "protocol": PROTOCOL})
        elif kind == "step":
            send({"type": "output", "outputs": model.step(msg["inputs"])})
        elif kind == "shutdown":
            return


if __name__ == "__main__":
    main()
