#!/usr/bin/env python3
# Completes the handshake, then never answers a step.
import json
import sys
import time

for line in sys.stdin:
    msg = json.loads(line)
    if msg["type"] == "init":
        print(json.dumps({"type": "ready", "protocol": 1}), flush=True)
    elif msg["type"] == "step":
        time.sleep(3600)
