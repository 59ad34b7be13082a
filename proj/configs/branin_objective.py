#!/usr/bin/env python3
# Reads {"x": [x0, x1]} on stdin, prints {"y": -branin(x)}.
import json
import math
import sys

x0, x1 = json.loads(sys.stdin.readline())["x"]
b, c, t = 5.1 / (4 * math.pi ** 2), 5 / math.pi, 1 / (8 * math.pi)
f = (x1 - b * x0 ** 2 + c * x0 - 6) ** 2 + 10 * (1 - t) * math.cos(x0) + 10
print(json.dumps({"y": -f}))
