"""Smoke test for the pysgwave extension.

Build and run from the repository root:

    cargo build --release -p sgwave-py --features extension-module
    cp target/release/libpysgwave.so python/pysgwave.so
    python3 python/smoke.py
"""

import math
import os
import sys

sys.path.insert(0, os.path.dirname(os.path.abspath(__file__)))

import pysgwave as sg


def close(a, b, tol):
    assert abs(a - b) < tol, f"{a} vs {b}"


params = sg.ModelParams(1.0, math.sqrt(2.0))
assert params.regime() == "supercritical"
close(params.period(), 2.0 * math.pi, 1e-12)
close(sg.quad_period(params), params.period(), 1e-10)

wave = sg.TravellingWave(params, "kink_array")
close(wave.g(params.period()) - wave.g(0.0), 2.0 * math.pi, 1e-9)
assert abs(wave.pde_residual(0.3, 0.1)) < 1e-5

front = sg.TravellingWave(sg.ModelParams(0.5, 0.5), "increasing2")
lo, hi = front.g_limits()
close(lo, 5.0 * math.pi / 6.0, 1e-14)
close(hi, 13.0 * math.pi / 6.0, 1e-14)

assert max(abs(v) for v in sg.identities_check(0.5).values()) < 1e-12

try:
    sg.TravellingWave(sg.ModelParams(1.0, 0.5), "kink_array")
except ValueError:
    pass
else:
    raise AssertionError("kink_array below gamma = 1 must be rejected")

field = sg.FieldState(wave, 256)
run = field.evolve(params.period(), reference=wave, record_every=16)
assert max(run["deviation"]) < 1e-3
assert all(abs(w - 1.0) < 1e-9 for w in run["winding"])
assert run["diverged_at"] is None

print("pysgwave smoke test ok:", ", ".join(sg.branches()))
