"""The x_r family fills the whole interval [0, 1] for the backward shift.

x_r has coefficients a_n = r^n / ((n+m)! w_1...w_n), so (z - B)^{-1} x_r grows
like exp(r/z) while the operator norm grows like exp(1/z). The ratio of logs
tends to r.
"""

from __future__ import annotations

from resolvent_lab.powerset import RadiusSchedule, sweep_family
from resolvent_lab.shift_core import ShiftOperator, harmonic

t = ShiftOperator("backward", harmonic(1), 2)
schedule = RadiusSchedule(0.1, 0.5, 8)
rows, monotone = sweep_family(t, "xr", [0.1, 0.25, 0.5, 0.75, 1.0], schedule=schedule)
print(f"{'r':>6s} {'estimate':>9s} {'last ratio':>11s}")
for row in rows:
    print(f"{row.r:6.2f} {row.estimate.extrapolated:9.4f} {row.estimate.samples[-1].ratio_mid:11.4f}")
print("estimates nondecreasing in r:", monotone)
