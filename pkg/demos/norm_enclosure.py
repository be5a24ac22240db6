"""How tight is the operator norm enclosure as z shrinks?

The upper end is the Neumann bound sum_k ||T^k|| / z^{k+1}, the lower end the
best probe ||(z - T)^{-1} x|| / ||x||. Their logs agree to better and better
relative accuracy near 0, which is what makes the exponent ratios meaningful.
"""

from __future__ import annotations

from resolvent_lab.opnorm import enclosure
from resolvent_lab.shift_core import ShiftOperator, harmonic

for kind in ("forward", "backward", "bilateral"):
    t = ShiftOperator(kind, harmonic(1), 2)
    print(kind)
    for z in (0.1, 0.01, 0.001):
        enc = enclosure(t, z)
        print(f"  z={z:<6g} ln lower {enc.lower.ln_value:10.4f}  ln upper {enc.upper.ln_value:10.4f}"
              f"  tightness {enc.tightness:.4f}")
