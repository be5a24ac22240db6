"""Forward and backward shifts with the same weights behave very differently.

For the forward shift every basis vector already carries the full growth of
the resolvent (exponent 1). For the backward shift a finitely supported vector
is killed by a power of the shift, so its resolvent orbit is a polynomial in
1/z and its exponent is 0. Infinitely supported vectors such as the tail
vector are only evaluated for the backward shift.
"""

from __future__ import annotations

from resolvent_lab.powerset import estimate_kx
from resolvent_lab.shift_core import ShiftOperator, harmonic

w = harmonic(1)  # w_n = 1/(n+1)

vectors = {"forward": ("e:0", "e:2", "finite:[(0,1),(3,0.5)]"), "backward": ("e:0", "e:2", "tail:m=2")}
for kind, vecs in vectors.items():
    t = ShiftOperator(kind, w, 2)
    for vec in vecs:
        est = estimate_kx(t, vec)
        last = est.samples[-1]
        print(f"{kind:9s} {vec:22s} ratio at r={last.r:.2e}: [{last.ratio_lo:.4f}, {last.ratio_hi:.4f}]"
              f"  -> k ~ {est.extrapolated:.4f} ({est.status})")
