"""Winding numbers of z -> z^k on the unit circle.

The one-dimensional odd trace integral is the classical winding number, so
the computed degree should land on k for every k.
"""

from symdeg import DirectSigma, Variables, odd_trace_integral

circle = Variables(lam=("c", "s"))

for k in range(-3, 4):
    G = DirectSigma.from_strings([[f"(c + i*s)^({k})"]], circle)
    r = odd_trace_integral(G, 1, resolution=64)
    print(f"k = {k:+d}  raw = {r.raw:+.3e}  snapped = {r.snapped:+d}")
