"""The unit quaternions as a map S^3 -> SU(2) and its degree.

With outward-normal orientation on S^3 the identification below has degree
-1; flipping the orientation flips the sign.
"""

from symdeg import gallery, odd_trace_integral
from symdeg.problem import from_dict

p = from_dict(gallery.su2_generator())
r = odd_trace_integral(p.sigma, 2, resolution=32)
print("map:", gallery.su2_generator()["description"])
print(f"raw degree   {r.raw:+.12f}")
print(f"snapped      {r.snapped:+d}")
print(f"imag residue {r.imag_residual:.1e}")
print(f"constant     {r.constant_used}")
