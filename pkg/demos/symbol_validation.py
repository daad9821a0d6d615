"""Screening a symbol family before reducing it.

A well-behaved family passes the three checks; replacing one entry by the
parameter l0 breaks ellipticity where l0 = 0, and the failure carries a witness.
"""

from symdeg import gallery
from symdeg.problem import from_dict
from symdeg.symbol import check_ellipticity, check_locality

good = from_dict(gallery.identity_family())
print("identity-family")
print("  ", check_ellipticity(good.family).to_dict())
print("  ", check_locality(good.family).status)

doc = gallery.identity_family()
doc["symbol"]["coefficients"][0]["matrix"] = [["l0", "0"], ["0", "1"]]
bad = from_dict(doc)
rep = check_ellipticity(bad.family)
print("degenerate family:", rep.status)
print("   witness:", rep.witness)
