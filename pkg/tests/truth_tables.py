"""Hand-checked decision tables for the two certificate routes.

Mod-p route: grant iff p <= d/2 + 1, q = 2(p-1) <= d and p does not divide
deg; the bound is d - q. Mod-2 route (q in {2, 4}, q <= d): grant iff deg odd.
Entries map (deg, d, p) or (deg, d, q) to the granted bound, or None.
"""

# p = 3 (q = 4): every d in {4, 6, 8} qualifies; 3 divides 0 and 3.
# p = 5 (q = 8): needs d >= 8; 5 divides only 0 in range.
WU = {
    (0, 4, 3): None, (1, 4, 3): 0, (2, 4, 3): 0, (3, 4, 3): None,
    (0, 6, 3): None, (1, 6, 3): 2, (2, 6, 3): 2, (3, 6, 3): None,
    (0, 8, 3): None, (1, 8, 3): 4, (2, 8, 3): 4, (3, 8, 3): None,
    (0, 4, 5): None, (1, 4, 5): None, (2, 4, 5): None, (3, 4, 5): None,
    (0, 6, 5): None, (1, 6, 5): None, (2, 6, 5): None, (3, 6, 5): None,
    (0, 8, 5): None, (1, 8, 5): 0, (2, 8, 5): 0, (3, 8, 5): 0,
}

SW = {
    (0, 4, 2): None, (1, 4, 2): 2, (2, 4, 2): None, (3, 4, 2): 2,
    (0, 5, 2): None, (1, 5, 2): 3, (2, 5, 2): None, (3, 5, 2): 3,
    (0, 6, 2): None, (1, 6, 2): 4, (2, 6, 2): None, (3, 6, 2): 4,
    (0, 7, 2): None, (1, 7, 2): 5, (2, 7, 2): None, (3, 7, 2): 5,
    (0, 4, 4): None, (1, 4, 4): 0, (2, 4, 4): None, (3, 4, 4): 0,
    (0, 5, 4): None, (1, 5, 4): 1, (2, 5, 4): None, (3, 5, 4): 1,
    (0, 6, 4): None, (1, 6, 4): 2, (2, 6, 4): None, (3, 6, 4): 2,
    (0, 7, 4): None, (1, 7, 4): 3, (2, 7, 4): None, (3, 7, 4): 3,
}
