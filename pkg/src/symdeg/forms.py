"""Top-degree coefficient of ``tr((g^-1 dg)^D)`` from a Maurer-Cartan frame.

With ``A_i = g^-1 dg/du_i`` the coefficient of ``du_1 ^ ... ^ du_D`` is the
antisymmetrised trace

    T = sum_{perm pi} sign(pi) tr(A_pi(1) ... A_pi(D)).

:func:`top_form` evaluates it with a dynamic programme over subsets
(``D 2^(D-1)`` matrix products); :func:`top_form_bruteforce` enumerates all
``D!`` permutations and is kept as an independent check.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .symbol import SingularSymbolError

CONDITION_CAP = 1e12


@dataclass(frozen=True)
class MaurerCartanFrame:
    """``A[..., i, :, :] = g^-1 dg/du_i`` with shape ``(..., D, m, m)``."""

    A: np.ndarray

    @property
    def D(self) -> int:
        return self.A.shape[-3]

    @property
    def m(self) -> int:
        return self.A.shape[-1]


def frame_from_jet(value, partials, cond_cap=CONDITION_CAP, where=None) -> MaurerCartanFrame:
    """Build the frame from ``g`` ``(N, m, m)`` and ``dg`` ``(N, m, m, D)``.

    Raises :class:`SingularSymbolError` if ``g`` has condition number above
    ``cond_cap`` at any node; ``where`` (N, c) coordinates locate the witness.
    """
    value = np.asarray(value)
    cond = np.linalg.cond(value)
    bad = ~(cond <= cond_cap)
    if np.any(bad):
        j = int(np.argmax(bad))
        witness = {"node": j, "condition_number": float(cond[j])}
        if where is not None:
            witness["coordinates"] = np.asarray(where)[j].tolist()
        raise SingularSymbolError(
            f"matrix map numerically singular (condition number {cond[j]:.3g} > {cond_cap:.0e})",
            witness,
        )
    dg = np.moveaxis(np.asarray(partials), -1, -3)  # (N, D, m, m)
    A = np.linalg.solve(value[..., None, :, :], dg)
    return MaurerCartanFrame(A)


def frame(sigma, env, k, where=None) -> MaurerCartanFrame:
    """Frame of a matrix map at the nodes described by ``env``."""
    v, d = sigma.jet(env, k)
    return frame_from_jet(v, d, where=where)


def top_form(f: MaurerCartanFrame | np.ndarray) -> np.ndarray:
    """Antisymmetrised trace of the frame, vectorised over leading axes."""
    A = f.A if isinstance(f, MaurerCartanFrame) else np.asarray(f)
    D, m = A.shape[-3], A.shape[-1]
    batch = A.shape[:-3]
    if m == 1 and D > 1:
        # scalar one-forms anticommute to zero
        return np.zeros(batch, dtype=complex)

    # M[S] = sum over orderings of S of sign * product, with the ordering's
    # first factor chosen from S; built up from the right.
    eye = np.broadcast_to(np.eye(m, dtype=A.dtype), batch + (m, m))
    layer = {0: eye}
    full = (1 << D) - 1
    for size in range(1, D):
        nxt = {}
        for mask, M in layer.items():
            for i in range(D):
                bit = 1 << i
                if mask & bit:
                    continue
                new = mask | bit
                # sign of moving i to the front of the sorted subset
                sign = -1 if bin(new & (bit - 1)).count("1") % 2 else 1
                term = A[..., i, :, :] @ M
                if sign < 0:
                    term = -term
                if new in nxt:
                    nxt[new] = nxt[new] + term
                else:
                    nxt[new] = term
        layer = nxt
    total = np.zeros(batch, dtype=complex)
    for i in range(D):
        bit = 1 << i
        M = layer[full & ~bit]
        sign = -1 if i % 2 else 1
        # tr(A_i M) without forming the product
        total = total + sign * np.einsum("...ij,...ji->...", A[..., i, :, :], M)
    return total


def permutation_sign(perm) -> int:
    sign = 1
    seen = [False] * len(perm)
    for start in range(len(perm)):
        if seen[start]:
            continue
        j, length = start, 0
        while not seen[j]:
            seen[j] = True
            j = perm[j]
            length += 1
        if length % 2 == 0:
            sign = -sign
    return sign


def top_form_bruteforce(f: MaurerCartanFrame | np.ndarray) -> np.ndarray:
    """Reference implementation by explicit permutation enumeration."""
    A = f.A if isinstance(f, MaurerCartanFrame) else np.asarray(f)
    D = A.shape[-3]
    total = np.zeros(A.shape[:-3], dtype=complex)
    for perm in itertools.permutations(range(D)):
        P = A[..., perm[0], :, :]
        for i in perm[1:]:
            P = P @ A[..., i, :, :]
        total = total + permutation_sign(perm) * np.trace(P, axis1=-2, axis2=-1)
    return total
