import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

import truth_tables
from symdeg.certify import (
    ASSERTED,
    FAIL,
    PASS,
    UNASSERTED,
    WU_REQUIRED,
    HypothesisChecklist,
    best_bound,
    certify_nonorientable,
    certify_sw,
    certify_wu,
)


def test_wu_examples():
    c = certify_wu(1, 6, 3)
    assert c.granted and c.bound == 2 and c.q == 4
    assert "covering dimension of B >= 2" in c.bound_text
    assert "disconnects" in c.topology_clause
    c = certify_wu(3, 6, 3)
    assert not c.granted and "divisible" in c.reason
    c = certify_wu(1, 4, 5)
    assert not c.granted and "d/2 + 1" in c.reason


def test_sw_examples():
    assert certify_sw(1, 5, 2).bound == 3
    assert not certify_sw(2, 5, 2).granted
    assert certify_sw(1, 7, 4).bound == 3


@pytest.mark.parametrize("p", [2, 4, 9, 1])
def test_wu_rejects_non_odd_primes(p):
    with pytest.raises(ValueError, match="odd prime"):
        certify_wu(1, 20, p)


@pytest.mark.parametrize("q", [6, 3, 0])
def test_sw_rejects_other_spheres(q):
    with pytest.raises(ValueError):
        certify_sw(1, 10, q)


def test_truth_tables():
    for (deg, d, p), bound in truth_tables.WU.items():
        c = certify_wu(deg, d, p)
        assert (c.bound if c.granted else None) == bound, (deg, d, p)
    for (deg, d, q), bound in truth_tables.SW.items():
        c = certify_sw(deg, d, q)
        assert (c.bound if c.granted else None) == bound, (deg, d, q)


def test_best_bound():
    out = best_bound([certify_sw(1, 6, 2), certify_sw(1, 6, 4)])
    assert out["best_bound"] == 4
    assert best_bound([certify_sw(0, 6, 2)])["text"] == "no certificate"
    assert best_bound([certify_wu(2, 8, 5)])["best_bound"] == 0
    assert "first Wu class" in out["note"]


@given(st.integers(-50, 50), st.sampled_from([4, 6, 8, 10, 12]), st.sampled_from([3, 5, 7]))
def test_wu_depends_on_residue_only(deg, d, p):
    assert certify_wu(deg, d, p).granted == certify_wu(deg % p, d, p).granted


@given(st.integers(-50, 50), st.integers(4, 12), st.sampled_from([2, 4]))
def test_sw_depends_on_parity_only(deg, d, q):
    assert certify_sw(deg, d, q).granted == certify_sw(deg % 2, d, q).granted


@given(st.sampled_from(WU_REQUIRED), st.integers(1, 5))
def test_no_grant_with_failed_hypothesis(name, deg):
    cl = HypothesisChecklist(**{name: FAIL})
    assert not certify_wu(deg, 8, 3, cl).granted
    if name in ("h1_interior_ellipticity", "h2_invertible_at_nu", "h3_interior_locality"):
        assert not certify_sw(deg, 8, 2, cl).granted


def test_unasserted_hypotheses_refuse():
    cl = HypothesisChecklist.unasserted(h1_interior_ellipticity=PASS)
    c = certify_sw(1, 5, 2, cl)
    assert not c.granted and "h1_lopatinskij" in c.reason
    c = certify_wu(1, 6, 3, HypothesisChecklist(lambda_orientable=UNASSERTED))
    assert not c.granted and "orientable" in c.reason


def test_granted_wu_rechecks_unit():
    for p in (3, 5, 7, 11, 13):
        c = certify_wu(1, 2 * (p - 1), p)
        assert c.granted
        r = (p - 1) // 2
        unit = r * math.factorial(2 * r - 1)
        assert math.gcd(unit, p) == 1
        assert f"gcd({unit}, {p}) = 1" in c.arithmetic_trace[1]
        assert "orientability of the index bundle" in c.arithmetic_trace[-1]


def test_checklist_recorded_verbatim():
    cl = HypothesisChecklist(h1_lopatinskij=ASSERTED, h1_interior_ellipticity=PASS, lambda_dimension=5)
    d = certify_sw(1, 5, 2, cl).to_dict()
    assert d["checklist"]["h1_lopatinskij"] == "asserted"
    assert d["checklist"]["h1_interior_ellipticity"] == "PASS"
    assert d["status"] == "GRANT"


def test_nonorientable_route():
    c = certify_nonorientable(6)
    assert c.granted and c.bound == 5
    assert not certify_nonorientable(6, HypothesisChecklist(h1_lopatinskij=FAIL)).granted
