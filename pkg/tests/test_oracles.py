"""The frozen oracle values used across the suite are reproduced by the oracles."""

import numpy as np

import oracles


def test_bi_invariance_oracle_value():
    assert abs(oracles.su2_bi_invariant_degree() - oracles.SU2_GENERATOR_DEGREE) <= 1e-14


def test_preimage_oracle_value():
    deg, pre, signs = oracles.clutch_mapping_degree()
    assert deg == oracles.CLUTCH_MAPPING_DEGREE
    assert len(pre) == len(signs) >= 1


def test_preimage_oracle_is_independent_of_regular_value():
    rng = np.random.default_rng(7)
    for _ in range(3):
        y = rng.standard_normal(4)
        assert oracles.clutch_mapping_degree(y)[0] == oracles.CLUTCH_MAPPING_DEGREE


def test_clutch_map_is_based():
    # the north pole of S^2 maps every fibre point to the identity quaternion
    for t in np.linspace(0, 2 * np.pi, 7):
        np.testing.assert_allclose(oracles.clutch_map(np.array([0.0, 0.3, t])), [1, 0, 0, 0], atol=1e-15)


def test_chart_orientation_oracle():
    assert oracles.product_chart_orientation() == 1
