"""Exact agreement between the vectorized estimators and literal brute force.

One hundred random matrices, dimensions up to 20 x 4, entries drawn from a
small integer lattice so ties are frequent and the >=-count tie rule is
genuinely exercised.
"""

from __future__ import annotations

import numpy as np
import pytest
from numpy.testing import assert_allclose, assert_array_equal

from hrvkit import (
    SampleMatrix,
    anti_ranks,
    estimate_spectral_rank,
    estimate_spectral_standard,
    rank_transform,
)

from oracles import (
    oracle_anti_ranks,
    oracle_rank_values,
    oracle_spectral_rank,
    oracle_spectral_standard,
)


def _random_case(rng):
    n = int(rng.integers(1, 21))
    d = int(rng.integers(2, 5))
    if rng.random() < 0.5:
        values = rng.integers(0, 7, size=(n, d)).astype(float)  # tie-heavy
    else:
        values = np.round(rng.pareto(1.0, size=(n, d)) + 1.0, 2)
    level = int(rng.integers(1, d + 1))
    k = int(rng.integers(1, n + 1))
    return values, level, k


CASES = [_random_case(np.random.default_rng(1000 + i)) for i in range(100)]


@pytest.mark.parametrize("case", range(100))
def test_all_estimators_match_brute_force(case):
    values, level, k = CASES[case]
    sm = SampleMatrix(values)

    assert_array_equal(anti_ranks(sm), oracle_anti_ranks(values))

    rt = rank_transform(sm, level)
    expected_m = oracle_rank_values(values, level)
    assert_array_equal(rt.values, expected_m)
    assert_array_equal(rt.order_stats, np.array(sorted(expected_m, reverse=True)))

    standard = oracle_spectral_standard(values, level, k)
    if standard is None:
        with pytest.raises(Exception):
            estimate_spectral_standard(sm, level, k)
    else:
        atoms = estimate_spectral_standard(sm, level, k)
        assert_array_equal(atoms.points, standard[0])
        assert_allclose(atoms.weights, standard[1], rtol=1e-15)

    pts, w = oracle_spectral_rank(values, level, k)
    atoms = estimate_spectral_rank(sm, level, k)
    assert_array_equal(atoms.points, pts)
    assert_allclose(atoms.weights, w, rtol=1e-15)
