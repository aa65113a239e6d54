from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayes_mht.lossy import (
    DistortionSpec,
    LossyCode,
    best_codebook,
    codebook_auxiliary,
    codebook_free_bound,
    codebook_free_budget,
    covered,
    excess_distortion,
    excess_distortion_exact,
    lsc_test_budget,
)
from bayes_mht.measures import FiniteMeasure

SOURCE = np.array([0.4, 0.3, 0.2, 0.1])


def test_four_symbol_source():
    spec = DistortionSpec.identity(4, 0.0)
    assert excess_distortion(SOURCE, spec, [0, 1]) == pytest.approx(0.3)
    assert excess_distortion_exact(SOURCE, spec, [0, 1]) == pytest.approx(0.3, abs=1e-12)
    assert codebook_free_bound(SOURCE, spec, 2) == pytest.approx(0.3, abs=1e-12)


def test_auxiliary_is_uniform_on_misses():
    spec = DistortionSpec.identity(4, 0.0)
    aux = codebook_auxiliary(spec, [0, 1])
    np.testing.assert_allclose(aux.weights, [0, 0, 0.5, 0.5])
    assert lsc_test_budget(aux, spec, [0, 1]) == 0.0


def test_full_coverage():
    spec = DistortionSpec.identity(3, 1.0)
    assert covered(spec, [0]).all()
    assert codebook_auxiliary(spec, [0]) is None
    assert excess_distortion_exact(np.array([0.5, 0.3, 0.2]), spec, [0]) == 0.0


def test_point_mass_rejected():
    with pytest.raises(ValueError):
        excess_distortion_exact(np.array([1.0, 0.0]), DistortionSpec.identity(2), [0])


def test_spec_validation():
    with pytest.raises(ValueError):
        DistortionSpec(np.array([[0.0, -1.0]]), 0.0)
    with pytest.raises(ValueError):
        DistortionSpec(np.eye(2), -0.5)
    with pytest.raises(ValueError):
        LossyCode((1, 1))
    with pytest.raises(ValueError):
        excess_distortion(SOURCE, DistortionSpec.identity(4), [7])


def test_codebook_free_budget():
    spec = DistortionSpec(np.array([[0, 1, 2], [1, 0, 1], [2, 1, 0]], float), 1.0)
    # the middle reconstruction covers all three symbols
    assert codebook_free_budget(np.full(3, 1 / 3), spec, 2) == pytest.approx(2.0)


def _random_instance(rng):
    nv, nw = int(rng.integers(2, 9)), int(rng.integers(1, 7))
    pv = rng.dirichlet(np.ones(nv))
    d = rng.integers(0, 4, size=(nv, nw)).astype(float)
    D = float(rng.integers(0, 3))
    return pv, DistortionSpec(d, D)


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_exact_form_equals_excess_distortion(seed):
    rng = np.random.default_rng(seed)
    pv, spec = _random_instance(rng)
    M = int(rng.integers(1, spec.reconstruction_size + 1))
    for C in combinations(range(spec.reconstruction_size), M):
        assert abs(excess_distortion_exact(pv, spec, C) - excess_distortion(pv, spec, C)) <= 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_codebook_free_bound_below_every_codebook(seed):
    rng = np.random.default_rng(seed)
    pv, spec = _random_instance(rng)
    M = int(rng.integers(1, spec.reconstruction_size + 1))
    qv = FiniteMeasure(rng.dirichlet(np.ones(spec.source_size)))
    _, best = best_codebook(pv, spec, M)
    assert codebook_free_bound(pv, spec, M) <= best + 1e-9
    assert codebook_free_bound(pv, spec, M, qv) <= best + 1e-9


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_zero_distortion_uniform_auxiliary_is_tight(seed):
    # with Hamming distortion and D = 0 the best codebook keeps the M likeliest symbols
    rng = np.random.default_rng(seed)
    n = int(rng.integers(2, 9))
    M = int(rng.integers(1, n + 1))
    pv = rng.dirichlet(np.ones(n))
    spec = DistortionSpec.identity(n, 0.0)
    expected = 1.0 - np.sort(pv)[::-1][:M].sum()
    assert abs(best_codebook(pv, spec, M)[1] - expected) <= 1e-12
    assert abs(codebook_free_bound(pv, spec, M) - expected) <= 1e-9
