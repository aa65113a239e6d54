import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bayes_mht.measures import (
    FiniteMeasure,
    JointDistribution,
    RandomizedKernel,
    ValidationError,
    joint_from_dict,
    joint_to_dict,
    load_instance,
    marginals,
    product,
    validate,
)


class TestValidate:
    def test_uniform_ok(self):
        assert validate(FiniteMeasure.uniform(3)) is None
        assert validate([1 / 3, 1 / 3, 1 / 3]) is None

    def test_sum_violation(self):
        v = validate([0.5, 0.6])
        assert v.invariant == "sum"
        assert str(v) == "sum=1.1"

    def test_negative_violation(self):
        v = validate([0.5, -0.1, 0.6])
        assert str(v) == "negative weight at index 1"
        assert v.magnitude == pytest.approx(-0.1)

    def test_unnormalized_allowed_when_flagged(self):
        assert validate([2.0, 3.0], normalized=False) is None
        assert validate(FiniteMeasure.counting(4)) is None

    def test_kernel_row_sum(self):
        v = validate([[0.5, 0.5], [0.2, 0.7]], kind="kernel")
        assert v.invariant == "row_sum" and v.index == (1,)

    def test_joint_negative_index(self):
        v = validate(np.array([[0.5, 0.6], [-0.1, 0.0]]))
        assert v.index == (1, 0)

    def test_constructors_raise(self):
        with pytest.raises(ValidationError, match="sum=1.1"):
            FiniteMeasure([0.5, 0.6])
        with pytest.raises(ValidationError):
            RandomizedKernel([[0.3, 0.3]])
        with pytest.raises(ValueError):
            FiniteMeasure([])

    def test_immutable(self):
        m = FiniteMeasure([0.2, 0.8])
        with pytest.raises(ValueError):
            m.weights[0] = 0.5


class TestMarginals:
    def test_ternary_prior(self, ternary):
        pv, _ = marginals(ternary)
        np.testing.assert_allclose(pv.weights, [1 / 3] * 3, atol=1e-12)

    def test_ternary_output(self, ternary):
        # column sums of the likelihood matrix divided by 3
        _, py = marginals(ternary)
        np.testing.assert_allclose(py.weights, [1 / 3, 0.94 / 3, 1.06 / 3], atol=1e-12)

    def test_identity_channel(self):
        pvy = JointDistribution.from_prior_likelihood(np.full(4, 0.25), np.eye(4))
        np.testing.assert_allclose(marginals(pvy)[1].weights, 0.25)

    def test_rejects_unnormalized(self):
        with pytest.raises(ValueError):
            marginals(JointDistribution(np.ones((2, 2)), normalized=False))


class TestProduct:
    def test_uniform_ninths(self):
        q = product(FiniteMeasure.uniform(3), FiniteMeasure([1 / 3] * 3))
        np.testing.assert_allclose(q.mass, 1 / 9)
        assert q.normalized

    def test_counting_rows(self):
        qy = FiniteMeasure([0.2, 0.5, 0.3])
        q = product(FiniteMeasure.counting(2), qy)
        assert not q.normalized
        np.testing.assert_array_equal(q.mass, [qy.weights, qy.weights])

    def test_degenerate_prior(self):
        q = product(FiniteMeasure([1.0, 0.0]), FiniteMeasure([0.3, 0.7]))
        np.testing.assert_allclose(q.mass, [[0.3, 0.7], [0.0, 0.0]])


@st.composite
def grid_vector(draw, size):
    counts = draw(st.lists(st.integers(0, 9), min_size=size, max_size=size).filter(lambda c: sum(c) > 0))
    return np.array(counts, float) / sum(counts)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_product_then_marginals_recovers_factors(m, ny, data):
    qv = data.draw(grid_vector(m))
    qy = data.draw(grid_vector(ny))
    pv, py = marginals(product(FiniteMeasure(qv), FiniteMeasure(qy)))
    np.testing.assert_allclose(pv.weights, qv, atol=1e-12)
    np.testing.assert_allclose(py.weights, qy, atol=1e-12)


@settings(max_examples=60, deadline=None)
@given(st.integers(1, 5), st.integers(1, 6), st.data())
def test_marginals_are_normalized(m, ny, data):
    mass = data.draw(grid_vector(m * ny)).reshape(m, ny)
    pv, py = marginals(JointDistribution(mass))
    assert abs(pv.total - 1) <= 1e-9 and abs(py.total - 1) <= 1e-9


def test_unnormalized_product_marginals_up_to_scale():
    qy = FiniteMeasure([0.1, 0.9])
    q = product(FiniteMeasure.counting(3), qy)
    np.testing.assert_allclose(q.mass.sum(axis=0) / q.mass.sum(), qy.weights)


class TestJson:
    def test_both_schemas_agree(self, ternary):
        a = joint_from_dict(joint_to_dict(ternary))
        b = joint_from_dict({"prior": [1 / 3] * 3, "likelihood": ternary.mass.tolist()} | {"likelihood": (ternary.mass * 3).tolist()})
        np.testing.assert_allclose(a.mass, b.mass, atol=1e-15)

    def test_declared_size_mismatch(self):
        with pytest.raises(ValueError):
            joint_from_dict({"V": 3, "Y": 1, "pvy": [[0.5], [0.5]]})

    def test_missing_keys(self):
        with pytest.raises(ValueError):
            joint_from_dict({"prior": [1.0]})

    def test_load_keeps_line_context(self, tmp_path):
        f = tmp_path / "bad.json"
        f.write_text('{\n "pvy": [[0.5,\n}')
        with pytest.raises(json.JSONDecodeError) as exc:
            load_instance(f)
        assert exc.value.lineno == 3
