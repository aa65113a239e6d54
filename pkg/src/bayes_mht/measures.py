"""Finite measures, joint distributions and randomized kernels.

Every object here is a thin immutable wrapper around a dense float64 array.
The wrappers implement ``__array__`` so they can be handed directly to numpy
and to the solvers in :mod:`bayes_mht.binary_ht`.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Optional, Sequence, Union

import numpy as np

ATOL = 1e-9

ArrayLike = Union[np.ndarray, Sequence[float], Sequence[Sequence[float]]]


class ValidationError(ValueError):
    """Raised when data violates a measure, joint or kernel invariant."""

    def __init__(self, violation: "Violation"):
        super().__init__(str(violation))
        self.violation = violation


@dataclass(frozen=True)
class Violation:
    """First invariant broken by some array, with where and by how much."""

    invariant: str
    index: Optional[tuple] = None
    magnitude: float = float("nan")

    def __str__(self) -> str:
        if self.invariant == "negative":
            idx = self.index[0] if self.index and len(self.index) == 1 else self.index
            return f"negative weight at index {idx}"
        if self.invariant == "sum":
            return f"sum={self.magnitude:.12g}"
        if self.invariant == "row_sum":
            return f"row {self.index[0]} sums to {self.magnitude:.12g}"
        if self.invariant == "above_one":
            return f"entry above 1 at index {self.index}"
        if self.invariant == "nonfinite":
            return f"non-finite entry at index {self.index}"
        return self.invariant


def _frozen(values: ArrayLike, ndim: int) -> np.ndarray:
    arr = np.array(values, dtype=np.float64)
    if arr.ndim != ndim:
        raise ValueError(f"expected a {ndim}-d array, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("alphabets must be nonempty")
    arr.setflags(write=False)
    return arr


def _first_bad(arr: np.ndarray, mask: np.ndarray) -> tuple:
    return tuple(int(i) for i in np.argwhere(mask)[0])


def _check_entries(arr: np.ndarray) -> Optional[Violation]:
    bad = ~np.isfinite(arr)
    if bad.any():
        return Violation("nonfinite", _first_bad(arr, bad))
    neg = arr < 0
    if neg.any():
        idx = _first_bad(arr, neg)
        return Violation("negative", idx, float(arr[idx]))
    return None


def validate_measure(weights: ArrayLike, normalized: bool = True) -> Optional[Violation]:
    arr = np.asarray(weights, dtype=np.float64)
    if arr.ndim != 1 or arr.size == 0:
        return Violation("alphabet_size must be >= 1 and weights 1-d")
    v = _check_entries(arr)
    if v is not None:
        return v
    total = float(arr.sum())
    if normalized and abs(total - 1.0) > ATOL:
        return Violation("sum", None, total)
    return None


def validate_joint(mass: ArrayLike, normalized: bool = True) -> Optional[Violation]:
    arr = np.asarray(mass, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        return Violation("joint mass must be a nonempty 2-d matrix")
    v = _check_entries(arr)
    if v is not None:
        return v
    total = float(arr.sum())
    if normalized and abs(total - 1.0) > ATOL:
        return Violation("sum", None, total)
    return None


def validate_kernel(rows: ArrayLike) -> Optional[Violation]:
    arr = np.asarray(rows, dtype=np.float64)
    if arr.ndim != 2 or arr.size == 0:
        return Violation("kernel must be a nonempty 2-d matrix")
    v = _check_entries(arr)
    if v is not None:
        return v
    above = arr > 1.0 + ATOL
    if above.any():
        return Violation("above_one", _first_bad(arr, above), float(arr[above][0]))
    sums = arr.sum(axis=1)
    off = np.abs(sums - 1.0) > ATOL
    if off.any():
        i = int(np.argmax(off))
        return Violation("row_sum", (i,), float(sums[i]))
    return None


@dataclass(frozen=True, eq=False)
class FiniteMeasure:
    """Nonnegative weights over ``{0, ..., n-1}``.

    ``normalized=False`` admits arbitrary nonnegative mass, e.g. the counting
    measure returned by :meth:`counting`.
    """

    weights: np.ndarray
    normalized: bool = True
    labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "weights", _frozen(self.weights, 1))
        violation = validate_measure(self.weights, self.normalized)
        if violation is not None:
            raise ValidationError(violation)

    @classmethod
    def uniform(cls, size: int) -> "FiniteMeasure":
        return cls(np.full(size, 1.0 / size))

    @classmethod
    def counting(cls, size: int) -> "FiniteMeasure":
        return cls(np.ones(size), normalized=False)

    @property
    def alphabet_size(self) -> int:
        return self.weights.size

    @property
    def total(self) -> float:
        return float(self.weights.sum())

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.weights, dtype=dtype)

    def __len__(self) -> int:
        return self.weights.size


@dataclass(frozen=True, eq=False)
class JointDistribution:
    """Dense ``M x |Y|`` mass matrix indexed ``[v, y]``."""

    mass: np.ndarray
    normalized: bool = True
    v_labels: Optional[tuple] = field(default=None, compare=False)
    y_labels: Optional[tuple] = field(default=None, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "mass", _frozen(self.mass, 2))
        violation = validate_joint(self.mass, self.normalized)
        if violation is not None:
            raise ValidationError(violation)

    @classmethod
    def from_prior_likelihood(cls, prior: ArrayLike, likelihood: ArrayLike) -> "JointDistribution":
        """Build ``P_VY(v, y) = P_V(v) P_{Y|V}(y|v)``; rows of ``likelihood`` indexed by v."""
        prior_m = FiniteMeasure(prior)
        lik = np.asarray(likelihood, dtype=np.float64)
        if lik.ndim != 2 or lik.shape[0] != prior_m.alphabet_size:
            raise ValueError(
                f"likelihood shape {lik.shape} incompatible with prior of size "
                f"{prior_m.alphabet_size}"
            )
        violation = validate_kernel(lik)
        if violation is not None:
            raise ValidationError(violation)
        return cls(prior_m.weights[:, None] * lik)

    @property
    def num_hypotheses(self) -> int:
        return self.mass.shape[0]

    @property
    def num_observations(self) -> int:
        return self.mass.shape[1]

    @property
    def shape(self) -> tuple:
        return self.mass.shape

    def flatten(self) -> np.ndarray:
        return self.mass.ravel()

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.mass, dtype=dtype)


@dataclass(frozen=True, eq=False)
class RandomizedKernel:
    """Row-stochastic matrix ``rows[input, output]``.

    A decoder ``P_{V^|Y}`` has ``|Y|`` inputs and ``M`` outputs; a binary test
    has two outputs with column 0 holding the accept probability.
    """

    rows: np.ndarray

    def __post_init__(self):
        object.__setattr__(self, "rows", _frozen(self.rows, 2))
        violation = validate_kernel(self.rows)
        if violation is not None:
            raise ValidationError(violation)

    @classmethod
    def deterministic(cls, choice: Sequence[int], num_outputs: int) -> "RandomizedKernel":
        choice = np.asarray(choice, dtype=int)
        rows = np.zeros((choice.size, num_outputs))
        rows[np.arange(choice.size), choice] = 1.0
        return cls(rows)

    @property
    def num_inputs(self) -> int:
        return self.rows.shape[0]

    @property
    def num_outputs(self) -> int:
        return self.rows.shape[1]

    def __array__(self, dtype=None, copy=None):
        return np.asarray(self.rows, dtype=dtype)


Validatable = Union[FiniteMeasure, JointDistribution, RandomizedKernel, ArrayLike]


def validate(obj: Validatable, *, normalized: bool = True, kind: Optional[str] = None) -> Optional[Violation]:
    """Return the first broken invariant of ``obj``, or ``None`` if it is valid.

    Raw arrays are checked as a measure (1-d) or a joint (2-d) unless
    ``kind="kernel"`` is given.
    """
    if isinstance(obj, FiniteMeasure):
        return validate_measure(obj.weights, obj.normalized)
    if isinstance(obj, JointDistribution):
        return validate_joint(obj.mass, obj.normalized)
    if isinstance(obj, RandomizedKernel):
        return validate_kernel(obj.rows)
    arr = np.asarray(obj, dtype=np.float64)
    if kind == "kernel":
        return validate_kernel(arr)
    if kind == "joint" or arr.ndim == 2:
        return validate_joint(arr, normalized)
    return validate_measure(arr, normalized)


def marginals(pvy: JointDistribution) -> tuple[FiniteMeasure, FiniteMeasure]:
    """Prior ``P_V`` (row sums) and output law ``P_Y`` (column sums)."""
    if not pvy.normalized:
        raise ValueError("marginals require a normalized joint distribution")
    return FiniteMeasure(pvy.mass.sum(axis=1)), FiniteMeasure(pvy.mass.sum(axis=0))


def product(qv: FiniteMeasure, qy: FiniteMeasure) -> JointDistribution:
    """Product measure ``Q_V x Q_Y``; normalized only if both factors are."""
    if not isinstance(qv, FiniteMeasure) or not isinstance(qy, FiniteMeasure):
        raise TypeError("product expects two FiniteMeasure factors")
    return JointDistribution(
        np.outer(qv.weights, qy.weights),
        normalized=qv.normalized and qy.normalized,
    )


# --- JSON ingestion -------------------------------------------------------


def joint_from_dict(data: dict[str, Any]) -> JointDistribution:
    """Parse ``{"V", "Y", "pvy"}`` or ``{"prior", "likelihood"}`` instance data."""
    if "pvy" in data:
        mass = np.asarray(data["pvy"], dtype=np.float64)
        for key, axis in (("V", 0), ("Y", 1)):
            if key in data and mass.ndim == 2 and int(data[key]) != mass.shape[axis]:
                raise ValueError(f"declared {key}={data[key]} but pvy has shape {mass.shape}")
        return JointDistribution(mass)
    if "prior" in data and "likelihood" in data:
        return JointDistribution.from_prior_likelihood(data["prior"], data["likelihood"])
    raise ValueError('instance needs either "pvy" or both "prior" and "likelihood"')


def joint_to_dict(pvy: JointDistribution) -> dict[str, Any]:
    return {"V": pvy.num_hypotheses, "Y": pvy.num_observations, "pvy": pvy.mass.tolist()}


def load_instance(path: Union[str, Path]) -> dict[str, Any]:
    """Read a JSON instance file; parse errors keep their line/column context."""
    text = Path(path).read_text()
    return json.loads(text)
