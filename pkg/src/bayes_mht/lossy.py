"""Fixed-length lossy compression: excess-distortion probability of a
codebook, its exact binary-test characterization and the codebook-free
converse obtained by relaxing the test's type-1 error.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from .binary_ht import alpha_beta
from .measures import FiniteMeasure


@dataclass(frozen=True, eq=False)
class DistortionSpec:
    """Distortion matrix ``d[v, w]`` and the largest tolerated distortion ``D``."""

    d: np.ndarray
    D: float

    def __post_init__(self):
        d = np.array(self.d, dtype=np.float64)
        if d.ndim != 2 or d.size == 0:
            raise ValueError("distortion must be a nonempty source x reconstruction matrix")
        if not np.all(np.isfinite(d)) or np.any(d < 0):
            raise ValueError("distortion entries must be finite and nonnegative")
        if not np.isfinite(self.D) or self.D < 0:
            raise ValueError(f"threshold D must be finite and nonnegative, got {self.D}")
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        object.__setattr__(self, "D", float(self.D))

    @classmethod
    def identity(cls, size: int, D: float = 0.0) -> "DistortionSpec":
        """Hamming distortion ``1{v != w}`` on a common alphabet."""
        return cls(1.0 - np.eye(size), D)

    @property
    def source_size(self) -> int:
        return self.d.shape[0]

    @property
    def reconstruction_size(self) -> int:
        return self.d.shape[1]

    def covered_by(self, w) -> np.ndarray:
        """Mask of source symbols within distortion ``D`` of reconstruction(s) ``w``."""
        cols = np.atleast_1d(np.asarray(w, dtype=int))
        return (self.d[:, cols] <= self.D).any(axis=1)


@dataclass(frozen=True)
class LossyCode:
    codewords: tuple

    def __post_init__(self):
        words = tuple(int(w) for w in self.codewords)
        if not words:
            raise ValueError("a codebook needs at least one codeword")
        if len(set(words)) != len(words):
            raise ValueError(f"codewords must be distinct: {words}")
        object.__setattr__(self, "codewords", words)

    @property
    def M(self) -> int:
        return len(self.codewords)


def _code(spec: DistortionSpec, C) -> LossyCode:
    code = C if isinstance(C, LossyCode) else LossyCode(tuple(C))
    if any(w < 0 or w >= spec.reconstruction_size for w in code.codewords):
        raise ValueError(f"codewords must index the reconstruction alphabet of size {spec.reconstruction_size}")
    return code


def _source(P, spec: DistortionSpec) -> np.ndarray:
    w = np.asarray(P, dtype=np.float64).ravel()
    if w.size != spec.source_size:
        raise ValueError(f"source law has {w.size} entries, distortion matrix has {spec.source_size} rows")
    return w


def covered(spec: DistortionSpec, C) -> np.ndarray:
    """``1{d(v, C) <= D}`` with ``d(v, C) = min_{w in C} d(v, w)``."""
    return spec.covered_by(list(_code(spec, C).codewords))


def excess_distortion(pv: FiniteMeasure, spec: DistortionSpec, C) -> float:
    """``Pr[d(V, C) > D]`` under the minimum-distortion encoder."""
    return float(_source(pv, spec)[~covered(spec, C)].sum())


def lsc_test_budget(qv: FiniteMeasure, spec: DistortionSpec, C) -> float:
    """``Q[d(V, C) <= D]``: type-1 error of the test that accepts covered symbols."""
    return float(_source(qv, spec)[covered(spec, C)].sum())


def codebook_auxiliary(spec: DistortionSpec, C) -> FiniteMeasure | None:
    """Uniform law on the uncovered source symbols, or ``None`` if every symbol is covered."""
    miss = ~covered(spec, C)
    if not miss.any():
        return None
    return FiniteMeasure(miss / miss.sum())


def excess_distortion_exact(pv: FiniteMeasure, spec: DistortionSpec, C) -> float:
    """``alpha_{Q[d(V,C) <= D]}(P_V, Q_V)`` at the maximizing ``Q_V`` (uniform on uncovered symbols).

    Equals :func:`excess_distortion`. Requires ``P_V(v) < 1`` for all ``v``.
    """
    p = _source(pv, spec)
    if np.any(p >= 1.0):
        raise ValueError("source law must not be a point mass (need P_V(v) < 1 for all v)")
    aux = codebook_auxiliary(spec, C)
    if aux is None:
        return 0.0
    return alpha_beta(p, aux.weights, lsc_test_budget(aux, spec, C)).alpha


def codebook_free_budget(qv: FiniteMeasure, spec: DistortionSpec, M: int) -> float:
    """``M max_w Q[d(V, w) <= D]`` over the whole reconstruction alphabet."""
    q = _source(qv, spec)
    per_w = np.where(spec.d <= spec.D, q[:, None], 0.0).sum(axis=0)
    return float(M * per_w.max())


def codebook_free_bound(pv: FiniteMeasure, spec: DistortionSpec, M: int, qv: FiniteMeasure | None = None) -> float:
    """``alpha_{M max_w Q[d(V,w) <= D]}(P_V, Q_V)``; lower-bounds the excess distortion of every size-``M`` codebook."""
    if M < 1:
        raise ValueError("M must be positive")
    p = _source(pv, spec)
    q = np.full(p.size, 1.0 / p.size) if qv is None else _source(qv, spec)
    return alpha_beta(p, q, codebook_free_budget(q, spec, M)).alpha


def best_codebook(pv: FiniteMeasure, spec: DistortionSpec, M: int) -> tuple[LossyCode, float]:
    """Smallest excess distortion over all codebooks of ``M`` distinct reconstructions."""
    best = None
    for words in combinations(range(spec.reconstruction_size), M):
        err = excess_distortion(pv, spec, words)
        if best is None or err < best[1] - 1e-15:
            best = (LossyCode(words), err)
    if best is None:
        raise ValueError(f"no codebook of size {M} over {spec.reconstruction_size} reconstructions")
    return best
