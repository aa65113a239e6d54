"""M-ary Bayesian hypothesis testing.

The minimum error probability of guessing ``V`` from ``Y`` equals both the
type-0 error of an induced binary test between ``P_VY`` and a product
``Q_V x Q_Y`` at type-1 budget ``1/M``, and the supremum of an
information-spectrum objective. Each identity is exposed here as an
evaluator for a given auxiliary measure, together with the closed-form
auxiliary measure that attains it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .binary_ht import alpha_beta, jump_points, likelihood_ratio
from .measures import FiniteMeasure, JointDistribution, RandomizedKernel, product

# relative tolerance for argmax tie sets
ARGMAX_RTOL = 1e-9


@dataclass(frozen=True)
class MapSolution:
    error: float
    mu: float
    qy_star: FiniteMeasure
    decoder: RandomizedKernel
    tie_sets: tuple


def _mass(pvy) -> np.ndarray:
    if isinstance(pvy, JointDistribution):
        return pvy.mass
    return JointDistribution(pvy).mass


def argmax_sets(scores: np.ndarray) -> np.ndarray:
    """Boolean ``M x |Y|`` mask of the per-column maximizers of ``scores``.

    A column whose maximum is zero (an impossible observation under a joint
    law) marks every hypothesis.
    """
    scores = np.asarray(scores, dtype=np.float64)
    top = scores.max(axis=0)
    mask = scores >= top - ARGMAX_RTOL * np.abs(top)
    mask[:, top == 0] = True
    return mask


def _uniform_split(mask: np.ndarray) -> RandomizedKernel:
    rows = (mask / mask.sum(axis=0)).T
    return RandomizedKernel(rows)


def map_solve(pvy: JointDistribution) -> MapSolution:
    """MAP decoder with uniform tie-splitting and its error ``1 - sum_y max_v P_VY(v, y)``."""
    mass = _mass(pvy)
    col_max = mass.max(axis=0)
    mu = float(col_max.sum())
    mask = argmax_sets(mass)
    tie_sets = tuple(tuple(int(v) for v in np.flatnonzero(mask[:, y])) for y in range(mass.shape[1]))
    return MapSolution(
        error=1.0 - mu,
        mu=mu,
        qy_star=FiniteMeasure(col_max / mu),
        decoder=_uniform_split(mask),
        tie_sets=tie_sets,
    )


def _decoder_rows(decoder, shape: tuple) -> np.ndarray:
    rows = np.asarray(decoder, dtype=np.float64)
    m, ny = shape
    if rows.shape != (ny, m):
        raise ValueError(f"decoder must map {ny} observations to {m} hypotheses, got shape {rows.shape}")
    return rows


def decoder_error(pvy: JointDistribution, decoder: RandomizedKernel) -> float:
    """``Pr[V^ != V] = 1 - sum_{v,y} P_VY(v, y) P_{V^|Y}(v|y)``."""
    mass = _mass(pvy)
    rows = _decoder_rows(decoder, mass.shape)
    return float(1.0 - np.sum(mass * rows.T))


def type1_of_decoder(qvy, decoder: RandomizedKernel) -> float:
    """``sum_{v,y} Q_VY(v, y) P_{V^|Y}(v|y)``: the decoder's type-1 error under ``Q_VY``."""
    q = np.asarray(qvy, dtype=np.float64)
    rows = _decoder_rows(decoder, q.shape)
    return float(np.sum(q * rows.T))


def _check_qy(qy, ny: int) -> np.ndarray:
    w = np.asarray(qy, dtype=np.float64).ravel()
    if w.size != ny:
        raise ValueError(f"Q_Y has {w.size} entries, expected {ny}")
    return w


def product_meta_converse(pvy: JointDistribution, qy: FiniteMeasure) -> float:
    """``alpha_{1/M}(P_VY, U_V x Q_Y)`` with uniform ``U_V``.

    A lower bound on the MAP error for every ``Q_Y``; equal to it at
    :attr:`MapSolution.qy_star`.
    """
    mass = _mass(pvy)
    m = mass.shape[0]
    q = np.outer(np.full(m, 1.0 / m), _check_qy(qy, mass.shape[1]))
    return alpha_beta(mass.ravel(), q.ravel(), 1.0 / m).alpha


def spectrum_objective(pvy: JointDistribution, qy: FiniteMeasure) -> tuple[np.ndarray, np.ndarray]:
    """``gamma -> Pr[P_VY(V,Y)/Q_Y(Y) <= gamma] - gamma`` evaluated at its jump points."""
    mass = _mass(pvy)
    q = np.broadcast_to(_check_qy(qy, mass.shape[1]), mass.shape)
    gammas, tails = jump_points(likelihood_ratio(mass, q), mass)
    return gammas, tails - gammas


def spectrum_bound(pvy: JointDistribution, qy: FiniteMeasure) -> tuple[float, float]:
    """Exact ``sup_gamma {Pr[P_VY/Q_Y <= gamma] - gamma}`` and its smallest maximizer."""
    gammas, values = spectrum_objective(pvy, qy)
    i = int(np.argmax(values))
    return float(values[i]), float(gammas[i])


def decoder_meta_converse(pvy: JointDistribution, qvy, decoder: RandomizedKernel) -> tuple[float, float]:
    """``(alpha_{eps1}(P_VY, Q_VY), eps1)`` where ``eps1`` is the decoder's type-1 error under ``Q_VY``.

    ``alpha`` lower-bounds :func:`decoder_error` for any probability ``Q_VY``
    and equals it at ``Q_VY = P_VY``.
    """
    mass = _mass(pvy)
    q = _mass(qvy)
    if q.shape != mass.shape:
        raise ValueError(f"Q_VY shape {q.shape} differs from P_VY shape {mass.shape}")
    eps1 = type1_of_decoder(q, decoder)
    return alpha_beta(mass.ravel(), q.ravel(), eps1).alpha, eps1


def decoder_spectrum_bound(pvy: JointDistribution, qvy, decoder: RandomizedKernel) -> tuple[float, float]:
    """``sup_gamma {Pr[P_VY/Q_VY <= gamma] - gamma eps1}`` and its smallest maximizer."""
    mass = _mass(pvy)
    q = _mass(qvy)
    if q.shape != mass.shape:
        raise ValueError(f"Q_VY shape {q.shape} differs from P_VY shape {mass.shape}")
    eps1 = type1_of_decoder(q, decoder)
    gammas, tails = jump_points(likelihood_ratio(mass, q), mass)
    values = tails - gammas * eps1
    i = int(np.argmax(values))
    return float(values[i]), float(gammas[i])


def max_metric_decoder(q) -> RandomizedKernel:
    """Decoder choosing ``argmax_v q(v, y)``, splitting ties uniformly."""
    scores = np.asarray(q, dtype=np.float64)
    if scores.ndim != 2 or not np.all(np.isfinite(scores)):
        raise ValueError("metric must be a finite M x |Y| matrix")
    top = scores.max(axis=0)
    mask = scores >= top - ARGMAX_RTOL * np.abs(top)
    return _uniform_split(mask)


def metric_auxiliary(pvy: JointDistribution, q) -> tuple[JointDistribution, float]:
    """Auxiliary law making :func:`decoder_meta_converse` tight for the max-metric decoder.

    ``Q(v, y) = P_VY(v, y) max_v' q(v', y) / q(v, y) / mu'``; entries with
    ``P_VY(v, y) = 0`` are zero whatever ``q`` is there.
    """
    mass = _mass(pvy)
    scores = np.asarray(q, dtype=np.float64)
    if scores.shape != mass.shape:
        raise ValueError(f"metric shape {scores.shape} differs from P_VY shape {mass.shape}")
    if not np.all(np.isfinite(scores)):
        raise ValueError("metric must be finite")
    support = mass > 0
    if np.any(scores[support] <= 0):
        raise ValueError("metric must be positive wherever P_VY is positive")
    top = scores.max(axis=0)
    unnorm = np.zeros_like(mass)
    unnorm[support] = mass[support] * np.broadcast_to(top, mass.shape)[support] / scores[support]
    mu_prime = float(unnorm.sum())
    return JointDistribution(unnorm / mu_prime), mu_prime


def counting_meta_converse(pvy: JointDistribution, qy: FiniteMeasure | None = None) -> float:
    """``alpha_1(P_VY, C_V x Q_Y)`` with ``C_V`` the counting measure; defaults to ``Q_Y = qy_star``."""
    mass = _mass(pvy)
    if qy is None:
        qy = map_solve(pvy).qy_star
    elif not isinstance(qy, FiniteMeasure):
        qy = FiniteMeasure(qy)
    q = product(FiniteMeasure.counting(mass.shape[0]), qy)
    return alpha_beta(mass.ravel(), q.flatten(), 1.0).alpha
