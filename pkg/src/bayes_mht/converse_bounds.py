"""Classical converse bounds on the minimum M-ary error probability.

Every sweep is evaluated exactly at the jump points of the relevant tail
probability (plus ``gamma = 0``); between jumps each objective decreases
linearly in ``gamma``, so no grid can do better.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional

import numpy as np

from .binary_ht import alpha_beta, jump_points, likelihood_ratio, ratio_leq
from .measures import ATOL, FiniteMeasure, JointDistribution, marginals
from .mary_ht import map_solve


@dataclass(frozen=True)
class GammaSweep:
    gammas: np.ndarray
    values: np.ndarray

    @property
    def best_index(self) -> int:
        return int(np.argmax(self.values))

    @property
    def best(self) -> tuple[float, float]:
        """``(gamma*, value*)``; the smallest maximizing gamma on ties."""
        i = self.best_index
        return float(self.gammas[i]), float(self.values[i])

    @property
    def value(self) -> float:
        return float(self.values[self.best_index])

    @property
    def gamma(self) -> float:
        return float(self.gammas[self.best_index])


def _qy_weights(pvy: JointDistribution, qy) -> np.ndarray:
    if qy is None:
        return marginals(pvy)[1].weights
    w = np.asarray(qy, dtype=np.float64).ravel()
    if w.size != pvy.num_observations:
        raise ValueError(f"Q_Y has {w.size} entries, expected {pvy.num_observations}")
    return w


def _joint_ratio(pvy: JointDistribution, qy_w: np.ndarray) -> np.ndarray:
    return likelihood_ratio(pvy.mass, np.broadcast_to(qy_w, pvy.mass.shape))


def verdu_han(pvy: JointDistribution, qy: Optional[FiniteMeasure] = None) -> GammaSweep:
    """``sup_gamma {Pr[P_VY(V,Y)/Q_Y(Y) <= gamma] - gamma}``; ``Q_Y`` defaults to ``P_Y``."""
    qy_w = _qy_weights(pvy, qy)
    gammas, tails = jump_points(_joint_ratio(pvy, qy_w), pvy.mass)
    return GammaSweep(gammas, tails - gammas)


def _require_positive_prior(pvy: JointDistribution) -> np.ndarray:
    prior = pvy.mass.sum(axis=1)
    if np.any(prior <= 0):
        raise ValueError(f"hypothesis {int(np.argmin(prior))} has zero prior probability")
    return prior


def wolfowitz(pvy: JointDistribution, qy: Optional[FiniteMeasure] = None) -> GammaSweep:
    """``sup_gamma min_v {Pr[P_VY(v,Y)/Q_Y(Y) <= gamma | V = v] - gamma}``.

    The per-hypothesis brackets are step functions minus ``gamma``, so the
    pointwise minimum only changes slope at the union of their jumps.
    """
    prior = _require_positive_prior(pvy)
    qy_w = _qy_weights(pvy, qy)
    ratio = _joint_ratio(pvy, qy_w)
    conditional = pvy.mass / prior[:, None]
    gammas, _ = jump_points(ratio, pvy.mass)
    values = np.empty_like(gammas)
    for i, g in enumerate(gammas):
        tails = np.where(ratio_leq(ratio, g), conditional, 0.0).sum(axis=1)
        values[i] = tails.min() - g
    return GammaSweep(gammas, values)


def poor_verdu(pvy: JointDistribution, qy: Optional[FiniteMeasure], gamma: float) -> tuple[float, bool]:
    """``(1 - gamma) Pr[P_VY/Q_Y <= gamma]`` and whether its validity condition holds.

    The condition is ``sum P_VY 1{ratio > gamma} <= sum_{v,y} Q_Y(y) 1{ratio > gamma}``.
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    qy_w = _qy_weights(pvy, qy)
    ratio = _joint_ratio(pvy, qy_w)
    low = ratio_leq(ratio, gamma)
    high = ~low & ~np.isnan(ratio)
    q_full = np.broadcast_to(qy_w, pvy.shape)
    condition_ok = bool(pvy.mass[high].sum() <= q_full[high].sum() + ATOL)
    return float((1.0 - gamma) * pvy.mass[low].sum()), condition_ok


def poor_verdu_sweep(pvy: JointDistribution, qy: Optional[FiniteMeasure] = None) -> tuple[GammaSweep, np.ndarray]:
    """All jump-point values of :func:`poor_verdu` with their condition flags."""
    qy_w = _qy_weights(pvy, qy)
    gammas, _ = jump_points(_joint_ratio(pvy, qy_w), pvy.mass)
    pairs = [poor_verdu(pvy, qy_w, float(g)) for g in gammas]
    values = np.array([v for v, _ in pairs])
    flags = np.array([ok for _, ok in pairs])
    return GammaSweep(gammas, values), flags


def tight_poor_verdu(pvy: JointDistribution) -> GammaSweep:
    """``max_gamma (1 - gamma) Pr[P_VY/Q*_Y <= gamma]`` at the MAP-induced ``Q*_Y``; equals the MAP error."""
    qstar = map_solve(pvy).qy_star.weights
    gammas, tails = jump_points(_joint_ratio(pvy, qstar), pvy.mass)
    return GammaSweep(gammas, (1.0 - gammas) * tails)


def bank_of_tests(pvy: JointDistribution, qy: Optional[FiniteMeasure] = None) -> tuple[float, np.ndarray]:
    """``sum_v P_V(v) alpha_{b(v)}(P_{Y|V=v}, Q_Y)`` with budgets ``b(v) = sum_y Q_Y(y) P^MAP(v|y)``.

    The budgets come from the uniform tie-splitting MAP decoder. Any other
    tie-break gives the same value at ``Q*_Y``: the observations a hypothesis
    wins form the top ratio group of its test, at ratio ``mu / P_V(v)``, so
    after weighting by ``P_V(v)`` each unit of budget removes ``mu`` of error
    whichever tied hypothesis receives it.
    """
    prior = _require_positive_prior(pvy)
    qy_w = _qy_weights(pvy, qy)
    decoder = map_solve(pvy).decoder.rows
    budgets = qy_w @ decoder
    conditional = pvy.mass / prior[:, None]
    value = sum(
        prior[v] * alpha_beta(conditional[v], qy_w, float(budgets[v])).alpha
        for v in range(pvy.num_hypotheses)
    )
    return float(value), budgets
