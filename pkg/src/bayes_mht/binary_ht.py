"""Binary hypothesis testing: error types, the Neyman-Pearson trade-off
``alpha_beta`` and the two lower bounds on it used by every spectrum bound.

All functions take plain arrays or :class:`~bayes_mht.measures.FiniteMeasure`
objects (anything ``np.asarray`` understands). ``P`` is the null law and
``Q`` the alternative, which may be an unnormalized measure.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .measures import ATOL

# two likelihood ratios tie if |r1 - r2| <= RTOL * max(1, |r1|, |r2|)
RTOL = 1e-9


@dataclass(frozen=True)
class NPSolution:
    """Neyman-Pearson test ``T(0|y)`` with threshold ``gamma`` and tie randomization ``p``.

    ``alpha``/``beta`` are the type-0/type-1 errors the returned
    ``acceptance`` vector actually achieves.
    """

    gamma: float
    p: float
    alpha: float
    beta: float
    acceptance: np.ndarray


def _vec(x) -> np.ndarray:
    return np.asarray(x, dtype=np.float64).ravel()


def _pair(P, Q) -> tuple[np.ndarray, np.ndarray]:
    p, q = _vec(P), _vec(Q)
    if p.shape != q.shape:
        raise ValueError(f"alphabet size mismatch: {p.size} vs {q.size}")
    return p, q


def likelihood_ratio(P, Q) -> np.ndarray:
    """``P/Q`` with ``+inf`` where only ``Q`` vanishes and ``nan`` where both do; keeps the input shape."""
    p = np.asarray(P, dtype=np.float64)
    q = np.asarray(Q, dtype=np.float64)
    if p.shape != q.shape:
        raise ValueError(f"shape mismatch: {p.shape} vs {q.shape}")
    ratio = np.full(p.shape, np.inf)
    pos = q > 0
    ratio[pos] = p[pos] / q[pos]
    ratio[(q == 0) & (p == 0)] = np.nan
    return ratio


def ratio_leq(ratio: np.ndarray, gamma: float) -> np.ndarray:
    """Mask of ``ratio <= gamma`` up to the tie tolerance; inf/nan never qualify."""
    ratio = np.asarray(ratio, dtype=np.float64)
    finite = np.isfinite(ratio)
    out = np.zeros(ratio.shape, dtype=bool)
    r = ratio[finite]
    out[finite] = r <= gamma + RTOL * np.maximum(1.0, np.maximum(np.abs(r), abs(gamma)))
    return out


def _group_starts(sorted_ratios: np.ndarray, descending: bool) -> np.ndarray:
    """Start offsets of tie groups in an already sorted ratio vector."""
    if sorted_ratios.size == 0:
        return np.zeros(0, dtype=int)
    a, b = sorted_ratios[:-1], sorted_ratios[1:]
    gap = (a - b) if descending else (b - a)
    scale = np.maximum(1.0, np.maximum(np.abs(a), np.abs(b)))
    breaks = np.flatnonzero(gap > RTOL * scale) + 1
    return np.concatenate(([0], breaks))


def jump_points(ratio, weight) -> tuple[np.ndarray, np.ndarray]:
    """Candidate thresholds of a tail-probability sweep.

    Returns increasing ``gammas`` (always starting at 0) and
    ``tails[i] = sum(weight[ratio <= gammas[i]])``. Any objective of the form
    ``f(tail(gamma)) - c * gamma`` with ``c >= 0`` or ``(1 - gamma) tail`` is
    maximized over ``gamma >= 0`` at one of these points, since the tail is a
    right-continuous step function.
    """
    ratio = _vec(ratio)
    weight = _vec(weight)
    finite = np.isfinite(ratio)
    r, w = ratio[finite], weight[finite]
    order = np.argsort(r, kind="stable")
    r, w = r[order], w[order]
    if r.size == 0:
        return np.zeros(1), np.zeros(1)
    starts = _group_starts(r, descending=False)
    ends = np.append(starts[1:], r.size) - 1
    gammas = r[ends]
    tails = np.cumsum(np.add.reduceat(w, starts))
    if gammas[0] > RTOL:
        gammas = np.concatenate(([0.0], gammas))
        tails = np.concatenate(([0.0], tails))
    else:
        gammas = gammas.copy()
        gammas[0] = max(gammas[0], 0.0)
    return gammas, tails


def _acceptance(T, size: int) -> np.ndarray:
    t = np.asarray(T, dtype=np.float64)
    if t.ndim == 2:
        if t.shape[1] != 2:
            raise ValueError("a binary test kernel must have exactly two outputs")
        t = t[:, 0]
    t = t.ravel()
    if t.size != size:
        raise ValueError(f"alphabet size mismatch: test has {t.size} entries, measure {size}")
    if np.any(t < -ATOL) or np.any(t > 1 + ATOL):
        raise ValueError("acceptance probabilities must lie in [0, 1]")
    return t


def type0_error(P, T) -> float:
    """Probability of deciding H1 under ``P``: ``sum_y P(y) T(1|y)``.

    ``T`` is the acceptance vector ``T(0|y)`` or a two-column test kernel.
    """
    p = _vec(P)
    return float(np.dot(p, 1.0 - _acceptance(T, p.size)))


def type1_error(Q, T) -> float:
    """Mass of deciding H0 under ``Q``: ``sum_y Q(y) T(0|y)`` (exceeds 1 for unnormalized ``Q``)."""
    q = _vec(Q)
    return float(np.dot(q, _acceptance(T, q.size)))


def bayes_binary_error(P, Q, prior0: float) -> float:
    """Smallest average error ``prior0 * eps0 + (1 - prior0) * eps1``.

    The optimum is ``sum_y min(prior0 P(y), (1 - prior0) Q(y))``, attained by
    the likelihood-ratio test with threshold ``(1 - prior0) / prior0``.
    """
    if not 0.0 <= prior0 <= 1.0:
        raise ValueError(f"prior0 must lie in [0, 1], got {prior0}")
    p, q = _pair(P, Q)
    return float(np.minimum(prior0 * p, (1.0 - prior0) * q).sum())


def alpha_beta(P, Q, beta: float) -> NPSolution:
    """Smallest type-0 error over all tests with type-1 error at most ``beta``.

    Ratio groups are accepted in decreasing order of ``P/Q`` until the
    ``Q``-budget is exhausted; the group straddling the budget is accepted
    with probability ``p``. Symbols with ``Q(y) = 0 < P(y)`` are free.
    """
    if beta < 0:
        raise ValueError(f"beta must be nonnegative, got {beta}")
    p_w, q_w = _pair(P, Q)
    n = p_w.size
    acceptance = np.zeros(n)
    acceptance[(q_w == 0) & (p_w > 0)] = 1.0

    finite = np.flatnonzero(q_w > 0)
    total_q = float(q_w.sum())
    if finite.size == 0 or beta >= total_q - ATOL:
        acceptance[finite] = 1.0
        gamma, p_rand = 0.0, 1.0
    else:
        ratio = p_w[finite] / q_w[finite]
        order = np.argsort(-ratio, kind="stable")
        r_sorted = ratio[order]
        idx_sorted = finite[order]
        starts = _group_starts(r_sorted, descending=True)
        group_q = np.add.reduceat(q_w[idx_sorted], starts)
        cum = np.cumsum(group_q)
        # number of groups that fit entirely within the budget
        k = int(np.searchsorted(cum, beta + ATOL, side="right"))
        used = float(cum[k - 1]) if k > 0 else 0.0
        bounds = np.append(starts, r_sorted.size)
        acceptance[idx_sorted[: bounds[k]]] = 1.0
        if k > 0 and (beta - used <= ATOL or k == group_q.size):
            # budget lands on a group boundary: report that group with p = 1
            gamma, p_rand = float(r_sorted[starts[k - 1]]), 1.0
        else:
            p_rand = min(max((beta - used) / float(group_q[k]), 0.0), 1.0)
            gamma = float(r_sorted[starts[k]])
            acceptance[idx_sorted[bounds[k] : bounds[k + 1]]] = p_rand

    acceptance.setflags(write=False)
    return NPSolution(
        gamma=gamma,
        p=p_rand,
        alpha=float(np.dot(p_w, 1.0 - acceptance)),
        beta=float(np.dot(q_w, acceptance)),
        acceptance=acceptance,
    )


def relaxation_bound(P, Q, beta: float, gamma: float) -> float:
    """``P[P/Q <= gamma] - gamma * beta``, a lower bound on ``alpha_beta(P, Q, beta)`` for any ``gamma >= 0``."""
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    p_w, q_w = _pair(P, Q)
    low = ratio_leq(likelihood_ratio(p_w, q_w), gamma)
    return float(p_w[low].sum() - gamma * beta)


def poor_verdu_lemma_bound(P, Q, beta: float, gamma: float) -> tuple[float, bool]:
    """``(1 - gamma * beta) P[P/Q <= gamma]`` and whether it is a valid bound.

    The bound is guaranteed only when
    ``beta * P[P/Q > gamma] <= Q[P/Q > gamma]``; the flag reports that
    condition (cross-multiplied so a vanishing tail is harmless).
    """
    if gamma < 0:
        raise ValueError("gamma must be nonnegative")
    p_w, q_w = _pair(P, Q)
    ratio = likelihood_ratio(p_w, q_w)
    low = ratio_leq(ratio, gamma)
    high = ~low & ~np.isnan(ratio)
    condition_ok = bool(beta * p_w[high].sum() <= q_w[high].sum() + ATOL)
    return float((1.0 - gamma * beta) * p_w[low].sum()), condition_ok
