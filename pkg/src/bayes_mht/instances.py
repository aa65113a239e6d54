"""Reference instances and random instance generators."""

from __future__ import annotations

import numpy as np

from .measures import JointDistribution, RandomizedKernel

# P_{Y|V}(y|v) of the ternary example, rows indexed by v
TERNARY_LIKELIHOOD = np.array(
    [
        [0.40, 0.27, 0.33],
        [0.27, 0.40, 0.33],
        [0.33, 0.27, 0.40],
    ]
)


def ternary_joint() -> JointDistribution:
    """Uniform prior over three hypotheses observed through ``TERNARY_LIKELIHOOD``."""
    return JointDistribution.from_prior_likelihood(np.full(3, 1 / 3), TERNARY_LIKELIHOOD)


def two_observation_joint() -> JointDistribution:
    """Two conditionally independent looks at the ternary channel.

    Observations are flattened as ``y = 3 * y1 + y2``.
    """
    lik = np.einsum("va,vb->vab", TERNARY_LIKELIHOOD, TERNARY_LIKELIHOOD).reshape(3, 9)
    return JointDistribution.from_prior_likelihood(np.full(3, 1 / 3), lik)


def two_observation_metric() -> np.ndarray:
    """``q(v, y1, y2) = P(y1|v)``: MAP on the first look only."""
    return np.repeat(TERNARY_LIKELIHOOD, 3, axis=1)


def two_observation_auxiliary() -> JointDistribution:
    """``Q(v, y1, y2) = P(y2|v) / 9``: uniform on ``(v, y1)``, matching ``P`` on ``y2``."""
    return JointDistribution(np.tile(TERNARY_LIKELIHOOD, (1, 3)) / 9)


# --- random instances ------------------------------------------------------


def random_joint(rng: np.random.Generator, max_m: int = 5, max_y: int = 6, sparsity: float = 0.0) -> JointDistribution:
    """Dirichlet joint with random sizes ``M <= max_m``, ``|Y| <= max_y``.

    With ``sparsity > 0`` that fraction of entries is zeroed first.
    """
    m = int(rng.integers(1, max_m + 1))
    ny = int(rng.integers(1, max_y + 1))
    mass = rng.dirichlet(np.ones(m * ny)).reshape(m, ny)
    if sparsity > 0:
        mass = np.where(rng.random(mass.shape) < sparsity, 0.0, mass)
        if mass.sum() == 0:
            mass[0, 0] = 1.0
        mass = mass / mass.sum()
    return JointDistribution(mass)


def random_grid_joint(rng: np.random.Generator, max_m: int = 5, max_y: int = 6, denom: int = 12) -> JointDistribution:
    """Joint law on a rational grid ``k / total``; produces exact ties and zeros."""
    m = int(rng.integers(1, max_m + 1))
    ny = int(rng.integers(1, max_y + 1))
    counts = rng.integers(0, denom + 1, size=(m, ny)).astype(float)
    if counts.sum() == 0:
        counts[0, 0] = 1.0
    return JointDistribution(counts / counts.sum())


def random_measure(rng: np.random.Generator, size: int) -> np.ndarray:
    return rng.dirichlet(np.ones(size))


def random_decoder(rng: np.random.Generator, num_obs: int, m: int, deterministic: bool = False) -> RandomizedKernel:
    if deterministic:
        return RandomizedKernel.deterministic(rng.integers(0, m, size=num_obs), m)
    return RandomizedKernel(rng.dirichlet(np.ones(m), size=num_obs))
