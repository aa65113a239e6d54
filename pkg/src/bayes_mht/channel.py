"""Channel coding over a discrete memoryless channel as M-ary testing.

Codewords of a block code over ``{0, 1}^n`` are stored as integers whose
binary digits are the channel inputs (most significant bit first).
"""

from __future__ import annotations

import itertools
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .binary_ht import alpha_beta
from .measures import FiniteMeasure, JointDistribution, validate_kernel, ValidationError
from .mary_ht import map_solve, product_meta_converse

# dense joint alphabets are capped at this many entries
MAX_DENSE_ENTRIES = 2**20
MAX_SEARCH_CANDIDATES = 10**7


class SearchSpaceTooLarge(ValueError):
    """Raised when an exhaustive enumeration or dense materialization exceeds its guard."""


@dataclass(frozen=True, eq=False)
class DMC:
    """Channel transition matrix ``transition[x, y] = W(y|x)``."""

    transition: np.ndarray

    def __post_init__(self):
        w = np.array(self.transition, dtype=np.float64)
        violation = validate_kernel(w)
        if violation is not None:
            raise ValidationError(violation)
        w.setflags(write=False)
        object.__setattr__(self, "transition", w)

    @property
    def input_size(self) -> int:
        return self.transition.shape[0]

    @property
    def output_size(self) -> int:
        return self.transition.shape[1]

    def is_xor_symmetric(self) -> bool:
        """True if ``W(y|x) = W(y ^ x | 0)``, as for a product BSC."""
        nx, ny = self.transition.shape
        if nx != ny or nx & (nx - 1):
            return False
        idx = np.arange(nx)
        return bool(np.array_equal(self.transition, self.transition[0][idx[:, None] ^ idx[None, :]]))


@dataclass(frozen=True)
class ChannelCode:
    n: int
    codewords: tuple

    def __post_init__(self):
        words = tuple(int(c) for c in self.codewords)
        if len(words) == 0:
            raise ValueError("a code needs at least one codeword")
        if len(set(words)) != len(words):
            raise ValueError(f"codewords must be distinct: {words}")
        object.__setattr__(self, "codewords", words)

    @property
    def M(self) -> int:
        return len(self.codewords)

    def bits(self) -> list[str]:
        return [format(c, f"0{self.n}b") for c in self.codewords]


def hamming_distances(n: int) -> np.ndarray:
    idx = np.arange(2**n)
    xor = idx[:, None] ^ idx[None, :]
    return sum((xor >> k) & 1 for k in range(n))


def bsc(n: int, delta: float) -> DMC:
    """``n`` uses of a binary symmetric channel: ``W(y|x) = delta^d (1 - delta)^(n - d)``."""
    if n < 1:
        raise ValueError("blocklength must be at least 1")
    if not 0.0 < delta < 1.0:
        raise ValueError(f"crossover probability must lie in (0, 1), got {delta}")
    if 4**n > MAX_DENSE_ENTRIES:
        raise SearchSpaceTooLarge(f"BSC with n={n} exceeds the dense-materialization cap")
    d = hamming_distances(n)
    return DMC(delta**d * (1.0 - delta) ** (n - d))


def _check_code(W: DMC, code: ChannelCode) -> None:
    if any(c < 0 or c >= W.input_size for c in code.codewords):
        raise ValueError(f"codewords must index the channel input alphabet of size {W.input_size}")


def code_to_joint(W: DMC, code: ChannelCode) -> JointDistribution:
    """``P_VY(v, y) = W(y | x(v)) / M`` for equiprobable messages."""
    _check_code(W, code)
    if code.M * W.output_size > MAX_DENSE_ENTRIES:
        raise SearchSpaceTooLarge("code-induced joint exceeds the dense-materialization cap")
    return JointDistribution(W.transition[list(code.codewords)] / code.M)


def code_error(W: DMC, code: ChannelCode) -> float:
    """ML (= MAP) decoding error probability of ``code``."""
    return map_solve(code_to_joint(W, code)).error


def metaconverse_code(W: DMC, code: ChannelCode, qy: Optional[FiniteMeasure] = None) -> float:
    """``alpha_{1/M}(P_X^C x W, P_X^C x Q_Y)``; ``Q_Y`` defaults to the code's ``Q*_Y``."""
    pvy = code_to_joint(W, code)
    if qy is None:
        qy = map_solve(pvy).qy_star
    return product_meta_converse(pvy, qy)


def relaxed_metaconverse(W: DMC, M: int, px=None, qy=None) -> float:
    """``alpha_{1/M}(P_X x W, P_X x Q_Y)`` for an arbitrary input law.

    Defaults to uniform ``P_X`` and ``Q_Y``, the saddlepoint for symmetric
    channels such as the BSC. No optimization over ``P_X`` is attempted.
    """
    if M < 1:
        raise ValueError("M must be positive")
    nx, ny = W.transition.shape
    if nx * ny > MAX_DENSE_ENTRIES:
        raise SearchSpaceTooLarge("input-output alphabet exceeds the dense-materialization cap")
    px_w = np.full(nx, 1.0 / nx) if px is None else np.asarray(px, dtype=np.float64).ravel()
    qy_w = np.full(ny, 1.0 / ny) if qy is None else np.asarray(qy, dtype=np.float64).ravel()
    FiniteMeasure(px_w)
    FiniteMeasure(qy_w)
    if px_w.size != nx or qy_w.size != ny:
        raise ValueError("P_X / Q_Y sizes do not match the channel")
    joint = px_w[:, None] * W.transition
    aux = np.outer(px_w, qy_w)
    return alpha_beta(joint.ravel(), aux.ravel(), 1.0 / M).alpha


def _codes_errors(transition: np.ndarray, codes: np.ndarray) -> np.ndarray:
    # codes: (K, M) integer array; per-code error = 1 - sum_y max_v W(y|x_v) / M
    rows = transition[codes]  # (K, M, Y)
    return 1.0 - rows.max(axis=1).sum(axis=1) / codes.shape[1]


def _candidate_chunk(args) -> np.ndarray:
    transition, combos = args
    return _codes_errors(transition, combos)


def _enumerate_codes(input_size: int, M: int, fix_zero: bool) -> np.ndarray:
    if fix_zero:
        rest = itertools.combinations(range(1, input_size), M - 1)
        flat = np.fromiter(itertools.chain.from_iterable(rest), dtype=np.int64)
        tail = flat.reshape(-1, M - 1)
        return np.hstack([np.zeros((tail.shape[0], 1), dtype=np.int64), tail])
    flat = np.fromiter(itertools.chain.from_iterable(itertools.combinations(range(input_size), M)), dtype=np.int64)
    return flat.reshape(-1, M)


def search_space_size(input_size: int, M: int, fix_zero: bool) -> int:
    return math.comb(input_size - 1, M - 1) if fix_zero else math.comb(input_size, M)


def best_code_search(
    W: DMC,
    n: int,
    M: int,
    *,
    workers: int = 1,
    use_symmetry: Optional[bool] = None,
    chunk_size: int = 65536,
) -> tuple[ChannelCode, float]:
    """Exhaustive search for a code of ``M`` codewords with smallest ML error.

    For channels with ``W(y|x) = W(y^x|0)`` the first codeword is fixed to the
    all-zero word (translating a code by a fixed word preserves its error).
    Ties within ``1e-12`` go to the lexicographically smallest codeword tuple.
    The candidate list is split into ``workers`` process chunks; the result
    does not depend on the split.
    """
    if W.input_size != 2**n:
        raise ValueError(f"channel input alphabet has {W.input_size} symbols, expected 2^{n}")
    if not 1 <= M <= W.input_size:
        raise ValueError(f"cannot pick {M} distinct codewords out of {W.input_size}")
    if use_symmetry is None:
        use_symmetry = W.is_xor_symmetric()
    size = search_space_size(W.input_size, M, use_symmetry)
    if size > MAX_SEARCH_CANDIDATES:
        raise SearchSpaceTooLarge(f"{size} candidate codes exceed the guard of {MAX_SEARCH_CANDIDATES}")

    codes = _enumerate_codes(W.input_size, M, use_symmetry)
    chunks = [codes[i : i + chunk_size] for i in range(0, codes.shape[0], chunk_size)]
    tasks = [(W.transition, c) for c in chunks]
    if workers > 1 and len(tasks) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            errors = np.concatenate(list(pool.map(_candidate_chunk, tasks)))
    else:
        errors = np.concatenate([_candidate_chunk(t) for t in tasks])

    best = errors.min()
    # combinations() emits tuples in lexicographic order, so the first tie wins
    i = int(np.flatnonzero(errors <= best + 1e-12)[0])
    code = ChannelCode(n, tuple(int(c) for c in codes[i]))
    return code, code_error(W, code)


def translate(code: ChannelCode, shift: int) -> ChannelCode:
    """Code obtained by XOR-ing every codeword with ``shift``."""
    return ChannelCode(code.n, tuple(c ^ shift for c in code.codewords))


def parse_code(words: Sequence, n: Optional[int] = None) -> ChannelCode:
    """Build a code from bit strings (``"0101"``) or integers."""
    ints = []
    for w in words:
        if isinstance(w, str):
            n = len(w) if n is None else n
            if len(w) != n or set(w) - {"0", "1"}:
                raise ValueError(f"bad codeword {w!r} for blocklength {n}")
            ints.append(int(w, 2))
        else:
            ints.append(int(w))
    if n is None:
        raise ValueError("blocklength needed for integer codewords")
    return ChannelCode(n, tuple(ints))
