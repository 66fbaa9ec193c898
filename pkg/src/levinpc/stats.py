"""
Pair correlations and star discrepancy of ``x_n = {2**n x}``, ``n >= 1``.

Point ``x_n`` is the expansion read from 0-based position ``n`` onward.  A
truncated point keeps ``p`` digits, so its true value lies in
``[v / 2**p, (v + 1) / 2**p)`` and a torus distance computed from truncations
is off by strictly less than one unit.  Pairs whose truncated distance falls
in the band where that error could flip the comparison are re-read at doubled
precision; whatever is still undecided is reported as ambiguous.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Union

import numpy as np

from .errors import ResourceLimitError
from .necklace import ConstantSpec, DigitStream, LEVIN

Rational = Union[Fraction, int, str]

GUARD_BITS = 32
REFINE_EXTRA_BITS = 128
# Packed point values live in int64 alongside a 2**p modulus.
MAX_PRECISION = 62
MAX_WORK = 1 << 27
#: Default resource budget for block_pair_correlation.
MAX_BLOCK_D = 4

DEFAULT_SEED = 0x5EED_2019_0228_0001


@dataclass(frozen=True, eq=False)
class PointSet:
    """``N`` points, each an integer ``v`` standing for ``v / 2**p``.

    ``exact`` points are the dyadic values themselves; otherwise each value is
    the truncation of a longer expansion and ``stream`` (when set) can supply
    more digits for point ``first_index + k`` at position ``first_index + k``.
    """

    values: np.ndarray
    precision_bits: int
    exact: bool = False
    stream: DigitStream | None = field(default=None, compare=False)
    first_index: int = 1

    def __post_init__(self):
        values = np.ascontiguousarray(self.values, dtype=np.int64)
        values.setflags(write=False)
        object.__setattr__(self, "values", values)
        if not 1 <= self.precision_bits <= MAX_PRECISION:
            raise ResourceLimitError(f"precision {self.precision_bits} outside [1, {MAX_PRECISION}]")
        if values.size and (values.min() < 0 or values.max() >= (1 << self.precision_bits)):
            raise ValueError("point value outside [0, 2**p)")

    @property
    def N(self) -> int:
        return int(self.values.size)

    def __len__(self) -> int:
        return self.N

    def refined(self, k: int, p: int) -> int:
        """Point ``k`` (0-based) truncated to ``p`` digits."""
        if self.stream is None:
            raise ValueError("point set cannot be refined")
        return self.stream.window(self.first_index + k, p)


@dataclass(frozen=True)
class PairCorrReport:
    N: int
    s: Fraction
    pair_count: int
    ambiguous_count: int
    precision_bits: int

    @property
    def F(self) -> Fraction:
        return Fraction(self.pair_count, self.N)

    @property
    def certified(self) -> bool:
        return self.ambiguous_count == 0

    def to_dict(self) -> dict:
        F = self.F
        return {
            "N": self.N,
            "s_num": self.s.numerator,
            "s_den": self.s.denominator,
            "pair_count": self.pair_count,
            "ambiguous": self.ambiguous_count,
            "F": f"{F.numerator}/{F.denominator}",
            "precision_bits": self.precision_bits,
        }


@dataclass(frozen=True)
class DiscrepancyReport:
    N: int
    d_star: Fraction
    tolerance: Fraction
    precision_bits: int

    @property
    def ratio(self) -> float | None:
        """Approximate ``N * D* / (log2 N)**2``; undefined for ``N = 1``."""
        if self.N < 2:
            return None
        return float(self.N * self.d_star) / math.log2(self.N) ** 2

    def to_dict(self) -> dict:
        den = self.d_star.denominator
        pow2 = den.bit_length() - 1 if den & (den - 1) == 0 else None
        # d_star_den_pow2 is null when N is not a power of two
        return {
            "N": self.N,
            "d_star_num": self.d_star.numerator,
            "d_star_den_pow2": pow2,
            "d_star_den": den,
            "ratio": self.ratio,
        }


def _as_fraction(s: Rational | float) -> Fraction:
    if isinstance(s, float):
        return Fraction(str(s))
    return Fraction(s)


def window_values(bits: np.ndarray, count: int, p: int) -> np.ndarray:
    """``v[k]`` = the ``p`` digits ``bits[k : k + p]`` as an integer."""
    if p > MAX_PRECISION:
        raise ResourceLimitError(f"precision {p} exceeds {MAX_PRECISION}")
    if len(bits) < count + p - 1:
        raise ValueError("not enough digits for the requested windows")
    v = np.zeros(count, dtype=np.int64)
    for k in range(p):
        v <<= 1
        v |= bits[k:k + count]
    return v


def truncated_points(
    spec: ConstantSpec | None, N: int, p: int, workers: int = 1
) -> PointSet:
    """The first ``N`` points ``{2**n x}``, each truncated to ``p`` digits."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if N * p > MAX_WORK * 64:
        raise ResourceLimitError(f"N*p = {N * p} exceeds the work budget")
    stream = DigitStream(spec if spec is not None else LEVIN)
    bits = stream.digits(1, N + p - 1, workers=workers)
    return PointSet(window_values(bits, N, p), p, exact=False, stream=stream)


def splitmix64(seed: int, count: int) -> np.ndarray:
    """SplitMix64 outputs for states ``seed + k * golden`` (Steele, Lea, Flood 2014).

    Pure uint64 arithmetic with wraparound, so the stream is identical on
    every platform.
    """
    golden = np.uint64(0x9E3779B97F4A7C15)
    k = np.arange(1, count + 1, dtype=np.uint64)
    with np.errstate(over="ignore"):
        z = np.uint64(seed & 0xFFFFFFFFFFFFFFFF) + k * golden
        z = (z ^ (z >> np.uint64(30))) * np.uint64(0xBF58476D1CE4E5B9)
        z = (z ^ (z >> np.uint64(27))) * np.uint64(0x94D049BB133111EB)
        z ^= z >> np.uint64(31)
    return z


def baseline_points(seed: int = DEFAULT_SEED, N: int = 1, p: int = 52) -> PointSet:
    """``N`` pseudo-uniform exact ``p``-bit points (top bits of SplitMix64)."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if not 1 <= p <= MAX_PRECISION:
        raise ResourceLimitError(f"precision {p} outside [1, {MAX_PRECISION}]")
    raw = splitmix64(seed, N) >> np.uint64(64 - p)
    return PointSet(raw.astype(np.int64), p, exact=True)


def _chunks(n: int, workers: int) -> list[tuple[int, int]]:
    workers = max(1, min(workers, n))
    return [(n * k // workers, n * (k + 1) // workers) for k in range(workers)]


def _count_within(v: np.ndarray, limit: int, p: int, workers: int = 1) -> int:
    """Unordered pairs of sorted ``v`` with circular distance at most ``limit``."""
    n = len(v)
    if limit < 0 or n < 2:
        return 0
    modulus = 1 << p
    if 2 * limit >= modulus:
        return n * (n - 1) // 2

    def part(bounds: tuple[int, int]) -> int:
        lo, hi = bounds
        idx = np.arange(lo, hi)
        seg = v[lo:hi]
        direct = np.searchsorted(v, seg + limit, side="right") - (idx + 1)
        # j > i with v[j] - v[i] >= modulus - limit wrap around the seam
        wrap = n - np.searchsorted(v, seg + (modulus - limit), side="left")
        return int(direct.sum()) + int(wrap.sum())

    if workers <= 1:
        return part((0, n))
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return sum(pool.map(part, _chunks(n, workers)))


def _pairs_in_band(v: np.ndarray, lo: int, hi: int, p: int) -> set[tuple[int, int]]:
    """Sorted-index pairs ``i < j`` with circular distance in ``(lo, hi]``."""
    if hi <= lo:
        return set()
    modulus = 1 << p
    n = len(v)
    floor = np.arange(1, n + 1)
    pairs = set()
    # direct gaps in (lo, hi], wrapped gaps v[j] - v[i] in [modulus - hi, modulus - lo)
    spans = (
        (np.searchsorted(v, v + lo, side="right"), np.searchsorted(v, v + hi, side="right")),
        (np.searchsorted(v, v + (modulus - hi), side="left"), np.searchsorted(v, v + (modulus - lo), side="left")),
    )
    for starts, ends in spans:
        starts = np.maximum(starts, floor)
        for i in np.nonzero(ends > starts)[0]:
            pairs.update((int(i), int(j)) for j in range(starts[i], ends[i]))
    return pairs


def _limits(theta: Fraction, p: int, exact: bool) -> tuple[int, int]:
    """(certain, candidate) limits on the truncated circular distance ``c``.

    Exact points count iff ``c < theta * 2**p``.  Truncated points are counted
    for certain when ``c + 1 <= theta * 2**p`` and rejected for certain when
    ``c - 1 >= theta * 2**p``.
    """
    scaled = theta * (1 << p)
    ceil = -((-scaled.numerator) // scaled.denominator)
    if exact:
        return ceil - 1, ceil - 1
    floor = scaled.numerator // scaled.denominator
    return floor - 1, ceil


def _circular(a: int, b: int, p: int) -> int:
    diff = (a - b) % (1 << p)
    return min(diff, (1 << p) - diff)


def pair_correlation_points(
    points: PointSet, s: Rational | float, N: int | None = None, workers: int = 1
) -> PairCorrReport:
    """Certified ``F_N(s)``: ordered pairs ``i != j`` with ``||x_i - x_j|| < s/N``, over ``N``."""
    N = points.N if N is None else N
    s = _as_fraction(s)
    if N < 2 or points.N != N:
        raise ValueError(f"need N >= 2 points matching N, got N={N} with {points.N} points")
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    theta = s / N
    p = points.precision_bits
    order = np.argsort(points.values, kind="stable")
    v = points.values[order]

    if theta > Fraction(1, 2):
        # torus distances never exceed 1/2
        return PairCorrReport(N, s, N * (N - 1), 0, p)
    certain_lim, cand_lim = _limits(theta, p, points.exact)
    certain = _count_within(v, certain_lim, p, workers)
    band = sorted(_pairs_in_band(v, certain_lim, cand_lim, p))

    used = p
    undecided = [(int(order[i]), int(order[j])) for i, j in band]
    cap = p + REFINE_EXTRA_BITS
    q = p
    # without a stream the band stays undecided
    while undecided and points.stream is not None and q < cap:
        q = min(2 * q, cap)
        used = q
        lo, hi = _limits(theta, q, False)
        cache: dict[int, int] = {}

        def value(k: int) -> int:
            if k not in cache:
                cache[k] = points.refined(k, q)
            return cache[k]

        still = []
        for a, b in undecided:
            c = _circular(value(a), value(b), q)
            if c <= lo:
                certain += 1
            elif c <= hi:
                still.append((a, b))
        undecided = still

    return PairCorrReport(
        N=N,
        s=s,
        pair_count=2 * certain,
        ambiguous_count=2 * len(undecided),
        precision_bits=used,
    )


def initial_precision(N: int, s: Fraction) -> int:
    ratio = Fraction(N) / s
    bits = math.ceil(math.log2(ratio)) if ratio > 1 else 0
    # guard against float rounding of log2 at exact powers of two
    while (1 << bits) < ratio:
        bits += 1
    while bits > 0 and (1 << (bits - 1)) >= ratio:
        bits -= 1
    return bits + GUARD_BITS


def pair_correlation(
    spec: ConstantSpec | None, N: int, s: Rational | float, workers: int = 1
) -> PairCorrReport:
    """Certified ``F_N(s)`` for the points ``{2**n x}, n = 1..N`` of a constant."""
    s = _as_fraction(s)
    if N < 2:
        raise ValueError(f"N must be at least 2, got {N}")
    if s <= 0:
        raise ValueError(f"s must be positive, got {s}")
    p = initial_precision(N, s)
    return pair_correlation_points(truncated_points(spec, N, p, workers), s, workers=workers)


def block_parameters(d: int) -> tuple[int, Fraction]:
    """``(N, s)`` = ``(2**(d + e + 1), 2)``, so that ``s/N = 2**-(d + e)``."""
    if d < 0:
        raise ValueError(f"block index must be non-negative, got {d}")
    return 1 << (d + (1 << d) + 1), Fraction(2)


def block_pair_correlation(
    spec: ConstantSpec | None, d: int, workers: int = 1, max_block_d: int = MAX_BLOCK_D
) -> PairCorrReport:
    if d > max_block_d:
        raise ResourceLimitError(f"block {d} needs 2**{d + (1 << d) + 1} points (limit d <= {max_block_d})")
    N, s = block_parameters(d)
    return pair_correlation(spec, N, s, workers=workers)


def star_discrepancy_points(points: PointSet) -> DiscrepancyReport:
    """``max_i max(i/N - x_(i), x_(i) - (i-1)/N)`` over sorted truncated points.

    Evaluated in floating point to shortlist candidates, then exactly.
    """
    N = points.N
    p = points.precision_bits
    v = np.sort(points.values)
    scale = float(1 << p)
    x = v / scale
    i = np.arange(1, N + 1)
    upper = i / N - x
    lower = x - (i - 1) / N
    best = max(upper.max(), lower.max())
    slack = 1e-9
    cands = set(np.nonzero(upper >= best - slack)[0].tolist()) | set(np.nonzero(lower >= best - slack)[0].tolist())
    d_star = Fraction(0)
    for k in cands:
        xk = Fraction(int(v[k]), 1 << p)
        d_star = max(d_star, Fraction(k + 1, N) - xk, xk - Fraction(k, N))
    tolerance = Fraction(0) if points.exact else Fraction(1, 1 << p)
    return DiscrepancyReport(N=N, d_star=d_star, tolerance=tolerance, precision_bits=p)


def star_discrepancy(
    spec: ConstantSpec | None, N: int, p: int | None = None, workers: int = 1
) -> DiscrepancyReport:
    """Star discrepancy of the first ``N`` truncated points; true value within ``tolerance``."""
    if N < 1:
        raise ValueError(f"N must be at least 1, got {N}")
    if p is None:
        p = min(MAX_PRECISION, max(1, math.ceil(math.log2(N))) + GUARD_BITS)
    return star_discrepancy_points(truncated_points(spec, N, p, workers))


def certified_close(stream: DigitStream, i: int, j: int, theta: Fraction) -> bool | None:
    """Decide ``||x_i - x_j|| < theta`` by reading digits until the answer is certain."""
    p = max(8, math.ceil(math.log2(1 / theta)) + 8) if theta < 1 else 8
    for _ in range(6):
        lo, hi = _limits(theta, p, False)
        c = _circular(stream.window(i, p), stream.window(j, p), p)
        if c <= lo:
            return True
        if c > hi:
            return False
        p *= 2
    return None

