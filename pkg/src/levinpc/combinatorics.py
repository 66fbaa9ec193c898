"""
Target words, their occurrences inside a block, and exhaustive lemma checks.

A target word for block ``d`` (``e = 2**d``) has length ``d + e`` and its last
``d`` letters complement its first ``d``.  An occurrence is *constrained*
when it starts in chunk ``n`` with ``n`` even and exactly ``t`` of its letters
fall in that chunk, ``d <= t <= e``; the remaining letters then sit inside
chunk ``n + 1``, which is the complement of chunk ``n``.

Given the word and ``t``, chunk ``n`` is forced to be
``complement(a[t+1..e]) + a[1..t]``, so the occurrence exists iff solving for
``n`` gives an even index.  Which letter decides that parity depends on the
rotation tuple:

* case 1 (``nu[e-2] == 0``): the last letter of chunk ``n``, i.e. ``a_t``;
* case 2 (``nu[e-2] == 1``): the first letter of chunk ``n + 1``, i.e. ``a_{t+1}``.

With an affine shift whose last bit is 1 the deciding letter flips value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import comb

from .gf2 import (
    BitWord,
    SingularMatrixError,
    enumerate_suitable,
    is_nonsingular,
    mat_vec,
    pascal_matrix,
    rotated_matrix,
    solve,
)
from .necklace import ConstantSpec, NecklaceSpec, bits_to_str, block_bits, block_start

#: Largest d for which target words are enumerated exhaustively (2**e words).
MAX_TARGET_D = 3


@dataclass(frozen=True)
class TargetWord:
    word: BitWord
    d: int

    def __post_init__(self):
        if isinstance(self.word, str):
            object.__setattr__(self, "word", BitWord.from_str(self.word))
        if self.d < 1:
            raise ValueError("target words need d >= 1")
        e = self.e
        if self.word.length != self.d + e:
            raise ValueError(f"target word must have length {self.d + e}, got {self.word.length}")
        if self.word[:self.d].complement() != self.word[e:]:
            raise ValueError(f"{self.word} violates the complement condition")

    @property
    def e(self) -> int:
        return 1 << self.d

    def __str__(self) -> str:
        return str(self.word)

    @property
    def k(self) -> int:
        """Zeros among ``a_d .. a_e`` (the Levin-case count)."""
        return predicted_count(self, 1)


@dataclass
class CountReport:
    word: TargetWord
    predicted: int
    constrained_count: int
    total_count: int
    positions: list[int] = field(default_factory=list)
    oracle_positions: list[int] | None = None

    @property
    def passed(self) -> bool:
        return (
            self.constrained_count == self.predicted
            and self.total_count >= self.predicted
            and self.oracle_positions in (None, self.positions)
        )


@dataclass
class CountingSummary:
    spec: NecklaceSpec
    case: int
    reports: list[CountReport]

    @property
    def mismatches(self) -> list[CountReport]:
        return [r for r in self.reports if not r.passed]

    @property
    def passed(self) -> bool:
        return not self.mismatches

    def to_dict(self) -> dict:
        return {
            "d": self.spec.d,
            "nu": list(self.spec.nu),
            "z": str(self.spec.z),
            "case": self.case,
            "words": len(self.reports),
            "occurrences": sum(r.constrained_count for r in self.reports),
            "passed": self.passed,
            "mismatches": [
                {
                    "word": str(r.word),
                    "predicted": r.predicted,
                    "constrained": r.constrained_count,
                    "total": r.total_count,
                    "positions": r.positions,
                    "oracle_positions": r.oracle_positions,
                }
                for r in self.mismatches
            ],
        }


def enumerate_targets(d: int, limit: int = MAX_TARGET_D) -> list[TargetWord]:
    """All ``2**e`` target words of block ``d``, ordered by their first ``e`` letters."""
    if not 1 <= d <= limit:
        raise ValueError(f"d must be in [1, {limit}], got {d}")
    e = 1 << d
    mask = (1 << d) - 1
    out = []
    for head in range(1 << e):
        tail = ~(head >> (e - d)) & mask
        out.append(TargetWord(BitWord((head << d) | tail, d + e), d))
    return out


def predicted_count(a: TargetWord, case: int = 1, parity: int = 0) -> int:
    """Number of constrained occurrences the counting argument predicts.

    ``parity`` is the last bit of the block's affine shift.
    """
    d, e = a.d, a.e
    w = a.word
    if case == 1:
        # a_d .. a_e, 1-based
        return sum(1 for t in range(d, e + 1) if w[t - 1] == parity)
    if case == 2:
        # a_{d+1} .. a_{e+1}
        return sum(1 for t in range(d + 1, e + 2) if w[t - 1] == 1 - parity)
    raise ValueError(f"case must be 1 or 2, got {case}")


def _occurrences(haystack: str, needle: str) -> list[int]:
    out = []
    i = haystack.find(needle)
    while i >= 0:
        out.append(i)
        i = haystack.find(needle, i + 1)
    return out


def _is_constrained(offset: int, d: int, e: int) -> bool:
    n, r = divmod(offset, e)
    return n % 2 == 0 and d <= e - r <= e


def constrained_count(spec: NecklaceSpec, a: TargetWord, block: str | None = None) -> CountReport:
    """Scan the block for ``a``; positions are offsets within the block."""
    if spec.d != a.d:
        raise ValueError(f"word is for d={a.d}, block has d={spec.d}")
    if block is None:
        block = bits_to_str(block_bits(spec))
    hits = _occurrences(block, str(a.word))
    positions = [h for h in hits if _is_constrained(h, spec.d, spec.e)]
    return CountReport(
        word=a,
        predicted=predicted_count(a, spec.case, spec.z[-1]),
        constrained_count=len(positions),
        total_count=len(hits),
        positions=positions,
    )


def alignment_range(d: int, case: int) -> range:
    """Valid alignments: ``t`` for case 1, ``t + 1`` for case 2."""
    e = 1 << d
    return range(d, e + 1) if case == 1 else range(d + 1, e + 2)


def occurrence_oracle(
    spec: NecklaceSpec, a: TargetWord, alignment: int, case: int | None = None
) -> int | None:
    """Block offset of the occurrence of ``a`` with the given alignment, if any.

    Case 1 alignment is the index of the letter matching the last symbol of
    chunk ``n``; case 2 alignment is the index matching the first symbol of
    chunk ``n + 1``.  The chunk is recovered by solving ``M w' = v`` and the
    occurrence is rejected when the lexicographic index is odd.
    """
    case = spec.case if case is None else case
    if alignment not in alignment_range(spec.d, case):
        raise ValueError(f"alignment {alignment} outside the valid range for case {case}")
    e = spec.e
    t = alignment if case == 1 else alignment - 1
    w = a.word
    v = w[t:e].complement() + w[:t] if t < e else w[:t]
    try:
        shifted = solve(spec.matrix, v)
    except SingularMatrixError:
        raise AssertionError(f"rotated matrix for nu={tuple(spec.nu)} is singular") from None
    n = (shifted ^ spec.z).value
    if n % 2:
        return None
    return n * e + (e - t)


def verify_counting(spec: NecklaceSpec) -> CountingSummary:
    """Check constrained counts, totals and the solve-based oracle for every target word."""
    block = bits_to_str(block_bits(spec))
    reports = []
    for a in enumerate_targets(spec.d):
        rep = constrained_count(spec, a, block)
        found = (occurrence_oracle(spec, a, t) for t in alignment_range(spec.d, spec.case))
        rep.oracle_positions = sorted(p for p in found if p is not None)
        reports.append(rep)
    return CountingSummary(spec, spec.case, reports)


def occurrence_groups(spec: ConstantSpec, d: int) -> dict[str, list[int]]:
    """Global positions of the constrained occurrences of each target word in block ``d``."""
    nk = spec.block(d)
    block = bits_to_str(block_bits(nk))
    base = block_start(d)
    return {
        str(a): [base + h for h in constrained_count(nk, a, block).positions]
        for a in enumerate_targets(d)
    }


def binom_identity_check(n: int) -> bool:
    """``sum_k C(n,k) C(k,2) == 2**(n-2) C(n,2)`` in exact integers."""
    if n < 2:
        raise ValueError(f"n must be at least 2, got {n}")
    return sum(comb(n, k) * comb(k, 2) for k in range(n + 1)) == (1 << (n - 2)) * comb(n, 2)


def lower_bound(d: int) -> Fraction:
    """``(e-d+1)(e-d) / (8e)`` with ``e = 2**d``."""
    if d < 1:
        raise ValueError(f"d must be positive, got {d}")
    e = 1 << d
    return Fraction((e - d + 1) * (e - d), 8 * e)


@dataclass(frozen=True)
class BoundReport:
    d: int
    bound: Fraction
    F_empirical: Fraction | None = None
    ambiguous: int | None = None

    @property
    def e(self) -> int:
        return 1 << self.d

    @property
    def N(self) -> int:
        return 1 << (self.d + self.e + 1)

    @property
    def met(self) -> bool | None:
        if self.F_empirical is None:
            return None
        return self.F_empirical >= self.bound and self.ambiguous == 0

    def to_dict(self) -> dict:
        F = self.F_empirical
        return {
            "d": self.d,
            "e": self.e,
            "N": self.N,
            "bound_num": self.bound.numerator,
            "bound_den": self.bound.denominator,
            "F_empirical": None if F is None else f"{F.numerator}/{F.denominator}",
        }


def bound_report(d: int, spec: ConstantSpec | None = None, empirical: bool = True, workers: int = 1) -> BoundReport:
    from .stats import MAX_BLOCK_D, block_pair_correlation

    if not empirical or d > MAX_BLOCK_D:
        return BoundReport(d, lower_bound(d))
    rep = block_pair_correlation(spec, d, workers=workers)
    return BoundReport(d, lower_bound(d), rep.F, rep.ambiguous_count)


@dataclass
class Check:
    name: str
    d: int
    nu: tuple[int, ...]
    passed: bool
    witness: str | None = None

    def to_dict(self) -> dict:
        return {"check": self.name, "d": self.d, "nu": list(self.nu), "passed": self.passed, "witness": self.witness}


@dataclass
class LemmaSummary:
    checks: list[Check]

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> list[Check]:
        return [c for c in self.checks if not c.passed]

    def to_dict(self) -> dict:
        counts: dict[str, int] = {}
        for c in self.checks:
            counts[c.name] = counts.get(c.name, 0) + 1
        return {
            "passed": self.passed,
            "checks": counts,
            "failures": [c.to_dict() for c in self.failures],
        }


def _first_failure(pred, items) -> str | None:
    for item in items:
        if not pred(item):
            return str(item)
    return None


def verify_lemmas(d_max: int) -> LemmaSummary:
    """Exhaustive checks of the structural lemmas for every ``d <= d_max``.

    For each ``d``: ``M_d`` is upper triangular with unit diagonal; ``M_d``
    preserves evenness both ways.  For each suitable ``nu``: ``M_d^nu`` is
    nonsingular; consecutive chunks ``2m, 2m+1`` are complementary; and the
    case-1 or case-2 evenness correspondence holds for every ``w``.
    """
    if d_max < 0:
        raise ValueError(f"d_max must be non-negative, got {d_max}")
    checks: list[Check] = []
    for d in range(d_max + 1):
        e = 1 << d
        m = pascal_matrix(d)
        zero = (0,) * e
        words = [BitWord(n, e) for n in range(1 << e)]

        bad = _first_failure(
            lambda ij: m.entry(*ij) == (1 if ij[0] == ij[1] else 0),
            [(i, j) for i in range(e) for j in range(i + 1)],
        )
        checks.append(Check("triangular_unit_diagonal", d, zero, bad is None, bad))

        bad = _first_failure(lambda w: mat_vec(m, w).is_even == w.is_even, words)
        checks.append(Check("even_invariance", d, zero, bad is None, bad))

        ones = BitWord.ones(e)
        for nu in enumerate_suitable(e):
            mv = rotated_matrix(d, nu)
            ok = is_nonsingular(mv)
            checks.append(Check("nonsingular", d, tuple(nu), ok, None if ok else "rank deficient"))

            bad = _first_failure(
                lambda w: (mat_vec(mv, w) ^ mat_vec(mv, BitWord(w.value + 1, e))) == ones,
                words[0::2],
            )
            checks.append(Check("complementary", d, tuple(nu), bad is None, bad))

            if nu.case == 1:
                rule = lambda w: mat_vec(mv, w).is_even == w.is_even  # noqa: E731
            else:
                rule = lambda w: (mat_vec(mv, w)[0] == 0) == w.is_even  # noqa: E731
            bad = _first_failure(rule, words)
            checks.append(Check(f"dichotomy_case{nu.case}", d, tuple(nu), bad is None, bad))
    return LemmaSummary(checks)
