"""
Dense linear algebra over GF(2) for Pascal triangle matrices.

Words and vectors are packed into Python ints, most significant bit first:
coordinate 1 of a length-``l`` word is bit ``l - 1`` of the int.  With this
convention the lexicographic index ``n`` of a word is exactly its packed value.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property, lru_cache
from typing import Iterable, Iterator, Sequence

from .errors import ResourceLimitError, SingularMatrixError, ValidationError, check_d

# Suitable-tuple enumeration yields 2**(e-1) tuples.
MAX_ENUM_E = 16


@dataclass(frozen=True)
class BitWord:
    """Fixed-length binary word, doubling as a vector over GF(2)."""

    value: int
    length: int

    def __post_init__(self):
        if self.length < 0:
            raise ValueError(f"negative length {self.length}")
        if not 0 <= self.value < (1 << self.length):
            raise ValueError(f"value {self.value} does not fit in {self.length} bits")

    @classmethod
    def from_str(cls, text: str) -> "BitWord":
        text = text.replace(" ", "")
        if any(c not in "01" for c in text):
            raise ValueError(f"not a binary word: {text!r}")
        return cls(int(text, 2) if text else 0, len(text))

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> "BitWord":
        value = 0
        length = 0
        for b in bits:
            if b not in (0, 1):
                raise ValueError(f"bit must be 0 or 1, got {b!r}")
            value = (value << 1) | b
            length += 1
        return cls(value, length)

    @classmethod
    def zeros(cls, length: int) -> "BitWord":
        return cls(0, length)

    @classmethod
    def ones(cls, length: int) -> "BitWord":
        return cls((1 << length) - 1, length)

    def __str__(self) -> str:
        return format(self.value, f"0{self.length}b") if self.length else ""

    def __repr__(self) -> str:
        return f"BitWord({str(self)!r})"

    def __len__(self) -> int:
        return self.length

    def __iter__(self) -> Iterator[int]:
        for i in range(self.length - 1, -1, -1):
            yield (self.value >> i) & 1

    def __getitem__(self, i):
        """0-based digit access; slices return a BitWord."""
        if isinstance(i, slice):
            return BitWord.from_str(str(self)[i])
        if i < 0:
            i += self.length
        if not 0 <= i < self.length:
            raise IndexError(i)
        return (self.value >> (self.length - 1 - i)) & 1

    def __xor__(self, other: "BitWord") -> "BitWord":
        if self.length != other.length:
            raise ValueError(f"length mismatch: {self.length} vs {other.length}")
        return BitWord(self.value ^ other.value, self.length)

    def __add__(self, other: "BitWord") -> "BitWord":
        """Concatenation."""
        return BitWord((self.value << other.length) | other.value, self.length + other.length)

    def complement(self) -> "BitWord":
        return BitWord(self.value ^ ((1 << self.length) - 1), self.length)

    def count(self, bit: int) -> int:
        ones = bin(self.value).count("1")
        return ones if bit else self.length - ones

    @property
    def is_even(self) -> bool:
        """True when the last coordinate is 0."""
        return not self.value & 1


class SuitableTuple(tuple):
    """Rotation counts ``(n_1, ..., n_e)`` with ``n_e = 0`` and steps of 0 or 1."""

    def __new__(cls, values: Iterable[int]):
        values = tuple(int(v) for v in values)
        if not validate_suitable(values):
            raise ValidationError(f"tuple {values} is not suitable")
        return super().__new__(cls, values)

    @classmethod
    def zeros(cls, e: int) -> "SuitableTuple":
        return cls((0,) * e)

    @property
    def case(self) -> int:
        """1 when ``n_{e-1} = 0`` (even vectors map to even vectors), else 2."""
        if len(self) < 2:
            return 1
        return 1 if self[-2] == 0 else 2


@dataclass(frozen=True)
class Gf2Matrix:
    """Square bit matrix stored as packed rows (column 1 in the top bit)."""

    rows: tuple[int, ...]

    def __post_init__(self):
        size = len(self.rows)
        if any(not 0 <= r < (1 << size) for r in self.rows):
            raise ValueError("row does not fit in the matrix width")

    @classmethod
    def from_rows(cls, rows: Sequence[str]) -> "Gf2Matrix":
        return cls(tuple(int(r.replace(" ", ""), 2) for r in rows))

    @classmethod
    def from_columns(cls, columns: Sequence[int]) -> "Gf2Matrix":
        size = len(columns)
        rows = []
        for i in range(size):
            shift = size - 1 - i
            row = 0
            for c in columns:
                row = (row << 1) | ((c >> shift) & 1)
            rows.append(row)
        return cls(tuple(rows))

    @classmethod
    def zeros(cls, size: int) -> "Gf2Matrix":
        return cls((0,) * size)

    @property
    def size(self) -> int:
        return len(self.rows)

    @cached_property
    def columns(self) -> tuple[int, ...]:
        """Packed columns, row 1 in the top bit."""
        return Gf2Matrix.from_columns(self.rows).rows

    def entry(self, i: int, j: int) -> int:
        """0-based entry accessor."""
        return (self.rows[i] >> (self.size - 1 - j)) & 1

    def row_strings(self) -> list[str]:
        return [format(r, f"0{self.size}b") for r in self.rows]

    def __str__(self) -> str:
        return "\n".join(" ".join(r) for r in self.row_strings())


@lru_cache(maxsize=None)
def _pascal_rows(d: int) -> tuple[int, ...]:
    if d == 0:
        return (1,)
    prev = _pascal_rows(d - 1)
    e = len(prev)
    return tuple((r << e) | r for r in prev) + prev


def pascal_matrix(d: int) -> Gf2Matrix:
    """M_d, built by the block recursion ``M_{d+1} = [[M_d, M_d], [0, M_d]]``."""
    check_d(d)
    return Gf2Matrix(_pascal_rows(d))


def rotate(w: BitWord, n: int) -> BitWord:
    """Apply the rotation moving the last letter to the front ``n`` times."""
    if n < 0:
        raise ValueError(f"rotation count must be non-negative, got {n}")
    length = w.length
    if length == 0:
        return w
    n %= length
    if n == 0:
        return w
    low = w.value & ((1 << n) - 1)
    return BitWord((w.value >> n) | (low << (length - n)), length)


def rotated_matrix(d: int, nu: Sequence[int]) -> Gf2Matrix:
    """M_d with column ``i`` rotated ``nu[i]`` times."""
    base = pascal_matrix(d)
    e = base.size
    if len(nu) != e:
        raise ValueError(f"tuple length {len(nu)} does not match dimension {e}")
    nu = nu if isinstance(nu, SuitableTuple) else SuitableTuple(nu)
    cols = [rotate(BitWord(c, e), n).value for c, n in zip(base.columns, nu)]
    return Gf2Matrix.from_columns(cols)


def mat_vec(m: Gf2Matrix, w: BitWord) -> BitWord:
    """Product ``m @ w`` over GF(2): XOR of the columns selected by ``w``."""
    e = m.size
    if w.length != e:
        raise ValueError(f"dimension mismatch: matrix {e}, vector {w.length}")
    acc = 0
    value = w.value
    for j, col in enumerate(m.columns):
        if (value >> (e - 1 - j)) & 1:
            acc ^= col
    return BitWord(acc, e)


def _eliminate(rows: list[int], rhs: list[int], size: int) -> int:
    """Reduce in place to reduced row-echelon form; return the rank."""
    pivot = 0
    for col in range(size):
        mask = 1 << (size - 1 - col)
        found = next((r for r in range(pivot, len(rows)) if rows[r] & mask), None)
        if found is None:
            continue
        rows[pivot], rows[found] = rows[found], rows[pivot]
        rhs[pivot], rhs[found] = rhs[found], rhs[pivot]
        for r in range(len(rows)):
            if r != pivot and rows[r] & mask:
                rows[r] ^= rows[pivot]
                rhs[r] ^= rhs[pivot]
        pivot += 1
    return pivot


def rank(m: Gf2Matrix) -> int:
    rows = list(m.rows)
    return _eliminate(rows, [0] * len(rows), m.size)


def is_nonsingular(m: Gf2Matrix) -> bool:
    return rank(m) == m.size


def solve(m: Gf2Matrix, v: BitWord) -> BitWord:
    """Return the unique ``w`` with ``m @ w = v``.

    Raises:
        SingularMatrixError: ``m`` does not have full rank.
    """
    e = m.size
    if v.length != e:
        raise ValueError(f"dimension mismatch: matrix {e}, vector {v.length}")
    rows = list(m.rows)
    rhs = [(v.value >> (e - 1 - i)) & 1 for i in range(e)]
    if _eliminate(rows, rhs, e) != e:
        raise SingularMatrixError("matrix is singular over GF(2)")
    # Full rank RREF is the identity, so row i pins coordinate i.
    return BitWord.from_bits(rhs)


def validate_suitable(n: Sequence[int]) -> bool:
    """True iff ``n`` ends in 0 and each entry is its successor or successor + 1."""
    n = tuple(n)
    if not n:
        raise ValueError("empty tuple")
    if n[-1] != 0:
        return False
    return all(n[i + 1] <= n[i] <= n[i + 1] + 1 for i in range(len(n) - 1))


def enumerate_suitable(e: int) -> list[SuitableTuple]:
    """All suitable tuples of length ``e``.

    Depth-first from ``n_e = 0``; each earlier entry tries ``n_{i+1}`` before
    ``n_{i+1} + 1``, innermost choice varying fastest.  For ``e = 4`` this
    yields ``(0,0,0,0), (1,0,0,0), (1,1,0,0), (2,1,0,0), (1,1,1,0), ...``.
    """
    if e < 1 or e & (e - 1):
        raise ValueError(f"e must be a power of two, got {e}")
    if e > MAX_ENUM_E:
        raise ResourceLimitError(f"enumerating 2**{e - 1} tuples exceeds the limit e <= {MAX_ENUM_E}")
    out: list[SuitableTuple] = []

    def extend(suffix: list[int]) -> None:
        # suffix holds (n_i, ..., n_e) with n_i first
        if len(suffix) == e:
            out.append(SuitableTuple(suffix))
            return
        head = suffix[0]
        for step in (0, 1):
            extend([head + step] + suffix)

    extend([0])
    return out
