"""
Affine necklaces and the constants built from them.

A constant is the infinite concatenation of blocks ``rho_0 rho_1 ...`` where
block ``d`` lists ``M (w_n + z)`` for every ``n < 2**e``, ``e = 2**d``, with
``M`` a column-rotated Pascal matrix.  Levin's constant uses the plain Pascal
matrix and ``z = 0`` in every block.

Positions are 0-based throughout: position ``pos`` holds the digit
``b_{pos+1}`` of the expansion ``0.b_1 b_2 ...``.
"""

from __future__ import annotations

import json
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache
from types import MappingProxyType
from typing import Mapping, Sequence

import numpy as np

from .errors import ResourceLimitError, ValidationError, max_d
from .gf2 import BitWord, Gf2Matrix, SuitableTuple, mat_vec, rotated_matrix

#: Largest block materialized by :func:`build_block` (2**20 digits).
MAX_BUILD_D = 4
#: Largest digit range returned by :func:`digits_range` in one call.
MAX_RANGE = 1 << 28
_POSITION_LIMIT = 1 << 63


def lex_word(e: int, n: int) -> BitWord:
    """The ``n``-th length-``e`` word in lexicographic order."""
    if not 0 <= n < (1 << e):
        raise ValueError(f"index {n} out of range for words of length {e}")
    return BitWord(n, e)


def block_length(d: int) -> int:
    """Number of digits in block ``d``: ``2**(d + 2**d)``."""
    if d < 0:
        raise ValueError(f"block index must be non-negative, got {d}")
    length = 1 << (d + (1 << d)) if d < 7 else _POSITION_LIMIT
    if length >= _POSITION_LIMIT:
        raise ResourceLimitError(f"block {d} length overflows 63-bit positions")
    return length


def cumulative_length(d: int) -> int:
    """Total number of digits in blocks ``0..d``."""
    total = sum(block_length(i) for i in range(d + 1))
    if total >= _POSITION_LIMIT:
        raise ResourceLimitError(f"cumulative length through block {d} overflows 63-bit positions")
    return total


def block_start(d: int) -> int:
    return cumulative_length(d - 1) if d > 0 else 0


@dataclass(frozen=True)
class NecklaceSpec:
    """One block: rotation tuple ``nu`` and affine shift ``z`` for index ``d``."""

    d: int
    nu: SuitableTuple
    z: BitWord

    def __post_init__(self):
        if self.d < 0:
            raise ValidationError(f"negative block index {self.d}")
        e = 1 << self.d
        if not isinstance(self.nu, SuitableTuple):
            try:
                object.__setattr__(self, "nu", SuitableTuple(self.nu))
            except ValidationError as exc:
                raise ValidationError(str(exc), block=self.d) from None
        if isinstance(self.z, str):
            object.__setattr__(self, "z", BitWord.from_str(self.z))
        if len(self.nu) != e:
            raise ValidationError(f"nu has length {len(self.nu)}, expected {e}", block=self.d)
        if self.z.length != e:
            raise ValidationError(f"z has length {self.z.length}, expected {e}", block=self.d)

    @classmethod
    def levin(cls, d: int) -> "NecklaceSpec":
        e = 1 << d
        return cls(d, SuitableTuple.zeros(e), BitWord.zeros(e))

    @property
    def e(self) -> int:
        return 1 << self.d

    @property
    def case(self) -> int:
        return self.nu.case

    @property
    def matrix(self) -> Gf2Matrix:
        return _matrix(self.d, tuple(self.nu))

    def chunk(self, n: int) -> BitWord:
        """Chunk ``n`` of the block, ``M (w_n + z)``."""
        return mat_vec(self.matrix, lex_word(self.e, n) ^ self.z)


@lru_cache(maxsize=256)
def _matrix(d: int, nu: tuple[int, ...]) -> Gf2Matrix:
    return rotated_matrix(d, nu)


@lru_cache(maxsize=256)
def _columns(d: int, nu: tuple[int, ...]) -> np.ndarray:
    return np.array(_matrix(d, nu).columns, dtype=np.uint64)


def chunk_values(spec: NecklaceSpec, n: np.ndarray) -> np.ndarray:
    """Vectorized packed chunks ``M (w_n + z)`` for an array of indices."""
    e = spec.e
    cols = _columns(spec.d, tuple(spec.nu))
    w = np.asarray(n, dtype=np.uint64) ^ np.uint64(spec.z.value)
    acc = np.zeros(w.shape, dtype=np.uint64)
    one = np.uint64(1)
    for j in range(e):
        bit = (w >> np.uint64(e - 1 - j)) & one
        acc ^= bit * cols[j]
    return acc


def _unpack(values: np.ndarray, width: int) -> np.ndarray:
    shifts = np.arange(width - 1, -1, -1, dtype=np.uint64)
    return ((values[:, None] >> shifts) & np.uint64(1)).astype(np.uint8).ravel()


def block_bits(spec: NecklaceSpec) -> np.ndarray:
    """The whole block as a uint8 digit array."""
    if spec.d > MAX_BUILD_D:
        raise ResourceLimitError(f"block {spec.d} is too long to materialize (limit d <= {MAX_BUILD_D})")
    n = np.arange(1 << spec.e, dtype=np.uint64)
    return _unpack(chunk_values(spec, n), spec.e)


def build_block(spec: NecklaceSpec) -> BitWord:
    """Concatenate ``M (w_n + z)`` over all ``n`` in lexicographic order."""
    bits = block_bits(spec)
    return BitWord(int(bits_to_str(bits), 2), len(bits))


@dataclass(frozen=True)
class ConstantSpec:
    """Per-block necklace choices; blocks not listed follow Levin's rule."""

    blocks: Mapping[int, NecklaceSpec] = field(default_factory=dict)
    default_rule: str = "levin"

    def __post_init__(self):
        if self.default_rule != "levin":
            raise ValidationError(f"unknown default rule {self.default_rule!r}")
        for d, spec in self.blocks.items():
            if spec.d != d:
                raise ValidationError(f"necklace declares d={spec.d}", block=d)
        object.__setattr__(self, "blocks", MappingProxyType(dict(sorted(self.blocks.items()))))

    @classmethod
    def levin(cls) -> "ConstantSpec":
        return cls()

    @classmethod
    def from_necklaces(cls, necklaces: Sequence[NecklaceSpec]) -> "ConstantSpec":
        blocks: dict[int, NecklaceSpec] = {}
        for nk in necklaces:
            if nk.d in blocks:
                raise ValidationError("duplicate block", block=nk.d)
            blocks[nk.d] = nk
        return cls(blocks)

    def block(self, d: int) -> NecklaceSpec:
        spec = self.blocks.get(d)
        return spec if spec is not None else NecklaceSpec.levin(d)

    def __eq__(self, other):
        if not isinstance(other, ConstantSpec):
            return NotImplemented
        return self.default_rule == other.default_rule and dict(self.blocks) == dict(other.blocks)

    def __hash__(self):
        return hash((self.default_rule, tuple(self.blocks.items())))


def locate(pos: int) -> tuple[int, int]:
    """Map a position to ``(block index, offset within block)``."""
    if pos < 0:
        raise ValueError(f"negative position {pos}")
    d = 0
    start = 0
    limit = max_d()
    while True:
        if d > limit:
            raise ResourceLimitError(
                f"position {pos} lies beyond block {limit} (configured maximum)"
            )
        length = block_length(d)
        if pos < start + length:
            return d, pos - start
        start += length
        d += 1


class DigitStream:
    """Random access to the binary expansion of a constant.

    Digits are computed arithmetically from the block structure, so nothing
    before the requested range is materialized.
    """

    def __init__(self, spec: ConstantSpec | None = None):
        self.spec = spec if spec is not None else ConstantSpec.levin()

    def __repr__(self) -> str:
        return f"DigitStream({self.spec!r})"

    def digit_at(self, pos: int) -> int:
        d, offset = locate(pos)
        nk = self.spec.block(d)
        n, j = divmod(offset, nk.e)
        return nk.chunk(n)[j]

    def digits_at(self, positions) -> np.ndarray:
        """Vectorized per-position lookup (same arithmetic path as :meth:`digit_at`)."""
        pos = np.asarray(positions, dtype=np.int64)
        out = np.zeros(pos.shape, dtype=np.uint8)
        if pos.size == 0:
            return out
        if pos.min() < 0:
            raise ValueError("negative position")
        top, _ = locate(int(pos.max()))
        starts = np.array([block_start(d) for d in range(top + 2)], dtype=np.int64)
        which = np.searchsorted(starts, pos, side="right") - 1
        for d in np.unique(which):
            d = int(d)
            mask = which == d
            nk = self.spec.block(d)
            offset = (pos[mask] - starts[d]).astype(np.uint64)
            n = offset >> np.uint64(d)
            j = offset & np.uint64(nk.e - 1)
            vals = chunk_values(nk, n)
            out[mask] = ((vals >> (np.uint64(nk.e - 1) - j)) & np.uint64(1)).astype(np.uint8)
        return out

    def _range(self, start: int, length: int) -> np.ndarray:
        pieces = []
        pos = start
        end = start + length
        while pos < end:
            d, offset = locate(pos)
            nk = self.spec.block(d)
            e = nk.e
            take = min(end - pos, block_length(d) - offset)
            first = offset // e
            last = (offset + take - 1) // e
            n = np.arange(first, last + 1, dtype=np.uint64)
            bits = _unpack(chunk_values(nk, n), e)
            skip = offset - first * e
            pieces.append(bits[skip:skip + take])
            pos += take
        if not pieces:
            return np.zeros(0, dtype=np.uint8)
        return np.concatenate(pieces)

    def digits(self, start: int, length: int, workers: int = 1) -> np.ndarray:
        """Digits at positions ``start .. start + length - 1`` as a uint8 array."""
        if start < 0 or length < 0:
            raise ValueError("start and length must be non-negative")
        if length > MAX_RANGE:
            raise ResourceLimitError(f"range of {length} digits exceeds the budget {MAX_RANGE}")
        if workers <= 1 or length < 2 * workers:
            return self._range(start, length)
        cuts = [start + (length * k) // workers for k in range(workers + 1)]
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(lambda k: self._range(cuts[k], cuts[k + 1] - cuts[k]), range(workers)))
        return np.concatenate(parts)

    def window(self, pos: int, p: int) -> int:
        """The ``p`` digits starting at ``pos`` read as a binary integer."""
        bits = self._range(pos, p)
        return int(bits_to_str(bits), 2) if p else 0


def digit_at(spec: ConstantSpec, pos: int) -> int:
    return DigitStream(spec).digit_at(pos)


def digits_range(spec: ConstantSpec, start: int, length: int, workers: int = 1) -> np.ndarray:
    return DigitStream(spec).digits(start, length, workers=workers)


def bits_to_str(bits) -> str:
    return (np.asarray(bits, dtype=np.uint8) + 48).tobytes().decode("ascii")


def pack_bits(bits) -> bytes:
    """Pack digits 8 per byte, first digit in the top bit, zero padded."""
    return np.packbits(np.asarray(bits, dtype=np.uint8)).tobytes()


def unpack_bits(data: bytes, length: int) -> np.ndarray:
    bits = np.unpackbits(np.frombuffer(data, dtype=np.uint8))
    if length > len(bits):
        raise ValueError(f"need {length} digits but only {len(bits)} are packed")
    return bits[:length]


def _parse_block(entry, index: int) -> NecklaceSpec:
    if not isinstance(entry, dict):
        raise ValidationError(f"block entry {index} must be an object")
    missing = {"d", "nu", "z"} - entry.keys()
    if missing:
        raise ValidationError(f"block entry {index} lacks {sorted(missing)}")
    extra = entry.keys() - {"d", "nu", "z"}
    if extra:
        raise ValidationError(f"block entry {index} has unknown keys {sorted(extra)}")
    d = entry["d"]
    if not isinstance(d, int) or isinstance(d, bool) or d < 0:
        raise ValidationError(f"block entry {index}: d must be a non-negative integer")
    if d > max_d():
        raise ValidationError(f"d exceeds the configured maximum {max_d()}", block=d)
    nu = entry["nu"]
    if not isinstance(nu, list) or not nu or not all(isinstance(v, int) and not isinstance(v, bool) for v in nu):
        raise ValidationError("nu must be a non-empty integer list", block=d)
    z = entry["z"]
    if not isinstance(z, str) or any(c not in "01" for c in z):
        raise ValidationError("z must be a bit string", block=d)
    return NecklaceSpec(d, nu, BitWord.from_str(z))


def parse_constant_spec(text: str) -> ConstantSpec:
    """Parse the JSON constant-spec format ``{"default": "levin", "blocks": [...]}``."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ValidationError(f"malformed spec: {exc}") from None
    if not isinstance(doc, dict):
        raise ValidationError("spec must be a JSON object")
    extra = doc.keys() - {"default", "blocks"}
    if extra:
        raise ValidationError(f"unknown top-level keys {sorted(extra)}")
    rule = doc.get("default", "levin")
    if rule != "levin":
        raise ValidationError(f"unknown default rule {rule!r}")
    blocks = doc.get("blocks", [])
    if not isinstance(blocks, list):
        raise ValidationError("blocks must be a list")
    return ConstantSpec.from_necklaces([_parse_block(b, i) for i, b in enumerate(blocks)])


def serialize_constant_spec(spec: ConstantSpec) -> str:
    """Canonical JSON: fixed key order, blocks sorted by ``d``, compact separators."""
    doc = {
        "default": spec.default_rule,
        "blocks": [
            {"d": nk.d, "nu": list(nk.nu), "z": str(nk.z)} for nk in spec.blocks.values()
        ],
    }
    return json.dumps(doc, separators=(",", ":"))


def load_constant_spec(path) -> ConstantSpec:
    with open(path, encoding="utf-8") as fh:
        return parse_constant_spec(fh.read())


LEVIN = ConstantSpec.levin()
