"""Dense GF(2) vectors and matrices.

Bits are packed into a Python ``int``: bit ``i`` of the mask is position ``i``
of the vector, and position 0 is printed leftmost. Values are immutable.
"""

from __future__ import annotations

from collections.abc import Iterable, Sequence

import numpy as np


class DimensionError(ValueError):
    """Raised when operand lengths or shapes do not line up."""


class BitVec:
    """Fixed-length vector over GF(2)."""

    __slots__ = ("_mask", "_length")

    def __init__(self, length: int, mask: int = 0):
        if length < 1:
            raise DimensionError(f"BitVec length must be positive, got {length}")
        if mask < 0 or mask >> length:
            raise DimensionError(f"mask {mask:#x} does not fit in {length} bits")
        self._mask = mask
        self._length = length

    @classmethod
    def _raw(cls, length: int, mask: int) -> BitVec:
        # trusted constructor for results of operations on valid vectors
        v = object.__new__(cls)
        v._mask = mask
        v._length = length
        return v

    @classmethod
    def zeros(cls, length: int) -> BitVec:
        return cls(length, 0)

    @classmethod
    def unit(cls, length: int, index: int) -> BitVec:
        """Vector with a single 1 at 0-based ``index``."""
        if not 0 <= index < length:
            raise IndexError(f"index {index} out of range for length {length}")
        return cls(length, 1 << index)

    @classmethod
    def from_bits(cls, bits: Iterable[int]) -> BitVec:
        mask = 0
        n = 0
        for i, b in enumerate(bits):
            if b not in (0, 1, True, False):
                raise ValueError(f"bit {i} is {b!r}, expected 0 or 1")
            if b:
                mask |= 1 << i
            n = i + 1
        return cls(n, mask)

    @classmethod
    def from_str(cls, text: str) -> BitVec:
        text = text.strip()
        if not text or set(text) - {"0", "1"}:
            raise ValueError(f"not a 0/1 string: {text!r}")
        return cls.from_bits(int(c) for c in text)

    @classmethod
    def from_support(cls, length: int, support: Iterable[int]) -> BitVec:
        v = cls(length)
        for i in support:
            v = v ^ cls.unit(length, i)
        return v

    @property
    def mask(self) -> int:
        return self._mask

    def __len__(self) -> int:
        return self._length

    def __getitem__(self, index: int) -> int:
        if not 0 <= index < self._length:
            raise IndexError(f"index {index} out of range for length {self._length}")
        return (self._mask >> index) & 1

    def __iter__(self):
        m = self._mask
        for i in range(self._length):
            yield (m >> i) & 1

    def _check(self, other: BitVec) -> None:
        if not isinstance(other, BitVec):
            raise TypeError(f"expected BitVec, got {type(other).__name__}")
        if other._length != self._length:
            raise DimensionError(f"length mismatch: {self._length} vs {other._length}")

    def __xor__(self, other: BitVec) -> BitVec:
        if other.__class__ is not BitVec or other._length != self._length:
            self._check(other)
        return BitVec._raw(self._length, self._mask ^ other._mask)

    __add__ = __xor__
    __sub__ = __xor__

    def __and__(self, other: BitVec) -> BitVec:
        self._check(other)
        return BitVec._raw(self._length, self._mask & other._mask)

    def dot(self, other: BitVec) -> int:
        self._check(other)
        return (self._mask & other._mask).bit_count() & 1

    def weight(self) -> int:
        return self._mask.bit_count()

    def is_zero(self) -> bool:
        return self._mask == 0

    def support(self) -> list[int]:
        return [i for i in range(self._length) if (self._mask >> i) & 1]

    def to_numpy(self) -> np.ndarray:
        return np.fromiter(self, dtype=np.uint8, count=self._length)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitVec):
            return NotImplemented
        return self._length == other._length and self._mask == other._mask

    def __hash__(self) -> int:
        return hash((self._length, self._mask))

    def __str__(self) -> str:
        return "".join("1" if (self._mask >> i) & 1 else "0" for i in range(self._length))

    def __repr__(self) -> str:
        return f"BitVec('{self}')"


class BitMatrix:
    """Dense matrix over GF(2), stored as a tuple of row vectors."""

    __slots__ = ("_rows", "_cols", "_masks", "_products")

    # products are memoized for matrices at most this wide
    MEMO_MAX_COLS = 16

    def __init__(self, rows: Sequence[BitVec], cols: int | None = None):
        rows = tuple(rows)
        if cols is None:
            if not rows:
                raise DimensionError("cannot infer column count of an empty matrix")
            cols = len(rows[0])
        for i, r in enumerate(rows):
            if len(r) != cols:
                raise DimensionError(f"row {i} has {len(r)} entries, expected {cols}")
        self._rows = rows
        self._cols = cols
        self._masks = tuple(r.mask for r in rows)
        self._products: dict[int, int] | None = {} if cols <= self.MEMO_MAX_COLS else None

    def __getstate__(self):
        return (self._rows, self._cols)

    def __setstate__(self, state):
        self.__init__(*state)

    def product_mask(self, vmask: int) -> int:
        """Mask of ``M @ v`` for a vector given by its mask (no length check)."""
        memo = self._products
        if memo is not None:
            out = memo.get(vmask)
            if out is not None:
                return out
        out = 0
        for i, r in enumerate(self._masks):
            if (r & vmask).bit_count() & 1:
                out |= 1 << i
        if memo is not None:
            memo[vmask] = out
        return out

    @classmethod
    def from_strings(cls, lines: Iterable[str], cols: int | None = None) -> BitMatrix:
        return cls([BitVec.from_str(s) for s in lines if s.strip()], cols)

    @classmethod
    def from_text(cls, text: str, cols: int | None = None) -> BitMatrix:
        return cls.from_strings(text.splitlines(), cols)

    @classmethod
    def from_array(cls, array) -> BitMatrix:
        a = np.asarray(array, dtype=np.uint8)
        if a.ndim != 2:
            raise DimensionError(f"expected a 2-D array, got shape {a.shape}")
        if np.any(a > 1):
            raise ValueError("array entries must be 0 or 1")
        return cls([BitVec.from_bits(int(x) for x in row) for row in a], a.shape[1])

    @property
    def rows(self) -> tuple[BitVec, ...]:
        return self._rows

    @property
    def n_rows(self) -> int:
        return len(self._rows)

    @property
    def n_cols(self) -> int:
        return self._cols

    @property
    def shape(self) -> tuple[int, int]:
        return (len(self._rows), self._cols)

    def column(self, j: int) -> BitVec:
        return BitVec.from_bits(r[j] for r in self._rows)

    def to_numpy(self) -> np.ndarray:
        out = np.zeros(self.shape, dtype=np.uint8)
        for i, r in enumerate(self._rows):
            out[i] = r.to_numpy()
        return out

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BitMatrix):
            return NotImplemented
        return self._cols == other._cols and self._rows == other._rows

    def __hash__(self) -> int:
        return hash((self._cols, self._rows))

    def __str__(self) -> str:
        return "\n".join(str(r) for r in self._rows)

    def __repr__(self) -> str:
        return f"BitMatrix({[str(r) for r in self._rows]!r})"


def mat_vec_mul(M: BitMatrix, v: BitVec) -> BitVec:
    """GF(2) product ``M @ v``; the result has one bit per row of ``M``."""
    if len(v) != M.n_cols:
        raise DimensionError(f"vector length {len(v)} != matrix columns {M.n_cols}")
    if not M.n_rows:
        raise DimensionError("matrix has no rows")
    return BitVec._raw(M.n_rows, M.product_mask(v.mask))


def weight(v: BitVec) -> int:
    """Number of 1 bits in ``v``."""
    return v.weight()


def _echelon_masks(masks: Iterable[int]) -> dict[int, int]:
    """Reduce row masks to a pivot table ``{lowest set bit: row}``."""
    pivots: dict[int, int] = {}
    for m in masks:
        m = _reduce(m, pivots)
        if m:
            pivots[m & -m] = m
    return pivots


def _reduce(m: int, pivots: dict[int, int]) -> int:
    # pivot rows have distinct lowest bits, so an unmatched lowest bit is final
    while m:
        row = pivots.get(m & -m)
        if row is None:
            return m
        m ^= row
    return m


def rank(M: BitMatrix) -> int:
    return len(_echelon_masks(r.mask for r in M.rows))


def row_space_contains(M: BitMatrix, v: BitVec) -> bool:
    """True iff ``v`` is a GF(2) combination of the rows of ``M``."""
    if len(v) != M.n_cols:
        raise DimensionError(f"vector length {len(v)} != matrix columns {M.n_cols}")
    pivots = _echelon_masks(r.mask for r in M.rows)
    return _reduce(v.mask, pivots) == 0
