"""CSS codes: validation, syndromes and bounded-distance decoding.

H1 detects bit flips and H2 detects phase flips. The decoder is a lookup
table from syndrome to the unique error of weight at most ``t``; it is built
once, when the code is validated.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass, field
from pathlib import Path

from .gf2 import BitMatrix, BitVec, DimensionError, mat_vec_mul

HAMMING_7_4 = ("1010101", "0110011", "0001111")


class CodeError(ValueError):
    """A CSS code failed validation."""


class CheckType(enum.Enum):
    BIT = "bit"
    PHASE = "phase"


def _low_weight_masks(n: int, t: int):
    """Yield every n-bit mask of weight <= t, lightest first."""
    for w in range(t + 1):
        for support in itertools.combinations(range(n), w):
            m = 0
            for i in support:
                m |= 1 << i
            yield m


def _syndrome_table(H: BitMatrix, t: int, name: str) -> dict[int, int]:
    n = H.n_cols
    rows = [r.mask for r in H.rows]
    table: dict[int, int] = {}
    for e in _low_weight_masks(n, t):
        s = 0
        for i, r in enumerate(rows):
            if (r & e).bit_count() & 1:
                s |= 1 << i
        prev = table.get(s)
        if prev is not None:
            raise CodeError(
                f"{name}: errors {BitVec(n, prev)} and {BitVec(n, e)} share syndrome "
                f"{BitVec(H.n_rows, s)}; capability t={t} is not achievable"
            )
        table[s] = e
    return table


@dataclass(frozen=True, eq=False)
class CssCode:
    """A validated CSS code. Build through :func:`build_css`."""

    n: int
    H1: BitMatrix
    H2: BitMatrix
    G2: BitMatrix
    t: int
    _tables: dict[CheckType, dict[int, int]] = field(repr=False)

    def check_matrix(self, which: CheckType) -> BitMatrix:
        return self.H1 if which is CheckType.BIT else self.H2

    def table(self, which: CheckType) -> dict[int, int]:
        """Syndrome mask -> coset-leader mask for ``which``."""
        return self._tables[which]


def build_css(H1: BitMatrix, H2: BitMatrix, G2: BitMatrix, t: int) -> CssCode:
    """Validate the inputs and return a :class:`CssCode`.

    Raises:
        DimensionError: if the three matrices disagree on the column count.
        CodeError: if ``t < 1``, some row of G2 fails an H1 check, or two
            errors of weight <= t share a syndrome under H1 or H2.
    """
    n = H1.n_cols
    if H2.n_cols != n or G2.n_cols != n:
        raise DimensionError(
            f"column counts differ: H1 has {n}, H2 has {H2.n_cols}, G2 has {G2.n_cols}"
        )
    if t < 1:
        raise CodeError(f"capability t must be >= 1, got {t}")
    for i, g in enumerate(G2.rows):
        if not mat_vec_mul(H1, g).is_zero():
            raise CodeError(f"G2 row {i} ({g}) is not a codeword of C1: H1*g != 0")
    tables = {
        CheckType.BIT: _syndrome_table(H1, t, "H1"),
        CheckType.PHASE: _syndrome_table(H2, t, "H2"),
    }
    return CssCode(n=n, H1=H1, H2=H2, G2=G2, t=t, _tables=tables)


def steane_code() -> CssCode:
    """The [[7,1,3]] Steane code: H1 = H2 = G2 = Hamming(7,4) checks, t = 1."""
    H = BitMatrix.from_strings(HAMMING_7_4)
    return build_css(H, H, H, 1)


def syndrome(code: CssCode, which: CheckType, e: BitVec) -> BitVec:
    if len(e) != code.n:
        raise DimensionError(f"error length {len(e)} != code length {code.n}")
    return mat_vec_mul(code.check_matrix(which), e)


def decode_bdd(code: CssCode, which: CheckType, s: BitVec) -> BitVec | None:
    """Return the unique error of weight <= t with syndrome ``s``, or None."""
    r = code.check_matrix(which).n_rows
    if len(s) != r:
        raise DimensionError(f"syndrome length {len(s)} != {r} checks")
    e = code.table(which).get(s.mask)
    return None if e is None else BitVec._raw(code.n, e)


def _blocks(text: str) -> list[list[str]]:
    blocks: list[list[str]] = []
    current: list[str] = []
    for raw in text.splitlines():
        line = raw.split("#", 1)[0].strip()
        if line:
            current.append(line)
        elif current:
            blocks.append(current)
            current = []
    if current:
        blocks.append(current)
    return blocks


def parse_code(text: str) -> CssCode:
    """Parse the plain-text code format.

    The first block holds the integers ``n`` and ``t``; the next three blocks
    are H1, H2 and G2 as rows of 0/1 characters. Blocks are separated by blank
    lines and ``#`` starts a comment.
    """
    blocks = _blocks(text)
    if len(blocks) != 4:
        raise CodeError(f"expected 4 blocks (header, H1, H2, G2), found {len(blocks)}")
    header = " ".join(blocks[0]).split()
    if len(header) != 2:
        raise CodeError(f"header must hold exactly n and t, got {header}")
    try:
        n, t = (int(x) for x in header)
    except ValueError as exc:
        raise CodeError(f"header is not two integers: {header}") from exc
    H1, H2, G2 = (BitMatrix.from_strings(b, n) for b in blocks[1:])
    return build_css(H1, H2, G2, t)


def load_code(path: str | Path) -> CssCode:
    return parse_code(Path(path).read_text())


def format_code(code: CssCode) -> str:
    return f"{code.n} {code.t}\n\n{code.H1}\n\n{code.H2}\n\n{code.G2}\n"
