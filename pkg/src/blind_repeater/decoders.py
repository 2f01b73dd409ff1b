"""Blind-mode decoders that read only a :class:`MeasurementRecord`.

The posterior decoder splits the accumulated error into one piece per
interval between consecutive syndrome rounds. The piece for level j is found
from::

    d_j = s_EPP(j) + H * e_ES(j) + s_EPP(j-1)        (all over GF(2))

so each interval only needs its own error to be within the code's capability.
The conventional decoder decodes the final syndrome in one shot.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass

from .bell import EsOutcome, PauliFrame
from .chain import MeasurementRecord, TruthFrame
from .css import CheckType, CssCode, decode_bdd
from .gf2 import BitVec, mat_vec_mul, row_space_contains


class Judgment(enum.Enum):
    EXACT_SUCCESS = "exact_success"
    LOGICAL_SUCCESS = "logical_success"
    FAILURE = "failure"


@dataclass(frozen=True)
class DecodeResult:
    estimate: PauliFrame
    per_interval: tuple[tuple[BitVec | None, BitVec | None], ...]
    failed_intervals: tuple[tuple[int, CheckType], ...]

    def to_dict(self) -> dict:
        return {
            "estimate": {"a": str(self.estimate.a), "b": str(self.estimate.b)},
            "per_interval": [
                {"bit": None if bp is None else str(bp), "phase": None if pp is None else str(pp)}
                for bp, pp in self.per_interval
            ],
            "failed_intervals": [[j, w.value] for j, w in self.failed_intervals],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True)

    @classmethod
    def from_dict(cls, d: dict) -> DecodeResult:
        def vec(s):
            return None if s is None else BitVec.from_str(s)

        return cls(
            PauliFrame(BitVec.from_str(d["estimate"]["a"]), BitVec.from_str(d["estimate"]["b"])),
            tuple((vec(p["bit"]), vec(p["phase"])) for p in d["per_interval"]),
            tuple((int(j), CheckType(w)) for j, w in d["failed_intervals"]),
        )


def integrate_es(record: MeasurementRecord, j: int) -> EsOutcome:
    """XOR of every level-j swap outcome: the level's base shift end to end."""
    outs = record.level(j).es_outcomes
    mx = mz = 0
    for o in outs:
        mx ^= o.mx.mask
        mz ^= o.mz.mask
    n = outs[0].n
    return EsOutcome(BitVec._raw(n, mx), BitVec._raw(n, mz))


def integrate_epp(record: MeasurementRecord, j: int) -> tuple[BitVec, BitVec]:
    """XOR of the level-j relative syndromes, as (bit, phase)."""
    syns = record.level(j).epp_syndromes
    sb = sp = 0
    for b, p in syns:
        sb ^= b.mask
        sp ^= p.mask
    return BitVec._raw(len(syns[0][0]), sb), BitVec._raw(len(syns[0][1]), sp)


def _level_masks(record: MeasurementRecord) -> list[tuple[int, int, int, int]]:
    """Per level: integrated (mx, mz) swap shift and (bit, phase) syndrome, as raw masks."""
    out = []
    for lv in record.levels:
        mx = mz = sb = sp = 0
        for o in lv.es_outcomes:
            mx ^= o.mx.mask
            mz ^= o.mz.mask
        for b, p in lv.epp_syndromes:
            sb ^= b.mask
            sp ^= p.mask
        out.append((mx, mz, sb, sp))
    return out


def _interval_syndromes(code: CssCode, levels: list[tuple[int, int, int, int]]) -> list[tuple[BitVec, BitVec]]:
    """(bit, phase) interval syndromes for j = 1..gamma."""
    rb, rp = code.H1.n_rows, code.H2.n_rows
    out = []
    prev_b = prev_p = 0
    for mx, mz, sb, sp in levels:
        d_b = sb ^ code.H1.product_mask(mx) ^ prev_b
        d_p = sp ^ code.H2.product_mask(mz) ^ prev_p
        out.append((BitVec._raw(rb, d_b), BitVec._raw(rp, d_p)))
        prev_b, prev_p = sb, sp
    return out


def _total_shift(n: int, levels: list[tuple[int, int, int, int]]) -> EsOutcome:
    mx = mz = 0
    for lx, lz, _, _ in levels:
        mx ^= lx
        mz ^= lz
    return EsOutcome(BitVec._raw(n, mx), BitVec._raw(n, mz))


def interval_syndrome(record: MeasurementRecord, code: CssCode, j: int, which: CheckType) -> BitVec:
    """Syndrome of the error that arose between syndrome rounds j-1 and j."""
    es = integrate_es(record, j)
    shift = es.mx if which is CheckType.BIT else es.mz
    k = 0 if which is CheckType.BIT else 1
    d = integrate_epp(record, j)[k] ^ mat_vec_mul(code.check_matrix(which), shift)
    if j > 1:
        d = d ^ integrate_epp(record, j - 1)[k]
    return d


def total_es_shift(record: MeasurementRecord) -> EsOutcome:
    return _total_shift(record.level(1).es_outcomes[0].n, _level_masks(record))


def _fold(shift: EsOutcome, decoded, failed_at) -> tuple[PauliFrame, list]:
    a, b = shift.mx, shift.mz
    failed = []
    for j, (bit, phase) in zip(failed_at, decoded):
        if bit is None:
            failed.append((j, CheckType.BIT))
        else:
            a = a ^ bit
        if phase is None:
            failed.append((j, CheckType.PHASE))
        else:
            b = b ^ phase
    return PauliFrame(a, b), failed


def decode_posterior(record: MeasurementRecord, code: CssCode, descending: bool = False) -> DecodeResult:
    """Decode each interval on its own, then add all parts and swap shifts."""
    levels = _level_masks(record)
    decoded = [
        (decode_bdd(code, CheckType.BIT, d_b), decode_bdd(code, CheckType.PHASE, d_p))
        for d_b, d_p in _interval_syndromes(code, levels)
    ]
    js = list(range(1, record.gamma + 1))
    order = js[::-1] if descending else js
    estimate, failed = _fold(_total_shift(code.n, levels), [decoded[j - 1] for j in order], order)
    failed.sort(key=lambda f: (f[0], f[1].value))
    return DecodeResult(estimate, tuple(decoded), tuple(failed))


def decode_conventional(record: MeasurementRecord, code: CssCode) -> DecodeResult:
    """Single bounded-distance decode of the final syndrome, ES shifts removed."""
    levels = _level_masks(record)
    shift = _total_shift(code.n, levels)
    _, _, sb, sp = levels[-1]
    bit = decode_bdd(code, CheckType.BIT, BitVec._raw(code.H1.n_rows, sb ^ code.H1.product_mask(shift.mx.mask)))
    phase = decode_bdd(code, CheckType.PHASE, BitVec._raw(code.H2.n_rows, sp ^ code.H2.product_mask(shift.mz.mask)))
    estimate, failed = _fold(shift, [(bit, phase)], [record.gamma])
    return DecodeResult(estimate, ((bit, phase),), tuple(failed))


def judge(result: DecodeResult, truth: TruthFrame, code: CssCode, allow_logical: bool = False) -> Judgment:
    residual = result.estimate ^ truth.frame
    if residual.is_zero():
        return Judgment.EXACT_SUCCESS
    if allow_logical and row_space_contains(code.G2, residual.a) and row_space_contains(code.G2, residual.b):
        return Judgment.LOGICAL_SUCCESS
    return Judgment.FAILURE


DECODERS = {
    "posterior": decode_posterior,
    "conventional": decode_conventional,
}
