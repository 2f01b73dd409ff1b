"""Repeater chain: timed schedule, Pauli noise and frame-level execution.

The chain has ``N = 2**gamma`` segments between relay points C_0..C_N. Every
operation sits on a fixed time grid::

    t = 0          Generate at C_0..C_{N-1}
    t = 1          TransmitRight (channel noise on the travelling halves)
    t = 2x         BellMeasure(x) at the level-x midpoints
    t = 2x + 1     SyndromeMeasure(x) at both ends of every level-x pair

Memory noise hits every stored qubit once per step from t = 1 up to and
including the final syndrome measurement. Pauli noise on either half of a
pair flips the same bit of the pair frame, so each frame is booked on the
receiver side only.
"""

from __future__ import annotations

import enum
from collections.abc import Sequence
from dataclasses import dataclass, field

import numpy as np

from .bell import EsOutcome, PauliFrame
from .css import CheckType, CssCode
from .gf2 import BitVec, DimensionError


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class ChainConfig:
    gamma: int
    code: CssCode

    def __post_init__(self):
        if not isinstance(self.gamma, int) or self.gamma < 1:
            raise ConfigError(f"gamma must be an integer >= 1, got {self.gamma!r}")

    @property
    def N(self) -> int:
        return 2**self.gamma

    @property
    def n(self) -> int:
        return self.code.n


@dataclass(frozen=True)
class NoiseModel:
    p_ch_x: float = 0.0
    p_ch_z: float = 0.0
    p_mem_x: float = 0.0
    p_mem_z: float = 0.0

    def __post_init__(self):
        for name in ("p_ch_x", "p_ch_z", "p_mem_x", "p_mem_z"):
            p = getattr(self, name)
            if not 0.0 <= p <= 1.0:
                raise ConfigError(f"{name}={p} is not a probability")

    @classmethod
    def uniform(cls, p: float) -> NoiseModel:
        return cls(p, p, p, p)


class Op(enum.Enum):
    GENERATE = "Generate"
    TRANSMIT_RIGHT = "TransmitRight"
    BELL_MEASURE = "BellMeasure"
    SYNDROME_MEASURE = "SyndromeMeasure"
    IDLE = "Idle"


class Mode(enum.Enum):
    BLIND = "blind"
    INTERLEAVED = "interleaved"


@dataclass(frozen=True, order=True)
class Command:
    time: int
    relay_id: int
    op: Op = field(compare=False)
    level: int | None = field(default=None, compare=False)

    def op_text(self) -> str:
        return self.op.value if self.level is None else f"{self.op.value}({self.level})"


@dataclass(frozen=True)
class Schedule:
    gamma: int
    commands: tuple[Command, ...]

    @property
    def N(self) -> int:
        return 2**self.gamma

    @property
    def duration(self) -> int:
        return max(c.time for c in self.commands) - min(c.time for c in self.commands)

    def at(self, op: Op, level: int | None = None) -> list[Command]:
        return [c for c in self.commands if c.op is op and (level is None or c.level == level)]

    def validate(self) -> None:
        """Check midpoint/endpoint placement and per-level time ordering."""
        last = -1
        for x in range(1, self.gamma + 1):
            es = self.at(Op.BELL_MEASURE, x)
            want = [k * 2 ** (x - 1) for k in range(1, self.N // 2 ** (x - 1), 2)]
            if sorted(c.relay_id for c in es) != want:
                raise ConfigError(f"level {x} BellMeasure relays {[c.relay_id for c in es]} != {want}")
            times = {c.time for c in es}
            if len(times) != 1 or min(times) <= last:
                raise ConfigError(f"level {x} BellMeasure times {sorted(times)} not after {last}")
            last = times.pop()
            epp = self.at(Op.SYNDROME_MEASURE, x)
            ends = [k * 2**x for k in range(self.N // 2**x + 1)]
            if sorted({c.relay_id for c in epp}) != ends:
                raise ConfigError(f"level {x} SyndromeMeasure relays do not cover {ends}")

    def to_text(self) -> str:
        lines = ["relay_id\ttime\top"]
        lines += [f"{c.relay_id}\t{c.time}\t{c.op_text()}" for c in self.commands]
        return "\n".join(lines) + "\n"


def build_schedule(gamma: int) -> Schedule:
    if gamma < 1:
        raise ConfigError(f"gamma must be >= 1, got {gamma}")
    N = 2**gamma
    cmds = [Command(0, i, Op.GENERATE) for i in range(N)]
    cmds += [Command(1, i, Op.TRANSMIT_RIGHT) for i in range(N)]
    for x in range(1, gamma + 1):
        half = 2 ** (x - 1)
        cmds += [Command(2 * x, k * half, Op.BELL_MEASURE, x) for k in range(1, N // half, 2)]
        # a pair end shared by two neighbouring pairs measures once per pair
        for k in range(N // 2**x):
            cmds.append(Command(2 * x + 1, k * 2**x, Op.SYNDROME_MEASURE, x))
            cmds.append(Command(2 * x + 1, (k + 1) * 2**x, Op.SYNDROME_MEASURE, x))
    return Schedule(gamma, tuple(sorted(cmds)))


@dataclass(frozen=True)
class LevelRecord:
    es_outcomes: tuple[EsOutcome, ...]
    epp_syndromes: tuple[tuple[BitVec, BitVec], ...]  # (bit, phase) per pair


@dataclass(frozen=True)
class MeasurementRecord:
    """Everything a decoder may look at; ``levels[j - 1]`` is level j."""

    levels: tuple[LevelRecord, ...]

    @property
    def gamma(self) -> int:
        return len(self.levels)

    def level(self, j: int) -> LevelRecord:
        if not 1 <= j <= self.gamma:
            raise ValueError(f"level {j} outside 1..{self.gamma}")
        return self.levels[j - 1]

    def with_outcomes(self, outcomes: Sequence[Sequence[EsOutcome]]) -> MeasurementRecord:
        return MeasurementRecord(
            tuple(LevelRecord(tuple(o), lv.epp_syndromes) for lv, o in zip(self.levels, outcomes))
        )


@dataclass(frozen=True)
class TruthFrame:
    frame: PauliFrame


@dataclass(frozen=True)
class TrialMeta:
    duration_steps: int
    storage_qubit_steps: int
    correction_failures: int = 0  # interleaved mode: decodes with no match within t


@dataclass(frozen=True)
class Injection:
    """Deterministic error added in interval ``j`` to level-j pair ``pair``."""

    j: int
    which: CheckType
    e: BitVec
    pair: int = 0


def storage_qubit_steps(gamma: int, n: int) -> int:
    N = 2**gamma
    total = N * n  # t = 1: sender halves wait while the others travel
    for x in range(1, gamma + 1):
        total += 2 * n * (N >> (x - 1)) + 2 * n * (N >> x)
    return total


def pack_rows(bits: np.ndarray) -> list[int]:
    packed = np.packbits(bits, axis=-1, bitorder="little")
    return [int.from_bytes(row.tobytes(), "little") for row in packed]


class _Source:
    """Error and outcome supply for one execution."""

    def channel(self, frames: list[list[int]]) -> None: ...

    def memory(self, frames: list[list[int]], halves: int) -> None: ...

    def outcomes(self, level: int, count: int) -> list[tuple[int, int]]:
        raise NotImplementedError

    def inject(self, level: int, frames: list[list[int]]) -> None: ...


class _RandomSource(_Source):
    def __init__(self, n: int, noise: NoiseModel, rng: np.random.Generator):
        self.n = n
        self.noise = noise
        self.rng = rng

    def _flips(self, count: int, halves: int, p: float) -> list[int]:
        if p == 0.0:
            return [0] * count
        hits = self.rng.random((count, halves, self.n)) < p
        return pack_rows(np.bitwise_xor.reduce(hits, axis=1))

    def _apply(self, frames, halves, px, pz):
        for f, ex, ez in zip(frames, self._flips(len(frames), halves, px), self._flips(len(frames), halves, pz)):
            f[0] ^= ex
            f[1] ^= ez

    def channel(self, frames):
        self._apply(frames, 1, self.noise.p_ch_x, self.noise.p_ch_z)

    def memory(self, frames, halves):
        self._apply(frames, halves, self.noise.p_mem_x, self.noise.p_mem_z)

    def outcomes(self, level, count):
        draws = self.rng.integers(0, 2, size=(count, 2, self.n), dtype=np.uint8)
        mx = pack_rows(draws[:, 0, :])
        mz = pack_rows(draws[:, 1, :])
        return list(zip(mx, mz))


class _InjectionSource(_Source):
    def __init__(self, gamma: int, n: int, injections: Sequence[Injection], outcomes):
        self.n = n
        self.by_level: dict[int, list[Injection]] = {}
        N = 2**gamma
        for inj in injections:
            if not 1 <= inj.j <= gamma:
                raise ConfigError(f"injection interval {inj.j} outside 1..{gamma}")
            if len(inj.e) != n:
                raise DimensionError(f"injection length {len(inj.e)} != code length {n}")
            if not 0 <= inj.pair < N >> inj.j:
                raise ConfigError(f"injection pair {inj.pair} does not exist at level {inj.j}")
            self.by_level.setdefault(inj.j, []).append(inj)
        if outcomes is not None:
            if len(outcomes) != gamma:
                raise ConfigError(f"expected outcomes for {gamma} levels, got {len(outcomes)}")
            for j, row in enumerate(outcomes, start=1):
                if len(row) != N >> j:
                    raise ConfigError(f"level {j} needs {N >> j} outcomes, got {len(row)}")
                for o in row:
                    if o.n != n:
                        raise DimensionError(f"outcome length {o.n} != code length {n}")
        self.fixed = outcomes

    def outcomes(self, level, count):
        if self.fixed is None:
            return [(0, 0)] * count
        return [(o.mx.mask, o.mz.mask) for o in self.fixed[level - 1]]

    def inject(self, level, frames):
        for inj in self.by_level.get(level, ()):
            frames[inj.pair][0 if inj.which is CheckType.BIT else 1] ^= inj.e.mask


def _execute(cfg: ChainConfig, mode: Mode, source: _Source) -> tuple[MeasurementRecord, TruthFrame, int]:
    code = cfg.code
    n = code.n
    h1, h2 = code.H1.product_mask, code.H2.product_mask
    r1, r2 = code.H1.n_rows, code.H2.n_rows
    vec = BitVec._raw
    tab_bit, tab_phase = code.table(CheckType.BIT), code.table(CheckType.PHASE)

    frames = [[0, 0] for _ in range(cfg.N)]
    source.channel(frames)
    source.memory(frames, 1)
    levels = []
    misses = 0
    for x in range(1, cfg.gamma + 1):
        source.memory(frames, 2)
        pairs = len(frames) // 2
        outs = source.outcomes(x, pairs)
        frames = [
            [frames[2 * k][0] ^ frames[2 * k + 1][0] ^ mx, frames[2 * k][1] ^ frames[2 * k + 1][1] ^ mz]
            for k, (mx, mz) in enumerate(outs)
        ]
        source.memory(frames, 2)
        source.inject(x, frames)
        syns = [(h1(a), h2(b)) for a, b in frames]
        if mode is Mode.INTERLEAVED:
            for f, (sa, sb), (mx, mz) in zip(frames, syns, outs):
                ex = tab_bit.get(sa ^ h1(mx))
                ez = tab_phase.get(sb ^ h2(mz))
                misses += (ex is None) + (ez is None)
                f[0] ^= mx ^ (ex or 0)
                f[1] ^= mz ^ (ez or 0)
        levels.append(
            LevelRecord(
                tuple(EsOutcome(vec(n, mx), vec(n, mz)) for mx, mz in outs),
                tuple((vec(r1, sa), vec(r2, sb)) for sa, sb in syns),
            )
        )
    (a, b), = frames
    return MeasurementRecord(tuple(levels)), TruthFrame(PauliFrame(BitVec(n, a), BitVec(n, b))), misses


def run_trial(
    cfg: ChainConfig, noise: NoiseModel, seed: int, mode: Mode = Mode.BLIND
) -> tuple[MeasurementRecord, TruthFrame, TrialMeta]:
    """Simulate one run of the schedule with random Pauli noise.

    Blind mode applies no corrections. Interleaved mode corrects every pair
    right after its syndrome measurement, using the swapping outcome and the
    bounded-distance estimate, so the returned truth is the residual frame.
    """
    source = _RandomSource(cfg.n, noise, np.random.default_rng(seed))
    record, truth, misses = _execute(cfg, Mode(mode), source)
    meta = TrialMeta(2 * cfg.gamma + 1, storage_qubit_steps(cfg.gamma, cfg.n), misses)
    return record, truth, meta


def run_with_injections(
    cfg: ChainConfig,
    injections: Sequence[Injection | tuple] = (),
    es_outcomes: Sequence[Sequence[EsOutcome]] | None = None,
    mode: Mode = Mode.BLIND,
) -> tuple[MeasurementRecord, TruthFrame]:
    """Noise-free run with the given errors and (default all-zero) swap outcomes.

    Interval ``j`` covers everything from EPP(j-1) up to EPP(j), so an error
    injected at ``j`` is added to the level-j pair just before its syndrome
    is read. Channel noise belongs to interval 1.
    """
    injections = [i if isinstance(i, Injection) else Injection(*i) for i in injections]
    source = _InjectionSource(cfg.gamma, cfg.n, injections, es_outcomes)
    record, truth, _ = _execute(cfg, Mode(mode), source)
    return record, truth
