"""Experiment driver: Monte Carlo sweeps, exhaustive enumeration and reports."""

from __future__ import annotations

import csv
import io
import itertools
import json
import math
import os
import random
from collections.abc import Iterable, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .bell import EsOutcome
from .chain import (
    ChainConfig,
    ConfigError,
    Injection,
    Mode,
    NoiseModel,
    run_trial,
    run_with_injections,
    storage_qubit_steps,
)
from .css import CheckType, CssCode, load_code, steane_code
from .decoders import DECODERS, Judgment, decode_conventional, decode_posterior, judge
from .gf2 import BitVec, row_space_contains

WORKERS_ENV = "BLIND_REPEATER_WORKERS"
MAX_PATTERNS = 10**7
Z95 = 1.959963984540054

CSV_COLUMNS = (
    "decoder", "gamma", "n", "p_ch_x", "p_ch_z", "p_mem_x", "p_mem_z", "trials",
    "exact_success", "logical_success", "bdd_failures", "wilson_halfwidth", "duration_steps",
)
KNOWN_DECODERS = ("posterior", "conventional", "interleaved")


class EnumerationTooLarge(ValueError):
    def __init__(self, count: int, limit: int = MAX_PATTERNS):
        super().__init__(f"enumeration would visit {count} patterns (limit {limit})")
        self.count = count


@dataclass(frozen=True)
class ResourceReport:
    N: int
    n: int
    gamma: int
    pairs_single: int
    pairs_concatenated: int


def resource_count(N: int, n: int, gamma: int) -> ResourceReport:
    """EPR pairs used with single encoding (N*n) versus concatenation (N*n**gamma)."""
    if gamma < 1 or N != 2**gamma:
        raise ConfigError(f"N={N} does not equal 2**gamma for gamma={gamma}")
    if n < 1:
        raise ConfigError(f"code length must be positive, got {n}")
    return ResourceReport(N, n, gamma, N * n, N * n**gamma)


def wilson_halfwidth(successes: int, trials: int, z: float = Z95) -> float:
    if trials <= 0:
        return 0.0
    p = successes / trials
    denom = 1.0 + z * z / trials
    return z * math.sqrt(p * (1 - p) / trials + z * z / (4 * trials * trials)) / denom


@dataclass(frozen=True)
class SweepRow:
    decoder: str
    gamma: int
    n: int
    p_ch_x: float
    p_ch_z: float
    p_mem_x: float
    p_mem_z: float
    trials: int
    exact_success: float
    logical_success: float
    bdd_failures: float
    wilson_halfwidth: float
    duration_steps: int
    storage_qubit_steps: int

    @property
    def noise(self) -> NoiseModel:
        return NoiseModel(self.p_ch_x, self.p_ch_z, self.p_mem_x, self.p_mem_z)


@dataclass(frozen=True)
class SweepStats:
    rows: tuple[SweepRow, ...] = ()

    def get(self, decoder: str, noise: NoiseModel) -> SweepRow:
        for r in self.rows:
            if r.decoder == decoder and r.noise == noise:
                return r
        raise KeyError((decoder, noise))

    def to_dict(self) -> dict:
        return {"rows": [asdict(r) for r in self.rows]}

    @classmethod
    def from_dict(cls, d: dict) -> SweepStats:
        return cls(tuple(SweepRow(**r) for r in d["rows"]))


def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV)
    if raw is None:
        return os.cpu_count() or 1
    try:
        w = int(raw)
    except ValueError as exc:
        raise ConfigError(f"{WORKERS_ENV}={raw!r} is not an integer") from exc
    if w < 1:
        raise ConfigError(f"{WORKERS_ENV} must be >= 1, got {w}")
    return w


@dataclass
class _Tally:
    exact: int = 0
    logical: int = 0
    failures: int = 0

    def __iadd__(self, other: _Tally) -> _Tally:
        self.exact += other.exact
        self.logical += other.logical
        self.failures += other.failures
        return self


def _run_trials(
    cfg: ChainConfig, noise: NoiseModel, decoders: tuple[str, ...], allow_logical: bool, seeds: range
) -> dict[str, _Tally]:
    tallies = {d: _Tally() for d in decoders}
    blind = [d for d in decoders if d != "interleaved"]
    for seed in seeds:
        if blind:
            record, truth, _ = run_trial(cfg, noise, seed, Mode.BLIND)
            for name in blind:
                result = DECODERS[name](record, cfg.code)
                _count(tallies[name], judge(result, truth, cfg.code, allow_logical), bool(result.failed_intervals))
        if "interleaved" in decoders:
            _, truth, meta = run_trial(cfg, noise, seed, Mode.INTERLEAVED)
            residual = truth.frame
            if residual.is_zero():
                verdict = Judgment.EXACT_SUCCESS
            else:
                verdict = _logical_or_failure(residual, cfg.code, allow_logical)
            _count(tallies["interleaved"], verdict, meta.correction_failures > 0)
    return tallies


def _logical_or_failure(residual, code: CssCode, allow_logical: bool) -> Judgment:
    if allow_logical and row_space_contains(code.G2, residual.a) and row_space_contains(code.G2, residual.b):
        return Judgment.LOGICAL_SUCCESS
    return Judgment.FAILURE


def _count(tally: _Tally, verdict: Judgment, bdd_failed: bool) -> None:
    if verdict is Judgment.EXACT_SUCCESS:
        tally.exact += 1
        tally.logical += 1
    elif verdict is Judgment.LOGICAL_SUCCESS:
        tally.logical += 1
    tally.failures += bdd_failed


def _chunks(start: int, stop: int, parts: int) -> list[range]:
    size = max(1, math.ceil((stop - start) / parts))
    return [range(i, min(i + size, stop)) for i in range(start, stop, size)]


def monte_carlo(
    cfg: ChainConfig,
    noise_grid: Sequence[NoiseModel],
    trials: int,
    decoders: Iterable[str] = ("posterior", "conventional"),
    seed: int = 0,
    allow_logical: bool = True,
    workers: int | None = None,
) -> SweepStats:
    """Estimate success rates for each decoder at each grid point.

    Trial ``i`` at every grid point uses seed ``seed + i``, so all decoders
    (and all points) see common random numbers and the result does not
    depend on how trials are split across workers.
    """
    if trials < 1:
        raise ConfigError(f"trials must be >= 1, got {trials}")
    if not noise_grid:
        raise ConfigError("noise grid is empty")
    decoders = tuple(dict.fromkeys(decoders))
    unknown = set(decoders) - set(KNOWN_DECODERS)
    if unknown or not decoders:
        raise ConfigError(f"unknown decoders {sorted(unknown)}; choose from {KNOWN_DECODERS}")
    workers = worker_count() if workers is None else workers
    rows = []
    pool = ProcessPoolExecutor(workers) if workers > 1 else None
    try:
        for noise in noise_grid:
            chunks = _chunks(seed, seed + trials, workers)
            if pool is None:
                parts = [_run_trials(cfg, noise, decoders, allow_logical, c) for c in chunks]
            else:
                futures = [pool.submit(_run_trials, cfg, noise, decoders, allow_logical, c) for c in chunks]
                parts = [f.result() for f in futures]
            for name in decoders:
                total = _Tally()
                for part in parts:
                    total += part[name]
                rows.append(
                    SweepRow(
                        decoder=name, gamma=cfg.gamma, n=cfg.n,
                        p_ch_x=noise.p_ch_x, p_ch_z=noise.p_ch_z,
                        p_mem_x=noise.p_mem_x, p_mem_z=noise.p_mem_z,
                        trials=trials,
                        exact_success=total.exact / trials,
                        logical_success=total.logical / trials,
                        bdd_failures=total.failures / trials,
                        wilson_halfwidth=wilson_halfwidth(total.exact, trials),
                        duration_steps=2 * cfg.gamma + 1,
                        storage_qubit_steps=storage_qubit_steps(cfg.gamma, cfg.n),
                    )
                )
    finally:
        if pool is not None:
            pool.shutdown()
    return SweepStats(tuple(rows))


# --- exhaustive enumeration ---


@dataclass(frozen=True)
class EnumRow:
    bit_errors: tuple[BitVec, ...]  # one per interval
    phase_errors: tuple[BitVec, ...]
    posterior: Judgment
    conventional: Judgment

    @property
    def total_bit(self) -> BitVec:
        return _xor_all(self.bit_errors)

    @property
    def total_phase(self) -> BitVec:
        return _xor_all(self.phase_errors)


def _xor_all(vs: Sequence[BitVec]) -> BitVec:
    out = vs[0]
    for v in vs[1:]:
        out = out ^ v
    return out


@dataclass(frozen=True)
class EnumTable:
    gamma: int
    n: int
    max_weight: int
    rows: tuple[EnumRow, ...] = field(repr=False)

    def rate(self, decoder: str, rows: Sequence[EnumRow] | None = None) -> float:
        rows = self.rows if rows is None else rows
        if not rows:
            return float("nan")
        hits = sum(getattr(r, decoder) is Judgment.EXACT_SUCCESS for r in rows)
        return hits / len(rows)


def low_weight_vectors(n: int, max_weight: int) -> list[BitVec]:
    return [
        BitVec.from_support(n, s)
        for w in range(max_weight + 1)
        for s in itertools.combinations(range(n), w)
    ]


def _per_type_count(gamma: int, n: int, max_weight: int) -> int:
    return sum(math.comb(n, w) for w in range(max_weight + 1)) ** gamma


def pattern_count(gamma: int, n: int, max_weight: int) -> int:
    """Number of (bit, phase) injection patterns visited by :func:`enumerate_bounded`."""
    return _per_type_count(gamma, n, max_weight) ** 2


def _random_outcomes(cfg: ChainConfig, rng: random.Random) -> list[list[EsOutcome]]:
    n = cfg.n
    return [
        [EsOutcome(BitVec(n, rng.getrandbits(n)), BitVec(n, rng.getrandbits(n))) for _ in range(cfg.N >> j)]
        for j in range(1, cfg.gamma + 1)
    ]


def _enumerate_slice(
    cfg: ChainConfig, max_weight: int, bit_slice: range, outcome_seed: int | None
) -> list[EnumRow]:
    per_type = list(itertools.product(low_weight_vectors(cfg.n, max_weight), repeat=cfg.gamma))
    intervals = range(1, cfg.gamma + 1)

    def injections_of(which, pattern):
        return [Injection(j, which, e) for j, e in zip(intervals, pattern) if not e.is_zero()]

    phase_injections = [injections_of(CheckType.PHASE, phases) for phases in per_type]
    rows = []
    for bi in bit_slice:
        bits = per_type[bi]
        bit_injections = injections_of(CheckType.BIT, bits)
        # one outcome stream per bit pattern keeps results independent of slicing
        rng = None if outcome_seed is None else random.Random((outcome_seed << 32) | bi)
        for phases, phase_inj in zip(per_type, phase_injections):
            injections = bit_injections + phase_inj
            outcomes = None if rng is None else _random_outcomes(cfg, rng)
            record, truth = run_with_injections(cfg, injections, outcomes)
            posterior = judge(decode_posterior(record, cfg.code), truth, cfg.code)
            conventional = judge(decode_conventional(record, cfg.code), truth, cfg.code)
            rows.append(EnumRow(bits, phases, posterior, conventional))
    return rows


def enumerate_bounded(
    cfg: ChainConfig,
    max_per_interval_weight: int,
    outcome_seed: int | None = None,
    limit: int = MAX_PATTERNS,
    workers: int | None = None,
) -> EnumTable:
    """Run every per-interval injection pattern up to the given weight.

    Each interval gets one bit-error and one phase-error vector of weight at
    most ``max_per_interval_weight``. Swap outcomes are all zero unless
    ``outcome_seed`` is given, in which case each pattern draws its own.

    Raises:
        EnumerationTooLarge: if the pattern count exceeds ``limit``.
    """
    if max_per_interval_weight < 0:
        raise ConfigError("max weight must be >= 0")
    count = pattern_count(cfg.gamma, cfg.n, max_per_interval_weight)
    if count > limit:
        raise EnumerationTooLarge(count, limit)
    workers = worker_count() if workers is None else workers
    slices = _chunks(0, _per_type_count(cfg.gamma, cfg.n, max_per_interval_weight), workers)
    if workers > 1 and len(slices) > 1:
        with ProcessPoolExecutor(workers) as pool:
            futures = [
                pool.submit(_enumerate_slice, cfg, max_per_interval_weight, sl, outcome_seed) for sl in slices
            ]
            parts = [f.result() for f in futures]
    else:
        parts = [_enumerate_slice(cfg, max_per_interval_weight, sl, outcome_seed) for sl in slices]
    rows = tuple(r for part in parts for r in part)
    return EnumTable(cfg.gamma, cfg.n, max_per_interval_weight, rows)


# --- reports ---

ENUM_COLUMNS = ("bit_errors", "phase_errors", "total_bit_weight", "total_phase_weight", "posterior", "conventional")


def _fmt(value) -> str:
    return repr(value) if isinstance(value, float) else str(value)


def emit_report(data: SweepStats | EnumTable, fmt: str, path: str | Path | None) -> str:
    """Render stats or an enumeration table as csv/json; write it if ``path`` is set."""
    if fmt not in ("csv", "json"):
        raise ConfigError(f"unknown report format {fmt!r}")
    if isinstance(data, SweepStats):
        if fmt == "json":
            text = json.dumps(data.to_dict(), indent=2, sort_keys=True) + "\n"
        else:
            text = _csv([CSV_COLUMNS] + [[_fmt(getattr(r, c)) for c in CSV_COLUMNS] for r in data.rows])
    else:
        records = [
            {
                "bit_errors": " ".join(str(v) for v in r.bit_errors),
                "phase_errors": " ".join(str(v) for v in r.phase_errors),
                "total_bit_weight": r.total_bit.weight(),
                "total_phase_weight": r.total_phase.weight(),
                "posterior": r.posterior.value,
                "conventional": r.conventional.value,
            }
            for r in data.rows
        ]
        if fmt == "json":
            payload = {"gamma": data.gamma, "n": data.n, "max_weight": data.max_weight, "rows": records}
            text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
        else:
            text = _csv([ENUM_COLUMNS] + [[str(rec[c]) for c in ENUM_COLUMNS] for rec in records])
    if path is not None:
        try:
            Path(path).write_text(text)
        except OSError as exc:
            raise OSError(f"cannot write report to {path}: {exc.strerror or exc}") from exc
    return text


def _csv(rows) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerows(rows)
    return buf.getvalue()


def load_stats(path: str | Path) -> SweepStats:
    return SweepStats.from_dict(json.loads(Path(path).read_text()))


# --- config files ---


@dataclass(frozen=True)
class RunConfig:
    chain: ChainConfig
    noise_grid: tuple[NoiseModel, ...]
    mode: Mode
    seed: int
    trials: int
    decoders: tuple[str, ...]


def load_config(path: str | Path) -> RunConfig:
    """Read a JSON run config.

    Keys: gamma, code_file, p_ch_x, p_ch_z, p_mem_x, p_mem_z, mode, seed,
    trials. ``code_file`` is resolved against the config's directory and
    defaults to the built-in Steane code. Optional ``p_grid`` (a list of
    probabilities applied to all four rates) replaces the single point, and
    ``decoders`` overrides the decoder list chosen by ``mode``.
    """
    path = Path(path)
    try:
        raw = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON: {exc}") from exc
    known = {"gamma", "code_file", "p_ch_x", "p_ch_z", "p_mem_x", "p_mem_z", "mode", "seed", "trials", "p_grid", "decoders"}
    extra = set(raw) - known
    if extra:
        raise ConfigError(f"{path}: unknown keys {sorted(extra)}")
    if "gamma" not in raw:
        raise ConfigError(f"{path}: missing required key 'gamma'")
    code = load_code(path.parent / raw["code_file"]) if raw.get("code_file") else steane_code()
    chain = ChainConfig(int(raw["gamma"]), code)
    if "p_grid" in raw:
        grid = tuple(NoiseModel.uniform(float(p)) for p in raw["p_grid"])
    else:
        grid = (NoiseModel(*(float(raw.get(k, 0.0)) for k in ("p_ch_x", "p_ch_z", "p_mem_x", "p_mem_z"))),)
    try:
        mode = Mode(raw.get("mode", "blind"))
    except ValueError as exc:
        raise ConfigError(f"{path}: mode must be 'blind' or 'interleaved'") from exc
    default = ("posterior", "conventional") if mode is Mode.BLIND else ("interleaved",)
    decoders = tuple(raw.get("decoders", default))
    return RunConfig(chain, grid, mode, int(raw.get("seed", 0)), int(raw.get("trials", 1000)), decoders)
