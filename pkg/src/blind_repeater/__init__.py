"""Pauli-frame simulation and posterior decoding of blind-mode repeater chains."""

from .bell import BellLabel, EsOutcome, PauliFrame, bell_from_flags, compose_es
from .chain import (
    ChainConfig,
    Injection,
    MeasurementRecord,
    Mode,
    NoiseModel,
    Schedule,
    TruthFrame,
    build_schedule,
    run_trial,
    run_with_injections,
)
from .css import CheckType, CssCode, build_css, decode_bdd, steane_code, syndrome
from .decoders import (
    DecodeResult,
    Judgment,
    decode_conventional,
    decode_posterior,
    integrate_epp,
    integrate_es,
    interval_syndrome,
    judge,
)
from .gf2 import BitMatrix, BitVec, mat_vec_mul, row_space_contains, weight
from .harness import emit_report, enumerate_bounded, monte_carlo, resource_count

__version__ = "0.1.0"
