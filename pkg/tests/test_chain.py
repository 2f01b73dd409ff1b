from __future__ import annotations

import math

import pytest

from blind_repeater.bell import EsOutcome
from blind_repeater.chain import (
    ChainConfig,
    ConfigError,
    Injection,
    Mode,
    NoiseModel,
    Op,
    build_schedule,
    run_trial,
    run_with_injections,
    storage_qubit_steps,
)
from blind_repeater.css import CheckType, steane_code
from blind_repeater.decoders import integrate_epp, integrate_es, interval_syndrome
from blind_repeater.gf2 import BitVec, DimensionError, mat_vec_mul

STEANE = steane_code()


def u(i: int) -> BitVec:
    return BitVec.unit(7, i - 1)


def cfg(gamma: int) -> ChainConfig:
    return ChainConfig(gamma, STEANE)


def test_schedule_gamma1():
    s = build_schedule(1)
    assert s.N == 2
    assert [(c.relay_id, c.time) for c in s.at(Op.BELL_MEASURE)] == [(1, 2)]
    assert sorted((c.relay_id, c.time) for c in s.at(Op.SYNDROME_MEASURE)) == [(0, 3), (2, 3)]
    assert s.duration == 3
    s.validate()


def test_schedule_gamma2_midpoints():
    s = build_schedule(2)
    assert [c.relay_id for c in s.at(Op.BELL_MEASURE, 1)] == [1, 3]
    assert [c.relay_id for c in s.at(Op.BELL_MEASURE, 2)] == [2]
    s.validate()


@pytest.mark.parametrize("gamma", range(1, 8))
def test_schedule_shape(gamma):
    s = build_schedule(gamma)
    s.validate()
    N = 2**gamma
    assert s.duration == 2 * gamma + 1
    # N generates, N transmits, N-1 swaps, 2 * (N - 1) syndrome reads
    assert len(s.commands) == 2 * N + (N - 1) + 2 * (N - 1)
    assert len(s.commands) <= 5 * N * gamma
    for x in range(1, gamma + 1):
        assert len(s.at(Op.BELL_MEASURE, x)) == N // 2**x
        assert {c.time for c in s.at(Op.SYNDROME_MEASURE, x)} == {2 * x + 1}


def test_schedule_validate_catches_misplaced_swap():
    s = build_schedule(2)
    from dataclasses import replace

    bad = tuple(replace(c, relay_id=2) if c.op is Op.BELL_MEASURE and c.relay_id == 1 else c for c in s.commands)
    with pytest.raises(ConfigError):
        type(s)(2, bad).validate()


def test_schedule_text_table():
    lines = build_schedule(1).to_text().splitlines()
    assert lines[0] == "relay_id\ttime\top"
    assert "1\t2\tBellMeasure(1)" in lines


def test_config_validation():
    with pytest.raises(ConfigError):
        ChainConfig(0, STEANE)
    with pytest.raises(ConfigError):
        NoiseModel(p_ch_x=1.5)
    with pytest.raises(ConfigError):
        build_schedule(0)


@pytest.mark.parametrize("gamma", [1, 2, 3, 4])
def test_record_counts_per_level(gamma):
    record, truth, meta = run_trial(cfg(gamma), NoiseModel.uniform(0.05), seed=gamma)
    N = 2**gamma
    for j in range(1, gamma + 1):
        assert len(record.level(j).es_outcomes) == N // 2**j
        assert len(record.level(j).epp_syndromes) == N // 2**j
    assert meta.duration_steps == 2 * gamma + 1
    assert truth.frame.n == 7


@pytest.mark.parametrize("gamma", [1, 2, 3])
def test_zero_noise_blind_truth_is_xor_of_outcomes(gamma):
    record, truth, _ = run_trial(cfg(gamma), NoiseModel(), seed=11)
    # raw syndromes carry the swap shifts; the interval syndromes are clean
    for j in range(1, gamma + 1):
        for which in CheckType:
            assert interval_syndrome(record, STEANE, j, which).is_zero()
    total = EsOutcome.zero(7)
    for j in range(1, gamma + 1):
        for o in record.level(j).es_outcomes:
            total = total ^ o
    assert truth.frame == total.as_frame()


@pytest.mark.parametrize("gamma", [1, 2, 3, 4])
def test_zero_noise_interleaved_ends_clean(gamma):
    for seed in range(20):
        _, truth, meta = run_trial(cfg(gamma), NoiseModel(), seed=seed, mode=Mode.INTERLEAVED)
        assert truth.frame.is_zero()
        assert meta.correction_failures == 0


def test_relative_syndromes_include_swap_shifts():
    # without noise each pair syndrome is H applied to the outcomes it absorbed
    record, _, _ = run_trial(cfg(2), NoiseModel(), seed=5)
    for j in (1, 2):
        es = integrate_es(record, j)
        s_b, s_p = integrate_epp(record, j)
        prev_b, prev_p = integrate_epp(record, j - 1) if j > 1 else (BitVec.zeros(3), BitVec.zeros(3))
        assert s_b == prev_b ^ mat_vec_mul(STEANE.H1, es.mx)
        assert s_p == prev_p ^ mat_vec_mul(STEANE.H2, es.mz)


def test_no_injections_gives_zero_record():
    record, truth = run_with_injections(cfg(3))
    assert truth.frame.is_zero()
    for lv in record.levels:
        assert all(o.mx.is_zero() and o.mz.is_zero() for o in lv.es_outcomes)
        assert all(b.is_zero() and p.is_zero() for b, p in lv.epp_syndromes)


def test_injections_integrate_to_column_sums():
    record, truth = run_with_injections(cfg(2), [(1, CheckType.BIT, u(1)), (2, CheckType.BIT, u(2))])
    assert str(integrate_epp(record, 1)[0]) == "100"
    assert str(integrate_epp(record, 2)[0]) == "110"
    assert truth.frame.a == u(1) ^ u(2)


def test_error_persists_through_later_levels():
    record, _ = run_with_injections(cfg(3), [(1, CheckType.BIT, u(3))])
    for j in (1, 2, 3):
        assert str(integrate_epp(record, j)[0]) == "110"
        assert integrate_epp(record, j)[1].is_zero()


def test_interval_two_flip_shows_up_as_column_three():
    record, _ = run_with_injections(cfg(2), [Injection(2, CheckType.BIT, u(3))])
    diff = integrate_epp(record, 2)[0] ^ integrate_epp(record, 1)[0]
    assert diff == STEANE.H1.column(2)


def test_injection_on_any_pair_integrates_identically():
    base, _ = run_with_injections(cfg(3), [Injection(1, CheckType.PHASE, u(6), pair=0)])
    for pair in range(1, 4):
        rec, _ = run_with_injections(cfg(3), [Injection(1, CheckType.PHASE, u(6), pair=pair)])
        assert integrate_epp(rec, 1) == integrate_epp(base, 1)
        assert rec.level(1).epp_syndromes[pair][1] == STEANE.H2.column(5)


def test_fixed_outcomes_enter_truth():
    outs = [[EsOutcome(u(1), u(2)), EsOutcome(u(3), BitVec.zeros(7))], [EsOutcome(BitVec.zeros(7), u(4))]]
    _, truth = run_with_injections(cfg(2), [], outs)
    assert truth.frame.a == u(1) ^ u(3)
    assert truth.frame.b == u(2) ^ u(4)


@pytest.mark.parametrize(
    "injection, es, err",
    [
        ((4, CheckType.BIT, u(1)), None, ConfigError),
        ((1, CheckType.BIT, BitVec.zeros(6)), None, DimensionError),
        (Injection(2, CheckType.BIT, u(1), pair=2), None, ConfigError),
        (None, [[EsOutcome.zero(7)]], ConfigError),
    ],
)
def test_malformed_injections(injection, es, err):
    with pytest.raises(err):
        run_with_injections(cfg(2), [] if injection is None else [injection], es)


def test_record_matches_truth_on_random_trials():
    c = cfg(3)
    for seed in range(1000):
        record, truth, _ = run_trial(c, NoiseModel.uniform(0.02), seed=seed)
        s_b, s_p = integrate_epp(record, 3)
        assert s_b == mat_vec_mul(STEANE.H1, truth.frame.a)
        assert s_p == mat_vec_mul(STEANE.H2, truth.frame.b)


def test_determinism():
    c = cfg(3)
    for mode in Mode:
        a = run_trial(c, NoiseModel(0.01, 0.02, 0.03, 0.04), seed=99, mode=mode)
        b = run_trial(c, NoiseModel(0.01, 0.02, 0.03, 0.04), seed=99, mode=mode)
        assert a == b


def test_storage_accounting():
    # gamma=1, n=1: 2 sender halves at t=1, 4 qubits before the swap, 2 after
    assert storage_qubit_steps(1, 1) == 8
    _, _, meta = run_trial(cfg(3), NoiseModel(), seed=0)
    assert meta.storage_qubit_steps == storage_qubit_steps(3, 7)


def _flip_probability(p: float, exposures: int) -> float:
    return (1 - (1 - 2 * p) ** exposures) / 2


@pytest.mark.parametrize(
    "noise, exposures",
    [
        # gamma=1: 2 channel uses; memory: 2 sender halves, 4 qubits, 2 qubits
        (NoiseModel(p_ch_x=0.1), 2),
        (NoiseModel(p_mem_x=0.1), 8),
        (NoiseModel(p_ch_z=0.1, p_mem_z=0.1), 10),
    ],
)
def test_flip_rate_matches_exposure_count(noise, exposures):
    c = ChainConfig(1, STEANE)
    trials = 3000
    # count flips on qubit 0 once the swap shift is removed
    flips = 0
    for seed in range(trials):
        record, truth, _ = run_trial(c, noise, seed=seed)
        es = integrate_es(record, 1)
        net = (truth.frame.a ^ es.mx) if noise.p_ch_x or noise.p_mem_x else (truth.frame.b ^ es.mz)
        flips += net[0]
    q = _flip_probability(0.1, exposures)
    sigma = math.sqrt(q * (1 - q) / trials)
    assert abs(flips / trials - q) < 4 * sigma
