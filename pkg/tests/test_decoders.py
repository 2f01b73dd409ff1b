from __future__ import annotations

import itertools
import json
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blind_repeater.bell import EsOutcome, PauliFrame
from blind_repeater.chain import ChainConfig, Injection, NoiseModel, TruthFrame, run_trial, run_with_injections
from blind_repeater.css import CheckType, steane_code
from blind_repeater.decoders import (
    DecodeResult,
    Judgment,
    decode_conventional,
    decode_posterior,
    integrate_epp,
    integrate_es,
    interval_syndrome,
    judge,
)
from blind_repeater.gf2 import BitVec

STEANE = steane_code()
BIT, PHASE = CheckType.BIT, CheckType.PHASE


def u(i: int) -> BitVec:
    return BitVec.unit(7, i - 1)


def cfg(gamma: int) -> ChainConfig:
    return ChainConfig(gamma, STEANE)


def random_outcomes(gamma: int, rng: random.Random) -> list[list[EsOutcome]]:
    return [
        [EsOutcome(BitVec(7, rng.getrandbits(7)), BitVec(7, rng.getrandbits(7))) for _ in range(2 ** (gamma - j))]
        for j in range(1, gamma + 1)
    ]


def test_integrate_es_examples():
    record, _ = run_with_injections(cfg(2))
    assert integrate_es(record, 1).mx.is_zero()
    outs = [[EsOutcome(u(1), BitVec.zeros(7)), EsOutcome(u(2), BitVec.zeros(7))], [EsOutcome(u(5), u(6))]]
    record, _ = run_with_injections(cfg(2), [], outs)
    assert integrate_es(record, 1).mx == u(1) ^ u(2)
    assert integrate_es(record, 2) == outs[1][0]


def test_integrate_epp_examples():
    record, _ = run_with_injections(cfg(2), [Injection(1, BIT, u(1), pair=0), Injection(1, BIT, u(2), pair=1)])
    assert [str(b) for b, _ in record.level(1).epp_syndromes] == ["100", "010"]
    assert str(integrate_epp(record, 1)[0]) == "110"
    assert integrate_epp(record, 2) == record.level(2).epp_syndromes[0]


def test_level_out_of_range():
    record, _ = run_with_injections(cfg(2))
    for bad in (0, 3):
        with pytest.raises(ValueError):
            integrate_es(record, bad)
        with pytest.raises(ValueError):
            integrate_epp(record, bad)
        with pytest.raises(ValueError):
            interval_syndrome(record, STEANE, bad, BIT)


def test_interval_syndrome_examples():
    record, _ = run_with_injections(cfg(2))
    assert interval_syndrome(record, STEANE, 2, PHASE).is_zero()
    record, _ = run_with_injections(cfg(2), [(1, BIT, u(1)), (2, BIT, u(2))])
    assert str(interval_syndrome(record, STEANE, 1, BIT)) == "100"
    assert str(interval_syndrome(record, STEANE, 2, BIT)) == "010"


def test_swap_shift_cancels_in_interval_syndrome():
    outs = [[EsOutcome.zero(7), EsOutcome.zero(7)], [EsOutcome(u(4), BitVec.zeros(7))]]
    record, _ = run_with_injections(cfg(2), [], outs)
    assert not integrate_epp(record, 2)[0].is_zero()
    assert interval_syndrome(record, STEANE, 2, BIT).is_zero()


def test_posterior_examples():
    record, truth = run_with_injections(cfg(3))
    result = decode_posterior(record, STEANE)
    assert result.estimate.is_zero() and result.failed_intervals == ()

    record, truth = run_with_injections(cfg(2), [(1, BIT, u(1)), (2, BIT, u(2))])
    result = decode_posterior(record, STEANE)
    assert str(result.estimate.a) == "1100000"
    assert judge(result, truth, STEANE) is Judgment.EXACT_SUCCESS
    assert result.per_interval[0][0] == u(1) and result.per_interval[1][0] == u(2)


def test_weight_two_interval_is_silently_miscorrected():
    record, truth = run_with_injections(cfg(2), [(1, BIT, u(1) ^ u(2))])
    result = decode_posterior(record, STEANE)
    assert result.per_interval[0][0] == u(3)
    assert result.failed_intervals == ()
    assert judge(result, truth, STEANE) is Judgment.FAILURE


def test_conventional_examples():
    record, truth = run_with_injections(cfg(3))
    assert decode_conventional(record, STEANE).estimate.is_zero()
    record, truth = run_with_injections(cfg(3), [(2, BIT, u(3))])
    assert decode_conventional(record, STEANE).estimate.a == u(3)
    record, truth = run_with_injections(cfg(3), [(1, BIT, u(1)), (3, BIT, u(2))])
    result = decode_conventional(record, STEANE)
    assert result.estimate.a == u(3)
    assert judge(result, truth, STEANE) is Judgment.FAILURE


def test_judge_examples():
    zero = PauliFrame.zero(7)
    res = DecodeResult(zero, (), ())
    assert judge(res, TruthFrame(zero), STEANE) is Judgment.EXACT_SUCCESS
    assert judge(res, TruthFrame(PauliFrame(u(3), BitVec.zeros(7))), STEANE, allow_logical=True) is Judgment.FAILURE
    g = STEANE.G2.rows[0]
    assert judge(res, TruthFrame(PauliFrame(g, BitVec.zeros(7))), STEANE) is Judgment.FAILURE
    assert judge(res, TruthFrame(PauliFrame(g, BitVec.zeros(7))), STEANE, allow_logical=True) is Judgment.LOGICAL_SUCCESS


def test_failures_are_flagged_for_non_perfect_code():
    from blind_repeater.css import build_css
    from blind_repeater.gf2 import BitMatrix

    H = BitMatrix.from_strings(["11000", "01100", "00110", "00011"])
    code = build_css(H, H, BitMatrix.from_strings(["11111"]), 1)
    c = ChainConfig(2, code)
    record, truth = run_with_injections(c, [(2, BIT, BitVec.from_str("10100"))])
    result = decode_posterior(record, code)
    assert result.failed_intervals == ((2, BIT),)
    assert result.per_interval[1][0] is None
    assert result.estimate.a.is_zero()
    conv = decode_conventional(record, code)
    assert conv.failed_intervals == ((2, BIT),)


def test_decode_result_json_round_trip():
    record, _ = run_with_injections(cfg(2), [(1, BIT, u(1)), (2, PHASE, u(4))])
    result = decode_posterior(record, STEANE)
    again = DecodeResult.from_dict(json.loads(result.to_json()))
    assert again == result


def test_estimate_is_sum_of_parts_and_shifts():
    rng = random.Random(4)
    for _ in range(200):
        record, _, _ = run_trial(cfg(3), NoiseModel.uniform(0.02), seed=rng.randrange(10**6))
        result = decode_posterior(record, STEANE)
        a = b = BitVec.zeros(7)
        for j in range(1, 4):
            es = integrate_es(record, j)
            a, b = a ^ es.mx, b ^ es.mz
        for bp, pp in result.per_interval:
            a = a if bp is None else a ^ bp
            b = b if pp is None else b ^ pp
        assert result.estimate == PauliFrame(a, b)


SINGLE = [None] + [u(i) for i in range(1, 8)]


def _injections(bits, phases):
    out = [Injection(j, BIT, e) for j, e in enumerate(bits, start=1) if e is not None]
    out += [Injection(j, PHASE, e) for j, e in enumerate(phases, start=1) if e is not None]
    return out


def test_posterior_recovers_every_single_error_per_interval_bit_only():
    # full both-type sweep with random outcomes lives in the acceptance module
    for bits in itertools.product(SINGLE, repeat=3):
        record, truth = run_with_injections(cfg(3), _injections(bits, ()))
        assert judge(decode_posterior(record, STEANE), truth, STEANE) is Judgment.EXACT_SUCCESS


def test_conventional_never_exact_on_two_distinct_errors_in_different_intervals():
    patterns = 0
    for j1, j2 in itertools.combinations(range(1, 4), 2):
        for p1, p2 in itertools.permutations(range(1, 8), 2):
            record, truth = run_with_injections(cfg(3), [(j1, BIT, u(p1)), (j2, BIT, u(p2))])
            assert judge(decode_conventional(record, STEANE), truth, STEANE) is Judgment.FAILURE
            assert judge(decode_posterior(record, STEANE), truth, STEANE) is Judgment.EXACT_SUCCESS
            patterns += 1
    assert patterns == 126


def test_decoders_agree_when_total_error_is_correctable():
    rng = random.Random(8)
    checked = 0
    while checked < 300:
        bits = [rng.choice(SINGLE) for _ in range(3)]
        phases = [rng.choice(SINGLE) for _ in range(3)]
        record, truth = run_with_injections(cfg(3), _injections(bits, phases), random_outcomes(3, rng))
        tb, tp = truth.frame.a, truth.frame.b
        es = [integrate_es(record, j) for j in (1, 2, 3)]
        for o in es:
            tb, tp = tb ^ o.mx, tp ^ o.mz
        if tb.weight() <= 1 and tp.weight() <= 1:
            assert judge(decode_posterior(record, STEANE), truth, STEANE) is Judgment.EXACT_SUCCESS
            assert judge(decode_conventional(record, STEANE), truth, STEANE) is Judgment.EXACT_SUCCESS
            checked += 1


@settings(max_examples=200, deadline=None)
@given(
    st.lists(st.sampled_from(range(8)), min_size=6, max_size=6),
    st.integers(0, 2**32 - 1),
)
def test_swap_outcomes_are_transparent(choices, seed):
    vecs = [None if c == 0 else u(c) for c in choices]
    inj = _injections(vecs[:3], vecs[3:])
    plain, plain_truth = run_with_injections(cfg(3), inj)
    shifted, shifted_truth = run_with_injections(cfg(3), inj, random_outcomes(3, random.Random(seed)))
    for j in (1, 2, 3):
        for which in CheckType:
            assert interval_syndrome(plain, STEANE, j, which) == interval_syndrome(shifted, STEANE, j, which)
    for decode in (decode_posterior, decode_conventional):
        assert judge(decode(plain, STEANE), plain_truth, STEANE) is judge(decode(shifted, STEANE), shifted_truth, STEANE)


def test_decode_order_does_not_change_estimate():
    for seed in range(300):
        record, _, _ = run_trial(cfg(3), NoiseModel.uniform(0.03), seed=seed)
        assert decode_posterior(record, STEANE) == decode_posterior(record, STEANE, descending=True)
