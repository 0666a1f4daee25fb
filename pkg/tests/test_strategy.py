import logging

import numpy as np
import pytest

from hypothesis import given, settings
import hypothesis.strategies as st

from lsc_stego.controller.strategy import DEFAULT_BBS, BbsBitStream, \
    BbsException, BbsParameters, BbsState, ConstraintException, \
    DomainException, FastBitStream, KeyException, SequenceRangeException, \
    StegoKey, Strategy, bbs_next_bit, classify_sequence, generate_strategy, \
    is_probable_prime, open_stream, sequence_support
from lsc_stego.model.options import GeneratorId

from conftest import fast_key


def test_sequence_support():
    assert sequence_support((0, 0, 1)) == {0, 1}
    assert sequence_support(()) == set()
    assert sequence_support((2, 2, 2)) == {2}


@pytest.mark.parametrize("sequence, width, expected", [
    ((0, 1, 2), 3, (True, True, True)),
    ((0, 0, 1), 2, (False, True, False)),
    ((2, 0), 3, (True, False, False)),
])
def test_classify_sequence(sequence, width, expected):
    assert tuple(classify_sequence(sequence, width)) == expected


def test_classify_rejects_out_of_range():
    with pytest.raises(SequenceRangeException):
        classify_sequence((0, 3), 3)


def test_strategy_validation():
    strategy = Strategy((0, 1, 1, 0), 2)
    assert strategy.length == 4
    assert strategy.tail == (1, 0)

    with pytest.raises(ConstraintException):
        Strategy((0, 1), 2)
    with pytest.raises(ConstraintException):
        Strategy((1, 0, 0), 2)
    with pytest.raises(SequenceRangeException):
        Strategy((0, 2, 1), 2)
    with pytest.raises(DomainException):
        Strategy((0,), 0)


def test_bbs_hand_trace():
    state = BbsState.create(77, 2)
    trace = []
    for _ in range(3):
        bit, state = bbs_next_bit(state)
        trace.append((state.state, bit))

    assert trace == [(4, 0), (16, 0), (25, 1)]


def test_bbs_stream_follows_the_trace():
    stream = BbsBitStream(b'unused', 'strategy', BbsParameters(7, 11, 2))
    assert stream.bits(4).tolist() == [0, 0, 1, 1]


def test_bbs_state_must_be_a_unit():
    with pytest.raises(BbsException):
        BbsState.create(77, 7)
    with pytest.raises(BbsException):
        BbsState.create(77, 1)


def test_default_primes():
    for prime in (DEFAULT_BBS.p, DEFAULT_BBS.q):
        assert prime % 4 == 3
        assert is_probable_prime(prime)

    assert DEFAULT_BBS.validate() is DEFAULT_BBS


@pytest.mark.parametrize("number, prime", [
    (1, False), (2, True), (41, True), (77, False), (561, False),
    (2147483647, True), (3215031751, False),
])
def test_is_probable_prime(number, prime):
    assert is_probable_prime(number) == prime


@pytest.mark.parametrize("params", [
    BbsParameters(5, 11, None),
    BbsParameters(7, 7, None),
    BbsParameters(7, 15, None),
    BbsParameters(7, 11, 22),
])
def test_bbs_parameter_validation(params):
    with pytest.raises(BbsException):
        params.validate()


def test_key_from_hex():
    key = StegoKey.from_hex('00112233445566778899aabbccddeeff')

    assert key.generator_id == GeneratorId.BBS
    assert key.to_hex() == '00112233445566778899aabbccddeeff'


@pytest.mark.parametrize("text", ['', 'ABCD', 'abc', 'zz'])
def test_key_rejects_bad_hex(text):
    with pytest.raises(KeyException):
        StegoKey.from_hex(text)


def test_short_seed_warns(caplog):
    with caplog.at_level(logging.WARNING):
        StegoKey(b'short', GeneratorId.FAST)

    assert "recommended" in caplog.text


def test_random_keys_differ():
    assert StegoKey.random().seed != StegoKey.random().seed


def test_streams_are_deterministic(key, bbs_key):
    for stego_key in (key, bbs_key):
        first = open_stream(stego_key, 'strategy').bits(700)
        second = open_stream(stego_key, 'strategy').bits(700)
        assert np.array_equal(first, second)


def test_purposes_are_separated(key, bbs_key):
    for stego_key in (key, bbs_key):
        strategy_bits = open_stream(stego_key, 'strategy').bits(256)
        lsc_bits = open_stream(stego_key, 'lsc').bits(256)
        assert not np.array_equal(strategy_bits, lsc_bits)


def test_fixed_state_only_drives_strategies(bbs_key):
    params = DEFAULT_BBS._replace(x0=2)
    other_key = StegoKey(bytes(range(200, 232)), GeneratorId.BBS)

    strategy_bits = [open_stream(k, 'strategy', params).bits(256)
                     for k in (bbs_key, other_key)]
    lsc_bits = [open_stream(k, 'lsc', params).bits(256)
                for k in (bbs_key, other_key)]

    assert np.array_equal(*strategy_bits)
    assert not np.array_equal(*lsc_bits)
    assert not np.array_equal(strategy_bits[0], lsc_bits[0])


def test_stream_chunks_concatenate(key):
    whole = FastBitStream(key.seed, 'lsc').bits(1500)

    stream = FastBitStream(key.seed, 'lsc')
    parts = [stream.bits(count) for count in (1, 511, 600, 388)]
    assert np.array_equal(np.concatenate(parts), whole)


def test_next_bits_is_msb_first(key):
    bits = FastBitStream(key.seed, 'lsc').bits(12)
    value = FastBitStream(key.seed, 'lsc').next_bits(12)

    assert value == int("".join(str(bit) for bit in bits), 2)


@given(bound=st.integers(1, 1000))
@settings(max_examples=50)
def test_next_below(bound):
    stream = FastBitStream(bytes(range(16)), 'strategy')
    assert all(0 <= stream.next_below(bound) < bound for _ in range(20))


def test_generate_short_strategy(key):
    strategy = generate_strategy(key, 3, 5)

    assert strategy.length == 5
    assert sorted(strategy.tail) == [0, 1, 2]
    assert generate_strategy(key, 3, 5) == strategy


def test_generate_strategy_with_bbs(bbs_key):
    strategy = generate_strategy(bbs_key, 4, 9)

    assert sorted(strategy.tail) == [0, 1, 2, 3]
    assert generate_strategy(bbs_key, 4, 9) == strategy


def test_generate_strategy_errors(key):
    with pytest.raises(ConstraintException):
        generate_strategy(key, 3, 3)
    with pytest.raises(DomainException):
        generate_strategy(key, 0, 5)


def test_keys_change_strategies():
    strategies = {generate_strategy(fast_key(idx), 8, 40).terms
                  for idx in range(10)}
    assert len(strategies) == 10


def test_ten_thousand_strategies_are_valid():
    rng = np.random.default_rng(2024)
    for idx in range(10000):
        p_width = int(rng.integers(1, 9))
        length = p_width + int(rng.integers(1, 2 * p_width + 2))
        strategy = generate_strategy(fast_key(idx), p_width, length)

        assert strategy.length == length > p_width
        assert all(0 <= term < p_width for term in strategy.terms)
        assert classify_sequence(strategy.tail, p_width).bijective


def test_tail_permutations_are_all_reachable():
    tails = {generate_strategy(fast_key(idx), 3, 4).tail
             for idx in range(300)}
    assert len(tails) == 6


def test_free_terms_are_uniform():
    samples = 10000
    counts = np.zeros((4, 4), dtype=np.int64)
    for idx in range(samples):
        terms = generate_strategy(fast_key(idx), 4, 8).terms[:4]
        counts[np.arange(4), terms] += 1

    bound = 5 * np.sqrt(samples * 0.25 * 0.75)
    assert np.all(np.abs(counts - samples / 4) <= bound)
