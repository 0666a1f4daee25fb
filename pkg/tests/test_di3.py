import logging

import numpy as np
import pytest

from hypothesis import given, settings
import hypothesis.strategies as st

from lsc_stego.controller.di3 import CapacityException, EmbeddingInstance, \
    HeadroomException, MessageLengthException, capacity, check_headroom, \
    di3_embed, di3_embed_batch, di3_extract, embed_in_image, \
    extract_from_image, message_uniformity_warning, randomize_lscs, \
    substitution_oracle
from lsc_stego.controller.media import Image, SignificationFunction, \
    extract_bits, partition
from lsc_stego.controller.randomness import monobit_test, runs_test
from lsc_stego.controller.strategy import ConstraintException, Strategy, \
    generate_strategy

from conftest import fast_key, natural_cover, random_cover


def random_strategy(rng, p_width):
    free = rng.integers(0, p_width, size=int(rng.integers(1, 2 * p_width + 1)))
    return Strategy(list(free) + list(rng.permutation(p_width)), p_width)


def test_embed_four_bit_channel():
    inst = EmbeddingInstance([0, 0, 0, 0], [1, 1], Strategy((0, 1, 1, 0), 2))
    assert di3_embed(inst).tolist() == [1, 1, 0, 0]


def test_embed_single_position():
    inst = EmbeddingInstance([1, 0, 1], [0], Strategy((0, 0), 1))
    assert di3_embed(inst).tolist() == [0, 0, 1]


def test_embed_matching_message_is_a_no_op():
    x0 = [1, 0, 1, 1, 0]
    inst = EmbeddingInstance(x0, x0[:3], Strategy((2, 2, 0, 1, 2), 3))
    assert di3_embed(inst).tolist() == x0


def test_instance_errors():
    with pytest.raises(CapacityException):
        EmbeddingInstance([0], [1, 1], Strategy((0, 1, 0), 2))
    with pytest.raises(MessageLengthException):
        EmbeddingInstance([0, 0, 0], [1, 1], Strategy((0, 0), 1))


def test_substitution_oracle():
    assert substitution_oracle([0, 0, 0, 0], [1, 1]).tolist() == [1, 1, 0, 0]
    assert substitution_oracle([1, 0, 1], []).tolist() == [1, 0, 1]
    assert substitution_oracle([1, 1], [0, 0]).tolist() == [0, 0]
    with pytest.raises(CapacityException):
        substitution_oracle([1], [0, 0])


def test_extract():
    assert di3_extract([1, 1, 0, 0], 2).tolist() == [1, 1]
    assert di3_extract([1, 0, 1], 3).tolist() == [1, 0, 1]
    with pytest.raises(CapacityException):
        di3_extract([1, 0], 3)


def test_equivalence_with_substitution():
    rng = np.random.default_rng(7)
    for n_bits in range(1, 13):
        for p_width in range(1, n_bits + 1):
            x0 = rng.integers(0, 2, n_bits)
            message = rng.integers(0, 2, p_width)
            expected = substitution_oracle(x0, message)
            for _ in range(100):
                inst = EmbeddingInstance(
                    x0, message, random_strategy(rng, p_width)
                )
                assert np.array_equal(di3_embed(inst), expected)


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_equivalence_with_keyed_strategies(data):
    n_bits = data.draw(st.integers(1, 16))
    p_width = data.draw(st.integers(1, n_bits))
    x0 = data.draw(st.lists(st.integers(0, 1), min_size=n_bits,
                            max_size=n_bits))
    message = data.draw(st.lists(st.integers(0, 1), min_size=p_width,
                                 max_size=p_width))
    length = data.draw(st.integers(p_width + 1, 4 * p_width + 1))
    key_id = data.draw(st.integers(0, 2 ** 32 - 1))
    strategy = generate_strategy(fast_key(key_id), p_width, length)
    inst = EmbeddingInstance(x0, message, strategy)

    stego = di3_embed(inst)
    assert stego.tolist() == substitution_oracle(x0, message).tolist()
    assert di3_extract(stego, p_width).tolist() == message
    # writing the same message again changes nothing
    assert di3_embed(EmbeddingInstance(stego, message, strategy)).tolist() \
        == stego.tolist()


def test_batch_embedding_broadcasts():
    covers = np.array([[0, 0, 0], [1, 1, 1]], dtype=np.uint8)[:, None, :]
    messages = np.array([[0], [1]], dtype=np.uint8)[None, :, :]
    stego = di3_embed_batch(covers, messages, Strategy((0, 0, 0), 1))

    assert stego.shape == (2, 2, 3)
    assert stego[:, :, 0].tolist() == [[0, 1], [0, 1]]
    assert stego[1, 0].tolist() == [0, 1, 1]


def test_capacity(grayscale):
    img = Image(512, 512, 255, np.zeros(512 * 512, dtype=np.uint8))

    assert capacity(img, grayscale, 1, 5) == {
        'lsc_bits': 262144,
        'capacity_bytes': 32768,
        'bits_per_pixel': 1.0
    }
    assert capacity(img, grayscale, 2, 5)['bits_per_pixel'] == 2.0


def test_randomize_without_lscs_is_identity(key):
    func = SignificationFunction([8] * 8)
    img = random_cover(1, 4, 4)
    part = partition(func, img.bit_length, 1, 5)

    assert randomize_lscs(img, part, key) is img


def test_randomize_only_touches_lscs(grayscale, key, bbs_key):
    img = random_cover(2, 16, 16)
    part = partition(grayscale, img.bit_length, 2, 5)
    kept = np.concatenate([part.msc, part.passive])

    for stego_key in (key, bbs_key):
        first = randomize_lscs(img, part, stego_key)
        second = randomize_lscs(img, part, stego_key)

        assert first == second
        assert np.array_equal(extract_bits(first, kept),
                              extract_bits(img, kept))


def test_extract_from_image_packs_msb_first(grayscale):
    img = Image(8, 1, 255, [10, 11, 10, 10, 10, 10, 10, 11])
    assert extract_from_image(img, grayscale, 1, 5, 1) == b'\x41'

    zeros = Image(4, 4, 255, [0] * 16)
    assert extract_from_image(zeros, grayscale, 1, 5, 2) == b'\x00\x00'

    with pytest.raises(CapacityException):
        extract_from_image(zeros, grayscale, 1, 5, 3)


def test_extract_rejects_negative_length(grayscale):
    img = Image(8, 1, 255, [85] * 8)
    with pytest.raises(CapacityException):
        extract_from_image(img, grayscale, 1, 5, -2)



def test_embed_needs_maxval_headroom(grayscale, key):
    img = Image(16, 16, 200, [200] * 256)
    part = partition(grayscale, img.bit_length, 1, 5)

    with pytest.raises(HeadroomException):
        embed_in_image(img, grayscale, 1, 5, b'\x5a', key)
    with pytest.raises(HeadroomException):
        embed_in_image(img, grayscale, 1, 5, b'\x5a', key,
                       prerandomize=False)
    with pytest.raises(HeadroomException):
        randomize_lscs(img, part, key)


def test_embed_below_full_maxval(grayscale, key):
    img = Image(16, 16, 200, [100] * 256)
    stego = embed_in_image(img, grayscale, 1, 5, b'\x5a\xa5', key)

    assert stego.maxval == 200
    assert extract_from_image(stego, grayscale, 1, 5, 2) == b'\x5a\xa5'


def test_headroom_counts_all_lscs_of_a_pixel(grayscale):
    part = partition(grayscale, 8, 2, 5)

    check_headroom(Image(1, 1, 254, [248]), part.lsc)
    with pytest.raises(HeadroomException):
        check_headroom(Image(1, 1, 254, [252]), part.lsc)


def test_embed_over_capacity(grayscale, key):
    img = random_cover(3, 4, 4)
    with pytest.raises(CapacityException):
        embed_in_image(img, grayscale, 1, 5, b'\x01\x02\x03', key)


def test_embed_rejects_short_lambda(grayscale, key):
    img = random_cover(3, 8, 8)
    with pytest.raises(ConstraintException):
        embed_in_image(img, grayscale, 1, 5, b'\xa5', key, length=8)


def test_embed_warns_above_half_capacity(grayscale, key, caplog):
    img = random_cover(4, 4, 4)
    with caplog.at_level(logging.WARNING):
        embed_in_image(img, grayscale, 1, 5, b'\x5a\xa5', key)

    assert "more than half" in caplog.text


def test_embed_with_bbs(grayscale, bbs_key):
    img = natural_cover(5, 32, 32)
    message = bytes(range(40, 72))
    stego = embed_in_image(img, grayscale, 1, 5, message, bbs_key)

    assert extract_from_image(stego, grayscale, 1, 5, len(message)) == message


@settings(max_examples=200, deadline=None)
@given(st.data())
def test_round_trip(data):
    width = data.draw(st.integers(3, 64))
    height = data.draw(st.integers(3, 64))
    m_thresh = data.draw(st.sampled_from([1, 2, 3]))
    img = random_cover(data.draw(st.integers(0, 10 ** 6)), width, height)
    func = SignificationFunction.grayscale()

    lsc_bits = partition(func, img.bit_length, m_thresh, 5).lsc.size
    message = data.draw(st.binary(min_size=1, max_size=min(lsc_bits // 8, 64)))
    p_width = 8 * len(message)
    length = data.draw(st.one_of(
        st.none(), st.integers(p_width + 1, 3 * p_width + 1)
    ))
    prerandomize = data.draw(st.booleans())
    key = fast_key(data.draw(st.integers(0, 2 ** 32 - 1)))

    stego = embed_in_image(img, func, m_thresh, 5, message, key,
                           length, prerandomize)

    assert extract_from_image(stego, func, m_thresh, 5, len(message)) \
        == message

    part = partition(func, img.bit_length, m_thresh, 5)
    kept = np.concatenate([part.msc, part.passive])
    assert np.array_equal(extract_bits(stego, kept), extract_bits(img, kept))


def test_plain_messages_trigger_the_warning(caplog):
    with caplog.at_level(logging.WARNING):
        assert message_uniformity_warning(np.zeros(256, dtype=np.uint8),
                                          0.001)

    assert "encrypt" in caplog.text


def test_uniform_messages_pass_quietly():
    rng = np.random.default_rng(11)
    bits = np.unpackbits(rng.integers(0, 256, 64, dtype=np.uint8))
    assert not message_uniformity_warning(bits, 0.001)
    assert not message_uniformity_warning(np.zeros(4, dtype=np.uint8), 0.001)


def test_randomized_channels_look_random(grayscale):
    monobit_passes = runs_passes = 0
    for idx in range(100):
        img = natural_cover(1000 + idx, 100, 100)
        part = partition(grayscale, img.bit_length, 1, 5)
        channel = extract_bits(randomize_lscs(img, part, fast_key(idx)),
                               part.lsc)

        assert channel.size >= 10 ** 4
        monobit_passes += monobit_test(channel, 0.01).passed
        runs_passes += runs_test(channel, 0.01).passed

    assert monobit_passes >= 97
    assert runs_passes >= 97


def test_thousand_seeded_round_trips(grayscale):
    rng = np.random.default_rng(31337)
    for idx in range(1000):
        width, height = (int(v) for v in rng.integers(4, 17, size=2))
        img = random_cover(idx, width, height)
        message = rng.integers(0, 256, int(rng.integers(1, width * height // 8 + 1)),
                               dtype=np.uint8).tobytes()
        length = 8 * len(message) + int(rng.integers(1, 16))

        stego = embed_in_image(img, grayscale, 1, 5, message, fast_key(idx),
                               length)

        assert extract_from_image(stego, grayscale, 1, 5, len(message)) \
            == message
        assert np.array_equal(stego.pixels >> 1, img.pixels >> 1)
