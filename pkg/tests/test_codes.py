from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from blindrate import gf2
from blindrate.codes import LinearCode, encode, encode_many, from_alist, parse_alist, random_code, to_alist
from blindrate.errors import AlistParseError, DimensionError
from blindrate.gf2 import BitMatrix

from oracles import dense_rank, in_row_space

H_3x6 = np.array(
    [[1, 1, 0, 1, 0, 0], [0, 1, 1, 0, 1, 0], [1, 0, 1, 0, 0, 1]], dtype=np.uint8
)

# hand-written alist for H_3x6
ALIST_3x6 = """6 3
2 3
2 2 2 1 1 1
3 3 3
1 3
1 2
2 3
1
2
3
1 2 4
2 3 5
1 3 6
"""


def test_full_rate_code_is_invertible():
    code = random_code(8, 8, seed=0)
    assert gf2.rank(code.generator) == 8
    assert code.rate == 1


def test_rate_of_544_176_code():
    code = random_code(544, 176, seed=1)
    assert code.rate == Fraction(176, 544)
    assert float(code.rate) == pytest.approx(0.3235, abs=5e-5)
    assert gf2.rank(code.generator) == 176


def test_seed_determinism():
    assert random_code(30, 12, seed=7).generator == random_code(30, 12, seed=7).generator
    assert random_code(30, 12, seed=7).generator != random_code(30, 12, seed=8).generator


def test_k_greater_than_n():
    with pytest.raises(ValueError):
        random_code(4, 5, seed=0)


def test_from_alist_handwritten():
    code = from_alist(ALIST_3x6)
    assert np.array_equal(code.parity_check.to_dense(), H_3x6)
    assert (code.n, code.k) == (6, 6 - dense_rank(H_3x6.tolist())) == (6, 3)


def test_alist_roundtrip():
    rng = np.random.default_rng(4)
    h = (rng.random((10, 24)) < 0.25).astype(np.uint8)
    assert np.array_equal(parse_alist(to_alist(h)), h)


def test_alist_zero_padding_ignored():
    padded = ALIST_3x6.replace("\n1\n2\n3\n", "\n1 0 0\n2 0 0\n3 0 0\n")
    assert np.array_equal(parse_alist(padded), H_3x6)


def test_alist_redundant_row():
    h = np.vstack([H_3x6, H_3x6[0] ^ H_3x6[1], np.zeros(6, dtype=np.uint8)])
    code = from_alist(to_alist(h))
    assert code.k == 6 - dense_rank(h.tolist()) == 3


def test_alist_truncated():
    text = "\n".join(ALIST_3x6.splitlines()[:-2])
    with pytest.raises(AlistParseError) as info:
        parse_alist(text)
    assert "line" in str(info.value)


@pytest.mark.parametrize(
    "mutate, line",
    [
        (lambda ls: ["6"] + ls[1:], 1),
        (lambda ls: ls[:4] + ["1 9"] + ls[5:], 5),
        (lambda ls: ls[:2] + ["2 2 2 1 1 2"] + ls[3:], 10),
        (lambda ls: ls[:4] + ["1 x"] + ls[5:], 5),
    ],
)
def test_alist_errors_name_the_line(mutate, line):
    text = "\n".join(mutate(ALIST_3x6.splitlines()))
    with pytest.raises(AlistParseError) as info:
        parse_alist(text)
    assert info.value.line == line


def test_encode_zero_message():
    code = random_code(15, 6, seed=2)
    assert not encode(code, np.zeros(6, dtype=np.uint8)).any()


def test_encode_identity_generator():
    code = LinearCode(n=3, k=3, generator=BitMatrix.identity(3))
    msg = np.array([1, 0, 1], dtype=np.uint8)
    assert np.array_equal(encode(code, msg), msg)


def test_encode_length_mismatch():
    code = random_code(10, 4, seed=0)
    with pytest.raises(DimensionError):
        encode(code, np.ones(5, dtype=np.uint8))


def test_encoded_words_in_row_space():
    code = random_code(12, 5, seed=3)
    g = code.generator.to_dense().tolist()
    rng = np.random.default_rng(0)
    for _ in range(20):
        word = encode(code, rng.integers(0, 2, size=5))
        assert in_row_space(word.tolist(), g)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.data())
def test_encode_linear(n, data):
    k = data.draw(st.integers(1, n))
    code = random_code(n, k, seed=data.draw(st.integers(0, 1000)))
    m1 = np.array(data.draw(st.lists(st.integers(0, 1), min_size=k, max_size=k)), dtype=np.uint8)
    m2 = np.array(data.draw(st.lists(st.integers(0, 1), min_size=k, max_size=k)), dtype=np.uint8)
    assert np.array_equal(encode(code, m1 ^ m2), encode(code, m1) ^ encode(code, m2))


@pytest.mark.parametrize("n, k", [(10, 10), (16, 7), (30, 10), (12, 1)])
def test_encode_injective(n, k):
    code = random_code(n, k, seed=n * 100 + k)
    msgs = ((np.arange(2**k)[:, None] >> np.arange(k)) & 1).astype(np.uint8)
    words = encode_many(code, msgs)
    assert len({w.tobytes() for w in words}) == 2**k


def test_alist_code_satisfies_checks():
    rng = np.random.default_rng(12)
    h = (rng.random((8, 20)) < 0.3).astype(np.uint8)
    code = from_alist(to_alist(h))
    for _ in range(25):
        word = encode(code, rng.integers(0, 2, size=code.k))
        assert not ((h.astype(int) @ word.astype(int)) % 2).any()
