import numpy as np
import pytest
from fractions import Fraction
from hypothesis import given, settings, strategies as st

from thcover.symbolic import (
    CirclePoint,
    Orbit,
    Word,
    neighbor_cylinders,
    project_to_circle,
)


bits_strategy = st.lists(st.integers(0, 1), min_size=1, max_size=64)


@given(bits_strategy)
def test_word_code_roundtrip(bits):
    w = Word(tuple(bits))
    assert Word.from_code(w.code, w.n) == w
    assert Word.from_lex_rank(w.lex_rank, w.n) == w


@given(st.lists(st.integers(0, 1), min_size=1, max_size=300), st.integers(1, 64))
@settings(max_examples=60)
def test_orbit_pack_roundtrip_and_windows(bits, n):
    orbit = Orbit.from_bits(bits)
    assert list(orbit.to_bits()) == bits
    if n <= len(bits):
        for i in (0, len(bits) - n, max(0, (len(bits) - n) // 2)):
            assert list(orbit.window(i, n).bits) == bits[i : i + n]
        codes = orbit.window_codes(n, 0, len(bits) - n + 1)
        want = [orbit.window(i, n).code for i in range(len(bits) - n + 1)]
        assert [int(c) for c in codes] == want


def test_project_examples():
    assert float(project_to_circle(Word.from_string("1"))) == 0.5
    assert project_to_circle(Word(()), cycle=(0, 1)).value == Fraction(1, 3)
    assert float(project_to_circle(Word.from_string("0000"))) == 0.0
    # prefix plus cycle
    assert project_to_circle(Word.from_string("1"), cycle=(0, 1)).value == Fraction(1, 2) + Fraction(1, 6)


def test_project_monotone_in_lex_order():
    for n in range(1, 11):
        vals = [float(project_to_circle(Word.from_lex_rank(r, n))) for r in range(1 << n)]
        assert all(a < b for a, b in zip(vals, vals[1:]))
        assert vals[0] == 0.0 and vals[-1] < 1.0


def test_neighbor_examples():
    pred, succ = neighbor_cylinders(Word.from_string("010"))
    assert (str(pred), str(succ)) == ("001", "011")
    pred, succ = neighbor_cylinders(Word.from_string("000"))
    assert (str(pred), str(succ)) == ("111", "001")
    pred, succ = neighbor_cylinders(Word.from_string("1"))
    assert (str(pred), str(succ)) == ("0", "0")


def test_neighbor_bijection_exhaustive():
    for n in range(1, 13):
        for rank in range(1 << n):
            w = Word.from_lex_rank(rank, n)
            pred, succ = neighbor_cylinders(w)
            assert neighbor_cylinders(succ)[0] == w
            assert neighbor_cylinders(pred)[1] == w


def test_neighbor_nonwrapping():
    lo = Word.from_string("000")
    hi = Word.from_string("111")
    assert neighbor_cylinders(lo, wrap=False)[0] is None
    assert neighbor_cylinders(hi, wrap=False)[1] is None
    assert str(neighbor_cylinders(lo, wrap=False)[1]) == "001"


def test_windows_iterator():
    orbit = Orbit.from_string("0110")
    assert [(i, str(w)) for i, w in orbit.windows(2)] == [(0, "01"), (1, "11"), (2, "10")]
    assert [(i, str(w)) for i, w in Orbit.from_string("0000").windows(4)] == [(0, "0000")]
    assert len(list(orbit.windows(1))) == 4
    assert list(orbit.windows(5)) == []


def test_circle_point_distance():
    a, b = CirclePoint(Fraction(1, 10)), CirclePoint(Fraction(9, 10))
    assert a.distance(b) == pytest.approx(0.2)
    assert CirclePoint(Fraction(1, 3)).doubled().value == Fraction(2, 3)


def test_orbit_binary_format(tmp_path):
    rng = np.random.default_rng(1)
    bits = rng.integers(0, 2, size=777)
    orbit = Orbit.from_bits(bits)
    path = tmp_path / "o.thcv"
    orbit.write_binary(path)
    raw = path.read_bytes()
    assert raw[:4] == b"THCV"
    assert int.from_bytes(raw[4:8], "little") == 1
    assert int.from_bytes(raw[8:16], "little") == 777
    back = Orbit.read_binary(path)
    assert back.length == 777
    assert np.array_equal(back.to_bits(), bits)


def test_orbit_text_format(tmp_path):
    orbit = Orbit.from_string("0101101")
    path = tmp_path / "o.txt"
    orbit.write_text(path)
    assert Orbit.read_text(path).to_bits().tolist() == orbit.to_bits().tolist()


def test_orbit_bad_magic(tmp_path):
    path = tmp_path / "bad.bin"
    path.write_bytes(b"NOPE" + b"\0" * 12)
    with pytest.raises(ValueError, match="not an orbit file"):
        Orbit.read_binary(path)
