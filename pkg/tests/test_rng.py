"""Reproducibility and uniformity of the digit streams."""

from collections import Counter

from padic_rmt.rng import RngStream
from padic_rmt.stats import chi_square_gof


def test_same_address_same_digits():
    a = RngStream(42, 7)
    b = RngStream(42, 7)
    assert a.digits(("x", 1), 64, 3) == b.digits(("x", 1), 64, 3)
    assert a.residue(("y",), 2, 200) == b.residue(("y",), 2, 200)


def test_distinct_streams_differ():
    a = RngStream(42, 0)
    b = RngStream(42, 1)
    c = RngStream(43, 0)
    base = a.digits(("x",), 128, 2)
    assert base != b.digits(("x",), 128, 2)
    assert base != c.digits(("x",), 128, 2)


def test_residue_extension_is_coherent():
    rng = RngStream(5, 0)
    for p in (2, 3, 7):
        small = rng.residue(("r", p), p, 10)
        big = rng.residue(("r", p), p, 37)
        assert big % p**10 == small


def test_sliced_extension_is_coherent():
    rng = RngStream(6, 0)
    for p in (2, 3):
        small = rng.sliced_residues(("s", p), 9, p, 12)
        big = rng.sliced_residues(("s", p), 9, p, 61)
        assert [x % p**12 for x in big] == small


def test_sliced_first_digits_match_residues():
    rng = RngStream(7, 0)
    for p in (2, 3, 5):
        first = rng.sliced_first_digits(("f", p), 6, p)
        res = rng.sliced_residues(("f", p), 6, p, 9)
        assert first == [x % p for x in res]


def test_digit_uniformity_chi_square():
    rng = RngStream(8, 0)
    for p in (2, 3, 5):
        counts = Counter()
        digits = rng.digits(("u", p), 30000, p)
        counts.update(digits)
        from fractions import Fraction

        expected = {d: Fraction(1, p) for d in range(p)}
        report = chi_square_gof(counts, expected, alpha=0.01)
        assert report.passed, (p, report)


def test_uniform_int_bounds_and_determinism():
    rng = RngStream(9, 0)
    seen = set()
    for i in range(500):
        x = rng.uniform_int(("b", i), 12)
        assert 0 <= x < 12
        seen.add(x)
    assert seen == set(range(12))
    assert rng.uniform_int(("b", 0), 12) == RngStream(9, 0).uniform_int(("b", 0), 12)


def test_unit_residue_is_unit():
    rng = RngStream(10, 0)
    for i in range(100):
        u = rng.unit_residue(("u", i), 3, 6)
        assert u % 3 != 0
        assert 0 <= u < 3**6
