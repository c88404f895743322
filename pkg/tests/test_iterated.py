import math

import pytest
from hypothesis import given
from hypothesis import strategies as st

from robspan.geometry import InputError
from robspan.iterated import PRESETS, IteratedFunction, corollary_presets, next_pow2, preset


@pytest.mark.parametrize("x, expected", [(1, 1), (5, 8), (8, 8), (1.5, 2), (1024, 1024), (1025, 2048)])
def test_next_pow2(x, expected):
    assert next_pow2(x) == expected


def test_next_pow2_rejects_small():
    with pytest.raises(InputError):
        next_pow2(0.5)


@given(st.floats(1, 1e9))
def test_next_pow2_property(x):
    p = next_pow2(x)
    assert p >= x and (p == 1 or p / 2 < x) and p & (p - 1) == 0


def brute_f_star(F, n):
    best, x, i = 0, F.k0, 0
    while x <= n:
        best, i = i, i + 1
        x = F.f(x)
    return best


def test_f_star_examples():
    double = IteratedFunction(lambda k: 2 * k, 1, "double")
    assert double.f_star(8) == 3
    square = preset("kpow", 1.0)
    assert square.f_star(16) == 2 and square.f_star(square.k0) == 0
    with pytest.raises(InputError):
        square.f_star(1)


@given(st.integers(1, 2**40))
def test_double_f_star_is_floor_log(n):
    assert IteratedFunction(lambda k: 2 * k, 1).f_star(n) == math.floor(math.log2(n))


@pytest.mark.parametrize("name", PRESETS)
@given(n=st.integers(16, 10**7))
def test_f_star_matches_brute(name, n):
    F = preset(name, 0.5)
    assert F.f_star(n) == brute_f_star(F, n)


def test_kpow_preset_is_square_from_two():
    F = preset("kpow", 1.0)
    assert F.k0 == 2 and F(3) == 9
    assert [F.iterate(i) for i in range(4)] == [2, 4, 16, 256]


def test_klogk_f_star_at_most_log():
    n = 2**20
    assert preset("klogk").f_star(n) <= math.log2(n)


@pytest.mark.parametrize("F", corollary_presets(0.5), ids=lambda F: F.name)
def test_presets_satisfy_invariants(F):
    F.check(32)
    assert F(F.k0 + 1) - F(F.k0) > 1
    xs = [F.iterate(i) for i in range(6)]
    assert all(a < b for a, b in zip(xs, xs[1:]))
    # k0 is the smallest valid integer
    if F.k0 > 1:
        with pytest.raises(InputError):
            IteratedFunction(F.f, F.k0 - 1)


def test_rejects_non_growing_function():
    with pytest.raises(InputError):
        IteratedFunction(lambda k: k + 1, 1)
    with pytest.raises(InputError):
        IteratedFunction(lambda k: math.sqrt(k) * 10, 1)
    with pytest.raises(InputError):
        preset("nope")


def test_span_ladder():
    F = preset("kpow", 1.0)
    assert F.span_ladder(20) == [1, 2, 4, 16]
    assert F.span_ladder(1) == [1]
    for n in (2, 100, 5000):
        ladder = F.span_ladder(n)
        assert ladder[0] == 1 and all(s & (s - 1) == 0 for s in ladder)
        assert all(a < b for a, b in zip(ladder, ladder[1:]))
