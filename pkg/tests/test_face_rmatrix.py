import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ellface import ModelParams
from ellface import face_rmatrix as fr
from ellface.errors import ConfigError

P = ModelParams()
vs = st.floats(0.1, 1.2)
pis = st.floats(1.5, 3.5)

# a(v) has poles at v = 1 + 2k (mod r); tau^{+-} at v in {0, +-1, +-2}
LATTICE = (-2.0, -1.0, 0.0, 1.0, 2.0)


def clear(*ds, gap=0.02):
    return all(min(abs(d - p) for p in LATTICE) > gap for d in ds)

# R_F weights at (v = 0.8, pi_hat = 2.5, x = 0.3, r = 6), first validated run
FROZEN_WEIGHTS = {
    "a": 5.472526199565409,
    "b": 1.5639474254197463,
    "c": 3.120109483932318,
    "d": 2.2295771364887296,
    "e": 2.3947444075634365,
}


@pytest.mark.parametrize("which", "abcde")
def test_frozen_weights(which):
    assert abs(fr.weight(which, 0.8, 2.5, P) - FROZEN_WEIGHTS[which]) < 1e-12


def test_frozen_tau():
    assert abs(fr.tau(0.3, P) - 3.080427714971278) < 1e-13


def test_weights_at_zero():
    assert fr.weight("b", 0.0, 2.5, P) == 0
    assert abs(fr.weight("c", 0.0, 2.5, P) - 1) < 1e-14
    assert abs(fr.weight("a", 0.0, 2.5, P) - 1) < 1e-14


def test_initial_condition_is_permutation():
    for pi in (1.7, 2.5, 3.3):
        assert np.abs(fr.bare_R(0.0, pi, P) - fr.PERM).max() < 1e-12


def test_entry_layout():
    m = fr.build_R(None, 0.8, 2.5, P)
    assert m.entry((1, -1), (-1, 1)) == m.entries[1, 2]
    assert m.entry((1, 1), (1, 1)) == m.entries[0, 0]
    # charge conservation: only mu + nu preserving entries are nonzero
    for i, up in enumerate([(1, 1), (1, -1), (-1, 1), (-1, -1)]):
        for j, lo in enumerate([(1, 1), (1, -1), (-1, 1), (-1, -1)]):
            if sum(up) != sum(lo):
                assert m.entries[i, j] == 0


def test_star_is_substitution():
    v, pi = 0.4, 2.5
    star = fr.build_R_star(None, v, pi, P).entries
    direct = fr.build_R(None, v, -pi, P, level=P.r - P.c).entries
    assert np.array_equal(star, direct)
    assert abs(star[1, 1] - fr.weight("b", v, -pi, P, level=P.r - P.c)) == 0


def test_star_at_c_zero():
    p0 = P.with_(c=0.0)
    star = fr.build_R_star(1, 0.4, 2.5, p0).entries
    plain = fr.build_R(1, 0.4, -2.5, p0).entries
    assert np.abs(star - plain).max() < 1e-15


class TestDynamicalYBE:
    def test_headline(self):
        for s in fr.SIGNS:
            assert fr.check_dyn_ybe(s, 0.7, 0.3, -0.2, 2.5, P) < 1e-8

    def test_coincident_points(self):
        # tau^+(0) is a pole; the scalar tau factors are common to both sides
        assert fr.check_dyn_ybe(None, 0.4, 0.4, 0.4, 2.5, P) < 1e-14

    def test_difference_property(self):
        a = fr.check_dyn_ybe(1, 0.7, 0.3, -0.2, 2.5, P)
        b = fr.check_dyn_ybe(1, 0.81, 0.41, -0.09, 2.5, P)
        assert a < 1e-8 and b < 1e-8

    def test_printed_shift_fails(self):
        # the spectator shift as printed does not satisfy the equation
        assert fr.check_dyn_ybe(1, 0.7, 0.3, -0.2, 2.5, P, dyn_shift=-2.0) > 1e-3

    @given(vs, vs, vs, pis, st.sampled_from(fr.SIGNS))
    def test_random(self, v1, v2, v3, pi, s):
        assume(clear(v1 - v2, v1 - v3, v2 - v3))
        assert fr.check_dyn_ybe(s, v1, v2, v3, pi, P) < 1e-8


class TestUnitarityCrossingShift:
    def test_unitarity_points(self):
        for v in (0.0, 0.37, -0.37):
            assert fr.check_unitarity(1, v, 2.5, P) < 1e-8

    def test_crossing_full(self):
        assert fr.check_crossing(0.2, 2.5, P) < 1e-8

    @given(vs, pis, st.sampled_from(fr.SIGNS))
    def test_unitarity_random(self, v, pi, s):
        assume(clear(v))
        assert fr.check_unitarity(s, v, pi, P) < 1e-8

    @given(vs, pis)
    def test_crossing_random(self, v, pi):
        assume(clear(v))
        assert fr.check_crossing(v, pi, P) < 1e-8

    @given(vs, pis)
    def test_shift_random(self, v, pi):
        assume(clear(v))
        assert fr.check_shift(v, pi, P) < 1e-8

    def test_complex_modulus(self):
        p = ModelParams(x=0.3 + 0.05j)
        assert fr.check_dyn_ybe(1, 0.7, 0.3, -0.2, 2.5, p) < 1e-8
        assert fr.check_unitarity(-1, 0.37, 2.5, p) < 1e-8


def test_small_r_guard():
    with pytest.raises(ConfigError):
        ModelParams(r=3.0)
    assert ModelParams(r=3.0, allow_small_r=True).r == 3.0
