import numpy as np
import pytest

from ellface import ModelParams
from ellface import face_rmatrix as fr
from ellface import twist as tw
from ellface.errors import DomainError

P = ModelParams(r=6.37)


def rel(a, b):
    return float(np.abs(a - b).max() / np.abs(a).max())


def test_guard():
    for r in (6.0, 6.5, 6.3, 13 / 3):
        with pytest.raises(DomainError):
            tw.generic_r_guard(r)
    tw.generic_r_guard(6.37)
    with pytest.raises(DomainError):
        tw.untwist_R(0.5, 0.1, 2.3, ModelParams())


@pytest.mark.parametrize("kind", tw.KINDS)
@pytest.mark.parametrize("height", [1.9, 2.6, 3.4])
def test_dual_pairings(kind, height):
    a, b = tw.dual_pairings(kind, height, 0.31, P)
    assert a < 1e-10 and b < 1e-10


def test_decompose_pi_roundtrip():
    k = 2.2
    l = tw.decompose_pi(2.5, k, P)
    assert abs((P.r - P.c) * k - P.r * l - 2.5) < 1e-14


def test_height_independence():
    base = tw.untwist_R(0.5, 0.1, 2.3, P).matrix
    for h in (1.7, 2.9, 3.3):
        assert rel(base, tw.untwist_R(0.5, 0.1, h, P).matrix) < 1e-7
        assert rel(tw.untwist_R_star(0.5, 0.1, 2.3, P).matrix, tw.untwist_R_star(0.5, 0.1, h, P).matrix) < 1e-7


def test_difference_form():
    a = tw.untwist_R(0.5, 0.1, 2.3, P).matrix
    b = tw.untwist_R(0.73, 0.33, 2.3, P).matrix
    assert rel(a, b) < 1e-7


def test_eight_vertex_pattern():
    m = tw.untwist_R(0.5, 0.1, 2.3, P).matrix
    zero = [(0, 1), (0, 2), (1, 0), (1, 3), (2, 0), (2, 3), (3, 1), (3, 2)]
    scale = np.abs(m).max()
    assert all(abs(m[i, j]) < 1e-12 * scale for i, j in zero)
    assert abs(m[0, 0] - m[3, 3]) < 1e-12 * scale
    assert abs(m[1, 2] - m[2, 1]) < 1e-12 * scale
    assert abs(m[0, 3]) > 1e-3 * scale  # genuinely eight-vertex


def test_retwist():
    vert = tw.untwist_R(0.5, 0.1, 2.3, P).matrix
    for h in (1.8, 3.1):
        assert rel(fr.bare_R(0.4, h, P), tw.retwist(vert, 0.5, 0.1, h, P)) < 1e-7
    vs = tw.untwist_R_star(0.5, 0.1, 2.3, P).matrix
    want = fr.bare_R(0.4, 2.9, P, level=P.r - P.c)
    assert rel(want, tw.retwist_R_star(vs, 0.5, 0.1, 2.9, P)) < 1e-7


@pytest.mark.parametrize("star", [False, True])
def test_vertex_ybe(star):
    f = tw.untwist_R_star if star else tw.untwist_R
    res = tw.vertex_ybe_residual(lambda d: f(d + 0.11, 0.11, 2.3, P).matrix, 0.7, 0.3, -0.2)
    assert res < 1e-7


def test_star_equals_plain_at_c_zero():
    p0 = P.with_(c=0.0)
    a = tw.untwist_R(0.5, 0.1, 2.3, p0).matrix
    b = tw.untwist_R_star(0.5, 0.1, 2.3, p0).matrix
    assert rel(a, b) < 1e-12
