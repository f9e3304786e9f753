import itertools

import numpy as np
import pytest

from ellface import ModelParams
from ellface import free_field as ff
from ellface import vertex_ops as vo
from ellface.suites import vertex_points

P = ModelParams(c=1.0)
V1, V2 = 0.31 + 0.05j, -0.12 + 0.02j
ALL = list(itertools.product((1, -1), repeat=2))


def test_kernel_zero_and_pole():
    assert abs(vo.kernel_f(0.3 - 0.5, 0.3, P)) < 1e-15
    assert abs(vo.kernel_f(0.5 + 1e-12, 0.1, P)) > 1e10


def test_kernel_prime_zero():
    assert abs(vo.kernel_f_prime(0.5 - 0.3, 0.3, P)) < 1e-15


def test_zf_pp_contraction_level():
    assert vo.zf_check_pp(0.45, 0.0, 2.5, P) < 1e-8
    assert vo.zf_check_pp(0.3 + 0.05j, -0.15, 2.5, P) < 1e-8


def test_pp_slot_matches_contraction_check():
    # (+,+) of the type I relation involves no contour integral
    assert vo.zf_check_full(49, [(1, 1)], V1, V2, P) < 1e-8


@pytest.mark.parametrize("rel", [49, 50])
def test_zf_full(rel):
    assert vo.zf_check_full(rel, ALL, V1, V2, P) < 1e-8


def test_zf_mixed_needs_sign():
    assert vo.zf_check_full(51, ALL, V1, V2, P, tau_sign=-1) < 1e-8
    # the printed sign fails by O(1)
    assert vo.zf_check_full(51, [(1, -1)], V1, V2, P, occs=((),), tau_sign=1) > 0.5


def test_word_charge_and_shift():
    w = vo.phi(1, 0.2, P) * vo.psi_star(1, 0.3, P)
    assert np.isfinite(vo.word_charge(w, P))
    assert np.isfinite(vo.pi_shift(w, P))


def test_node_doubling():
    ket = ff.FockStateTrunc(0.37, ())
    word = vo.phi(-1, 0.3 + 0.05j, P)
    bra = vo._sector(word, ket, (), P)
    val, diff = vo.word_element_checked(word, bra, ket, P, nodes=64, tol=1e-8)
    assert diff < 1e-8 * abs(val)


def test_phi_minus_level_one_state():
    ket = ff.FockStateTrunc(0.37, ((1, 1),))
    word = vo.phi(-1, 0.3, P)
    bra = vo._sector(word, ket, (), P)
    val = vo.phi_minus_matrix_element(0.3, bra, ket, P)
    assert np.isfinite(val) and abs(val) > 0


def test_cheap_components_nonempty():
    for rel in vo.RLL_RELATIONS:
        assert vo.cheap_rll_components(rel)
    for rel in ("56", "57", "58", "59"):
        assert vo.cheap_prop4_components(rel)


def test_rll_same_sign_vacuum():
    a, b = vertex_points(P)["26-"]
    assert vo.rll_spot_check("26-", a, b, P, occs=((),)) < 1e-6


def test_miki_requires_level_one():
    with pytest.raises(ValueError):
        vo.rll_spot_check("26-", V1, V2, ModelParams(c=2.0))


def test_intertwining_57_coincident():
    # degenerate point v1 = v2 of the minus relation
    assert vo.prop4_spot_check("57", 0.2 + 0.05j, 0.2 + 0.05j, P, occs=((),)) < 1e-6
