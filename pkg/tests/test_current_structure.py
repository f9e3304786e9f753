import numpy as np
import pytest
from hypothesis import assume, given
from hypothesis import strategies as st

from ellface import ModelParams
from ellface import current_structure as cs
from ellface.errors import DomainError, PoleError

P = ModelParams()
P1 = ModelParams(c=1.0)
dvs = st.builds(complex, st.floats(-0.9, 0.9), st.floats(0.05, 0.3))

# dv = 0.4 + 0.1i, x = 0.3, r = 6, c = 1 (first validated run)
FROZEN = {
    "EE": -0.4085468848960953 + 0.10076026721308483j,
    "FF": -2.171877383421009 - 0.49871191962790934j,
    "HE+": -0.7160216927998125 + 0.15385313807891682j,
    "HE-": -0.19989696668747517 + 0.07064919017041653j,
    "HF+": -4.027695372778004 - 1.3508557231714333j,
    "HF-": -1.3074880569681377 - 0.2590173603032381j,
    "HH": 0.9375640856569939 - 0.015091744283022145j,
    "H+H-": 12.149027823655063 + 8.44249808891145j,
    "H-H+": 0.047675241444325826 - 0.03546390996417255j,
}


@pytest.mark.parametrize("kind", cs.EXCHANGE_KINDS)
def test_frozen(kind):
    got = cs.exchange(kind, 0.4 + 0.1j, P)
    assert abs(got - FROZEN[kind]) < 1e-12 * abs(FROZEN[kind])


def test_ee_at_coincidence():
    # [-1]_r / [1]_r = -1 by oddness
    assert abs(cs.exchange("EE", 0.0, P) + 1) < 1e-14


def test_exchange_function_wrapper():
    f = cs.exchange_function("HH")
    assert f.kind == "HH"
    assert f(0.3, P) == cs.exchange("HH", 0.3, P)
    with pytest.raises(KeyError):
        cs.exchange_function("XX")


def test_pole_detection():
    # the EE denominator [dv + 1]_r vanishes at dv = -1
    with pytest.raises(PoleError):
        cs.exchange("EE", -1.0, P)


def test_reversed_ordering_is_inverse():
    dv = 0.33 + 0.07j
    assert abs(cs.exchange("H-H+", dv, P) * cs.exchange("H+H-", -dv, P) - 1) < 1e-14


class TestCornerIdentities:
    @pytest.mark.parametrize("c", [1.0, 2.0])
    @pytest.mark.parametrize("v", [0.17, 0.55, 1.13])
    def test_identities(self, c, v):
        assert max(cs.corner_identities(v, P.with_(c=c))) < 1e-8

    def test_ratio_symmetry_at_zero(self):
        a, ap = cs.corner_entries(None, 0.0, P)
        assert abs(a - 1) < 1e-14 and abs(ap - 1) < 1e-14

    def test_c_zero_coincide(self):
        r = cs.corner_identities(0.4, P.with_(c=0.0))
        assert abs(r[0] - r[1]) < 1e-15


@pytest.mark.parametrize("c", [1.0, 2.0])
@given(dv=dvs)
def test_h_consistency(c, dv):
    assert cs.h_consistency(dv, P.with_(c=c)) < 1e-8


@pytest.mark.parametrize("kind", cs.EXCHANGE_KINDS)
@given(dv=dvs)
def test_level_one_screening(kind, dv):
    assert cs.screening_gap(kind, dv, P1) < 1e-10


def test_screening_needs_level_one():
    with pytest.raises(DomainError):
        cs.screening_gap("EE", 0.3, P.with_(c=2.0))


@pytest.mark.parametrize("kind", cs.RECIPROCAL_KINDS)
@given(dv=dvs)
def test_reciprocity(kind, dv):
    assert cs.reciprocity(kind, dv, P) < 1e-10


def test_ef_delta_terms_opposite():
    (s1, o1, h1, a1), (s2, o2, h2, a2) = cs.ef_delta_terms(P.with_(c=2.0))
    assert s1 == -s2 and o1 == -o2 == 1.0 and (h1, h2) == ("H+", "H-") and a1 == 0.5


class TestAn:
    def test_cartan(self):
        a = CartanA4 = cs.CartanMatrix(4)
        assert np.array_equal(CartanA4.entries, [[2, -1, 0], [-1, 2, -1], [0, -1, 2]])
        assert a[1, 2] == -1 and a[1, 3] == 0
        with pytest.raises(DomainError):
            a[0, 1]

    def test_reduces_to_sl2(self):
        A = cs.CartanMatrix(3)
        for kind in ("EE", "FF", "HH", "HE+", "HF-"):
            assert abs(cs.an_exchange(kind, 1, 1, 0.37, A, P) - cs.exchange(kind, 0.37, P)) < 1e-15

    def test_distant_nodes_commute(self):
        A = cs.CartanMatrix(5)
        for kind in ("EE", "FF", "HH", "HE+"):
            assert abs(cs.an_exchange(kind, 1, 3, 0.37 + 0.1j, A, P) - 1) < 1e-14
        assert cs.an_exchange("EF", 1, 3, 0.2, A, P) == 1

    def test_neighbours(self):
        A = cs.CartanMatrix(4)
        assert cs.an_exchange("EF", 1, 2, 0.2, A, P) == -1
        assert cs.an_exchange("FE", 2, 1, 0.2, A, P) == -1
        with pytest.raises(DomainError):
            cs.an_exchange("EF", 2, 2, 0.2, A, P)
        # neighbouring EE picks up the (-1)^{A_ij} sign and half-integer shifts
        g = cs.an_exchange("EE", 1, 2, 0.37, A, P)
        want = -cs._br(0.37 + 0.5, P.r, P, cs.DEFAULT_CFG) / cs._br(0.37 - 0.5, P.r, P, cs.DEFAULT_CFG)
        assert abs(g - want) < 1e-14


@pytest.mark.parametrize("kind", ["EE", "FF", "HH", "HE+"])
def test_large_r_limit(kind):
    errs = cs.large_r_gap(kind, 0.3 + 0.1j, P, [10, 20, 50, 100])
    assert all(b < a for a, b in zip(errs, errs[1:]))
    assert errs[-1] < 0.05
