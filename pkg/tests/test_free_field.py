import mpmath as mp
import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellface import ModelParams
from ellface import free_field as ff
from ellface.errors import ChargeMismatch

P = ModelParams(c=1.0)
X, R = P.x, P.r


def t_closed(v):
    # (1 - x^{2v}) (x^{2+2v}; x^{2r}) / (x^{2r-2+2v}; x^{2r}), evaluated with mpmath
    q = mp.mpf(X) ** (2 * R)
    z = mp.mpf(X) ** (2 * v)
    return complex((1 - z) * mp.qp(X**2 * z, q) / mp.qp(X ** (2 * R - 2) * z, q))


def test_xi_xi_closed_form():
    v1, dv = 0.13, 1.3
    v2 = v1 + dv
    want = X ** (4 * (R - 1) * v1 / R) * t_closed(v2 - v1)
    got = complex(ff.contraction("E", "E", dv, P, v1=v1))
    assert abs(got - want) < 1e-12 * abs(want)


@pytest.mark.parametrize("v1,dv", [(0.13, 1.3), (0.2, 0.9), (-0.4, 1.7)])
def test_terminating_series(v1, dv):
    got = complex(ff.contraction("eta", "xi'", dv, P, v1=v1))
    assert abs(got - (X ** (2 * v1) - X ** (2 * (v1 + dv)))) < 1e-14


def test_trivial_factor_contraction():
    # a factor without oscillators contracts to its zero-mode part only
    triv = ff.VertexFactor("triv", alpha=0.4, gamma=0.1, k_pos=0.0, k_neg=0.0, reduced=lambda m: 0 * m)
    e = ff.basic_factor("E", P)
    v1, dv = 0.2, 0.7
    got = complex(ff.contraction(triv, e, dv, P, v1=v1))
    assert abs(got - X ** ((2 * 0.4 * v1 + 0.1) * e.alpha)) < 1e-15


@pytest.mark.parametrize("pair", ff.NORMAL_ORDER_TABLE, ids=lambda p: "-".join(p))
@pytest.mark.parametrize("dv", [1.1, 1.3, 1.5, 1.7, 1.9])
def test_normal_order_oracle(pair, dv):
    assert ff.verify_normal_order(pair, dv, P) < 1e-8


def test_normal_order_table_size():
    assert len(ff.NORMAL_ORDER_TABLE) == 18


def test_delta_window():
    res, rep = ff.commutator_delta_check(30, P, report=True)
    assert res < 1e-8
    # the two delta terms carry opposite weights
    assert abs(rep["weight_H+"] + rep["weight_H-"]) < 1e-12


def test_qvirasoro_window():
    assert ff.qvirasoro_exchange_check(30, P) < 1e-6


@pytest.mark.parametrize("rel", ff.SCREENING_RELATIONS)
@given(v1=st.floats(-0.2, 0.2), d=st.floats(0.3, 0.6), y=st.floats(0.05, 0.2))
def test_screening_exchange(rel, v1, d, y):
    assert ff.screening_exchange_check(rel, v1, complex(v1 + d, y), P) < 1e-8


def test_eq9_and_eq14_points():
    assert ff.screening_exchange_check("EE", 0.0, 0.6, P) < 1e-8
    assert ff.screening_exchange_check("H+H+", 0.0, 0.8, P) < 1e-8
    assert ff.screening_exchange_check("H+E", 0.0, 0.5, P) < 1e-8


def test_h_shift():
    mode_gap, zero_gap, _ = ff.h_shift_identity(0.3, P)
    assert mode_gap < 1e-12 and zero_gap < 1e-12


def test_charges_corrected_vs_printed():
    a = ff.charges(P)
    b = ff.charges(P, printed_eta=True)
    assert a != b


class TestFock:
    def test_vacuum_single_e(self):
        e = ff.basic_factor("E", P)
        ket = ff.FockStateTrunc(0.37, ())
        bra = ff.FockStateTrunc(0.37 + e.alpha, ())
        v = 0.21
        got = complex(ff.fock_matrix_element([(e, v)], bra, ket, P))
        want = complex(e.prefactor(v, P) * X ** (e.p_coeff(v, P) * 0.37))
        assert abs(got - want) < 1e-14 * abs(want)

    def test_charge_rule(self):
        e = ff.basic_factor("E", P)
        with pytest.raises(ChargeMismatch):
            ff.fock_matrix_element([(e, 0.2)], ff.FockStateTrunc(0.0), ff.FockStateTrunc(0.0), P)

    def test_level_cap(self):
        with pytest.raises(ValueError):
            ff.FockStateTrunc(0.0, ((1, 4),))
        assert len(ff.partitions_states(0.0, 3)) == 1 + 1 + 2 + 3

    def test_oscillator_orthonormality(self):
        # with no operators the element is <n|m> = delta
        ket = ff.FockStateTrunc(0.0, ((1, 1),))
        bra = ff.FockStateTrunc(0.0, ((1, 1),))
        assert abs(ff.fock_matrix_element([], bra, ket, P) - 1) < 1e-15
        assert abs(ff.fock_matrix_element([], ff.FockStateTrunc(0.0, ((2, 1),)), ket, P)) < 1e-15


def test_two_domain_difference_is_delta():
    # 1/(1 - z) expanded at small and at large |z| differ by delta(z)
    N = 12
    inner = ff.geometric(N, 1.0)
    outer = -np.r_[0.0, np.ones(N)]
    win = ff.two_domain_difference(N, inner, outer)
    assert win.rel_mismatch(ff.FormalLaurentWindow.delta(N)) < 1e-15
