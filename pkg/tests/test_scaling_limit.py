import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ellface import current_structure as cs
from ellface import scaling_limit as sl

T = sl.TrigParams()


def test_kappa_zero():
    assert abs(sl.kappa(0.0, T) - 1) < 1e-12


def test_kappa_frozen():
    assert abs(sl.kappa(0.7, T) - (0.7100536892220083 + 0.7041475402372827j)) < 1e-12


@given(st.floats(0.05, 2.0))
def test_kappa_unimodular_and_reflection(beta):
    k = sl.kappa(beta, T)
    assert abs(abs(k) - 1) < 1e-12
    assert abs(k * sl.kappa(-beta, T) - 1) < 1e-12


def test_kappa_cutoff_stability():
    a = sl.kappa(0.9, T)
    b = sl.kappa(0.9, T, cutoff=2 * sl.kappa_cutoff(T))
    assert abs(a - b) < 1e-12


def test_weights_at_zero():
    assert abs(sl.trig_weight("b", 0.0, 2.5, T)) < 1e-15
    assert abs(sl.trig_weight("c", 0.0, 2.5, T) - 1) < 1e-14
    assert abs(sl.trig_weight("d", 0.0, 2.5, T) - 1) < 1e-14


@pytest.mark.parametrize("s", [1, -1])
@given(st.floats(-1.5, 1.5), st.floats(1.5, 3.5))
def test_trig_unitarity(s, beta, pi):
    assert sl.trig_unitarity(s, beta, pi, T) < 1e-8


def test_trig_dyn_ybe():
    assert sl.trig_dyn_ybe(1, 0.4, -0.3, 0.1, 2.5, T) < 1e-8
    assert sl.trig_dyn_ybe(-1, 0.7, 0.2, -0.5, 1.9, T) < 1e-8


def test_star_uses_shifted_eta():
    assert abs(T.eta_prime - 1 / (1 / T.eta - T.c)) < 1e-15


@pytest.mark.parametrize("kind", sl.TRIG_KINDS)
def test_exchange_reciprocal_or_finite(kind):
    g = sl.trig_exchange(kind, 0.3, T)
    assert np.isfinite(g)
    if kind in ("EE", "FF", "HH"):
        assert abs(g * sl.trig_exchange(kind, -0.3, T) - 1) < 1e-13


@pytest.mark.parametrize("which", ["b", "c", "d", "e"] + list(sl.TRIG_KINDS))
def test_convergence_monotone(which):
    rep = sl.elliptic_to_trig_convergence(which, 0.5, 2.5)
    assert rep.monotone, rep.errors
    assert rep.errors[-1] < 1e-6


def test_printed_ordering_does_not_converge():
    # the trigonometric H+H- is the limit of the reversed elliptic ordering,
    # not of the elliptic H+H- itself
    trig = sl.TrigParams(eta=sl.CONVERGENCE_ETA)
    p = trig.elliptic(0.97, 2.5)
    same = cs.exchange("H+H-", -0.5j / trig.hbar, p)
    assert abs(same - sl.trig_exchange("H+H-", 0.5, trig)) > 0.1 * abs(sl.trig_exchange("H+H-", 0.5, trig))
