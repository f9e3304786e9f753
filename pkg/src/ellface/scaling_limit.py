"""Trigonometric degeneration of the face R-matrix and of the current algebra.

Variable map (frozen here, validated only by convergence):

* elliptic level r = 1/eta, r - c = 1/eta', x -> 1 at fixed (beta, hbar, eta);
* R-matrix spectral parameter v = i beta / hbar;
* current-algebra difference dv = -i dbeta / hbar.

Under x -> 1 the bracket [v]_r tends to a multiple of sin(pi v / r), so every
bracket ratio tends to the matching ratio of sines.  The two spectral maps
differ by a sign because the trigonometric exchange functions are printed
with the opposite orientation; with that sign the trigonometric H+H- function
is the limit of the elliptic H^-(v1) H^+(v2) ordering.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np
from scipy import integrate

from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .current_structure import exchange
from .errors import ConfigError, IntegralNotConverged, PoleError
from .face_rmatrix import PERM, embed3
from .special_functions import bracket

__all__ = [
    "TrigParams",
    "kappa",
    "kappa_cutoff",
    "trig_tau",
    "trig_weight",
    "trig_R",
    "trig_R_star",
    "trig_unitarity",
    "trig_dyn_ybe",
    "TRIG_KINDS",
    "trig_exchange",
    "ELLIPTIC_COUNTERPART",
    "ConvergenceReport",
    "elliptic_to_trig_convergence",
    "X_SEQUENCE",
    "CONVERGENCE_ETA",
]

X_SEQUENCE = (0.5, 0.7, 0.9, 0.97)
# at eta = 0.2 the error already sits at round-off by x = 0.9; eta = 0.04
# (r = 25) keeps every point of X_SEQUENCE above 1e-13
CONVERGENCE_ETA = 0.04
POLE_TOL = 1e-13
TRIG_KINDS = ("EE", "FF", "HE+", "HE-", "HF+", "HF-", "HH", "H+H-")
# trigonometric kind -> elliptic kind it is the limit of
ELLIPTIC_COUNTERPART = {k: k for k in TRIG_KINDS} | {"H+H-": "H-H+"}
WEIGHT_KINDS = ("b", "c", "d", "e")


@dataclass(frozen=True)
class TrigParams:
    hbar: float = 1.0
    eta: float = 0.2
    c: float = 1.0

    def __post_init__(self):
        if not self.hbar > 0 or not self.eta > 0:
            raise ConfigError("need hbar > 0 and eta > 0")
        if not 1 / self.eta - self.c > 0:
            raise ConfigError(f"need 1/eta - c > 0, got eta={self.eta}, c={self.c}")

    @property
    def eta_prime(self) -> float:
        return 1 / (1 / self.eta - self.c)

    def elliptic(self, x, pi_hat=2.5) -> ModelParams:
        """Elliptic parameters at modulus x under the frozen map."""
        return ModelParams(x=x, r=1 / self.eta, c=self.c, pi_hat=pi_hat, allow_small_r=True)


# ----------------------------------------------------------------- kappa

KAPPA_TOL = 1e-13


def _kappa_envelope(t, trig):
    """2 sh(A t) sh(B t) / (sh(C t) sh(D t)) without overflow or cancellation."""
    h, eta = trig.hbar, trig.eta
    a, b = h / 2, h / (2 * eta)
    c, d = h, (1 + eta) * h / (2 * eta)
    # sh(k t) = -e^{k t} expm1(-2 k t) / 2; exponents combine to e^{-hbar t}
    num = np.expm1(-2 * a * t) * np.expm1(-2 * b * t)
    den = np.expm1(-2 * c * t) * np.expm1(-2 * d * t)
    return 2 * np.exp((a + b - c - d) * t) * num / den


def _kappa_integrand(t, beta, trig):
    # sin(beta t)/t via sinc: the t -> 0 limit beta/(1+eta) needs no special case
    if t == 0:
        return beta / (1 + trig.eta)
    return _kappa_envelope(t, trig) * beta * np.sinc(beta * t / math.pi)


def kappa_cutoff(trig: TrigParams, tol=KAPPA_TOL):
    """T with the integrand tail beyond T bounded by tol (envelope <= 2 e^{-hbar t}/t)."""
    return math.log(2 / (tol * trig.hbar)) / trig.hbar + 1.0


def kappa(beta, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG, cutoff=None):
    """exp of i * int_0^T env(t) sin(beta t) dt/t (sh(i beta t) = i sin(beta t))."""
    beta = float(beta)
    if beta == 0:
        return 1.0 + 0j
    big_t = kappa_cutoff(trig) if cutoff is None else float(cutoff)
    # split at the oscillation scale so each piece is smooth for quad
    n_pieces = max(1, int(math.ceil(abs(beta) * big_t / math.pi)))
    edges = np.linspace(0.0, big_t, n_pieces + 1)
    total, err = 0.0, 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        val, e = integrate.quad(_kappa_integrand, lo, hi, args=(beta, trig), epsabs=KAPPA_TOL, epsrel=1e-14, limit=200)
        total += val
        err += e
    if err > 1e-10:
        raise IntegralNotConverged(f"kappa quadrature error estimate {err:.2e}")
    return cmath.exp(1j * total)


# ----------------------------------------------------------------- R-matrix


def _sin(u, eta):
    return cmath.sin(math.pi * eta * u)


def trig_tau(sign, beta, trig: TrigParams):
    """tau^+ = cot(i pi beta / (2 hbar)), tau^- = -tan(i pi beta / (2 hbar))."""
    z = 1j * math.pi * beta / (2 * trig.hbar)
    if sign in (1, "+"):
        s = cmath.sin(z)
        if abs(s) < POLE_TOL:
            raise PoleError("tau^+ pole at beta = 0")
        return cmath.cos(z) / s
    if sign in (-1, "-"):
        return -cmath.tan(z)
    raise ValueError(f"bad sign {sign!r}")


def trig_weight(which, beta, pi_hat, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG, eta=None):
    """Weight ratio b/a, c/a, d/a, e/a; ``which='a'`` gives kappa(beta)."""
    if which == "a":
        return kappa(beta, trig, cfg)
    eta = trig.eta if eta is None else eta
    v = 1j * beta / trig.hbar
    den = _sin(pi_hat, eta) * _sin(v + 1, eta)
    if abs(den) < POLE_TOL:
        raise PoleError("sin denominator vanishes")
    if which == "b":
        return _sin(v, eta) * _sin(pi_hat - 1, eta) / den
    if which == "c":
        return _sin(1, eta) * _sin(v + pi_hat, eta) / den
    if which == "d":
        return _sin(1, eta) * _sin(-v + pi_hat, eta) / den
    if which == "e":
        return _sin(v, eta) * _sin(pi_hat + 1, eta) / den
    raise ValueError(f"unknown weight {which!r}")


def trig_R(sign, beta, pi_hat, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG, eta=None):
    """tau^{sign}(beta) R_F(beta, pi_hat); ``sign=None`` drops tau."""
    a = kappa(beta, trig, cfg)
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = m[3, 3] = a
    m[1, 1] = a * trig_weight("b", beta, pi_hat, trig, cfg, eta)
    m[1, 2] = a * trig_weight("c", beta, pi_hat, trig, cfg, eta)
    m[2, 1] = a * trig_weight("d", beta, pi_hat, trig, cfg, eta)
    m[2, 2] = a * trig_weight("e", beta, pi_hat, trig, cfg, eta)
    if sign is not None:
        m = m * trig_tau(sign, beta, trig)
    return m


def trig_R_star(sign, beta, pi_hat, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG):
    """R^{sign}(beta, -pi_hat) with eta -> eta'."""
    return trig_R(sign, beta, -pi_hat, trig, cfg, eta=trig.eta_prime)


def trig_unitarity(sign, beta, pi_hat, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG):
    """max |R^{s}_{12}(beta) R^{-s}_{21}(-beta) - 1|.

    tau^{s}(beta) tau^{-s}(-beta) = cot z tan z = 1; at beta = 0 (pole times
    zero) it is taken as that analytic value.
    """
    try:
        pref = trig_tau(sign, beta, trig) * trig_tau(-sign, -beta, trig)
    except PoleError:
        pref = 1.0
    m = pref * trig_R(None, beta, pi_hat, trig, cfg) @ PERM @ trig_R(None, -beta, pi_hat, trig, cfg) @ PERM
    return float(np.abs(m - np.eye(4)).max())


def trig_dyn_ybe(sign, b1, b2, b3, pi_hat, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG, dyn_shift=1.0):
    """Dynamical YBE residual with the same spectator shift as the elliptic check."""

    def mk(beta):
        return lambda d: trig_R(sign, beta, pi_hat + d, trig, cfg)

    lhs = embed3(mk(b1 - b2), 0, 1, 2, dyn_shift) @ embed3(mk(b1 - b3), 0, 2, 1, 0) @ embed3(mk(b2 - b3), 1, 2, 0, dyn_shift)
    rhs = embed3(mk(b2 - b3), 1, 2, 0, 0) @ embed3(mk(b1 - b3), 0, 2, 1, dyn_shift) @ embed3(mk(b1 - b2), 0, 1, 2, 0)
    return float(np.abs(lhs - rhs).max() / np.abs(lhs).max())


# ----------------------------------------------------------------- currents


def trig_exchange(kind, dbeta, trig: TrigParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Printed sine-ratio structure function, dbeta = beta1 - beta2.

    Arguments enter as sin(i pi eta (dbeta + shift) / hbar) with shifts in
    units of i hbar; E-type brackets use eta, F-type eta'.  The E-F commutator
    carries the constant hbar in place of 1/(x - 1/x).
    """
    h, c = trig.hbar, trig.c
    e, ep = trig.eta, trig.eta_prime

    def s(u, et):
        # u in units of i hbar: beta-shift = i hbar u
        return cmath.sin(1j * math.pi * et / h * (dbeta + 1j * h * u))

    def ratio(num, den):
        if abs(den) < POLE_TOL:
            raise PoleError(f"{kind}: sin denominator vanishes")
        return num / den

    if kind == "EE":
        return ratio(s(-1, e), s(1, e))
    if kind == "FF":
        return ratio(s(1, ep), s(-1, ep))
    if kind in ("HE+", "HE-"):
        sg = 1 if kind[-1] == "+" else -1
        return ratio(s(-1 - sg * c / 4, e), s(1 - sg * c / 4, e))
    if kind in ("HF+", "HF-"):
        sg = 1 if kind[-1] == "+" else -1
        return ratio(s(1 + sg * c / 4, ep), s(-1 + sg * c / 4, ep))
    if kind == "HH":
        return ratio(s(1, ep) * s(-1, e), s(-1, ep) * s(1, e))
    if kind == "H+H-":
        return ratio(s(1 - c / 2, ep) * s(-1 + c / 2, e), s(-1 - c / 2, ep) * s(1 + c / 2, e))
    raise KeyError(f"unknown trigonometric kind {kind!r}")


# ----------------------------------------------------------------- convergence


def _elliptic_ratio(which, v, pi_hat, p, cfg):
    """Elliptic weight / a from brackets alone (a itself underflows as x -> 1)."""
    r = p.r

    def br(u):
        return complex(bracket(u, r, p, cfg))

    den = br(v + 1) * br(pi_hat)
    num = {"b": br(v) * br(pi_hat - 1), "c": br(v + pi_hat) * br(1),
           "d": br(pi_hat - v) * br(1), "e": br(v) * br(pi_hat + 1)}[which]
    return num / den


@dataclass
class ConvergenceReport:
    which: str
    xs: tuple
    errors: list
    orders: list = field(default_factory=list)

    @property
    def monotone(self) -> bool:
        return all(b < a for a, b in zip(self.errors, self.errors[1:]))


def elliptic_to_trig_convergence(which, beta, pi_hat, xs=X_SEQUENCE, trig: TrigParams | None = None,
                                 cfg: TruncationConfig = DEFAULT_CFG):
    """|elliptic - trig| / |trig| along x -> 1 for a weight ratio or an exchange kind.

    ``which`` is one of b, c, d, e (beta is the spectral rapidity) or a
    trigonometric exchange kind (beta is the difference beta1 - beta2).
    ``orders`` holds log(err_k / err_{k+1}) / log(|ln x_k| / |ln x_{k+1}|).
    """
    trig = trig or TrigParams(eta=CONVERGENCE_ETA)
    errors = []
    for x in xs:
        p = trig.elliptic(x, pi_hat)
        if which in WEIGHT_KINDS:
            v = 1j * beta / trig.hbar
            ell = _elliptic_ratio(which, v, pi_hat, p, cfg)
            tri = trig_weight(which, beta, pi_hat, trig, cfg)
        else:
            dv = -1j * beta / trig.hbar
            ell = exchange(ELLIPTIC_COUNTERPART[which], dv, p, cfg)
            tri = trig_exchange(which, beta, trig, cfg)
        scale = max(abs(tri), abs(ell))
        errors.append(0.0 if scale == 0 else abs(ell - tri) / scale)
    orders = []
    for (x0, e0), (x1, e1) in zip(zip(xs, errors), zip(xs[1:], errors[1:])):
        if e0 > 0 and e1 > 0:
            orders.append(math.log(e0 / e1) / math.log(math.log(x0) / math.log(x1)))
        else:
            orders.append(float("nan"))
    return ConvergenceReport(which, tuple(xs), errors, orders)
