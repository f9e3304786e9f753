"""Dynamical face R-matrices and their defining identities.

Index convention: in the ordered basis (++, +-, -+, --) an entry
R^{mu' nu'}_{mu nu} sits at ``entries[row(mu', nu'), col(mu, nu)]``, i.e. upper
indices label rows.  With this placement crossing, unitarity and the shift
property hold as stated; the dynamical shift in the Yang-Baxter check is
controlled by ``dyn_shift`` (see :func:`check_dyn_ybe`).
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import PoleError
from .special_functions import bracket, pochhammer, pochhammer_multi, xpow

SIGNS = (1, -1)
POLE_TOL = 1e-12


def idx(mu, nu):
    """Basis position of e_mu (x) e_nu with mu, nu in {+1, -1}."""
    return (0 if mu > 0 else 2) + (0 if nu > 0 else 1)


@dataclass(frozen=True)
class FaceRMatrix:
    entries: np.ndarray
    v: complex
    pi_hat: float
    level: float
    sign: int | None = None

    def entry(self, upper, lower):
        """R^{upper}_{lower} with upper = (mu', nu'), lower = (mu, nu)."""
        return self.entries[idx(*upper), idx(*lower)]


def _nonzero(val, what):
    if abs(val) < POLE_TOL:
        raise PoleError(f"{what} vanishes ({abs(val):.2e})")
    return val


def _dp(z, params, level, cfg):
    x = params.x
    return pochhammer_multi(z, [xpow(2 * level, x), xpow(4, x)], cfg)


def g1(v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, level=None):
    r = params.r if level is None else level
    x = params.x
    num = _dp(xpow(2 + 2 * v, x), params, r, cfg) * _dp(xpow(2 + 2 * r + 2 * v, x), params, r, cfg)
    den = _dp(xpow(4 + 2 * v, x), params, r, cfg) * _dp(xpow(2 * r + 2 * v, x), params, r, cfg)
    return complex(num) / complex(_nonzero(complex(den), "g1 denominator"))


def tau(v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """tau(v) = x^{-v} (x^{1+2v}; x^4)(x^{3-2v}; x^4) / ((x^{3+2v}; x^4)(x^{1-2v}; x^4))."""
    x = params.x
    q = complex(xpow(4, x))
    num = pochhammer(xpow(1 + 2 * v, x), q, cfg) * pochhammer(xpow(3 - 2 * v, x), q, cfg)
    den = pochhammer(xpow(3 + 2 * v, x), q, cfg) * pochhammer(xpow(1 - 2 * v, x), q, cfg)
    return complex(xpow(-v, x)) * complex(num) / complex(_nonzero(complex(den), "tau denominator"))


def weight(which, v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, level=None):
    """One of the five Boltzmann weights a, b, c, d, e."""
    r = params.r if level is None else level
    x = params.x
    a = complex(xpow((1 - r) / r * v, x)) * g1(v, params, cfg, r) / _nonzero(g1(-v, params, cfg, r), "g1(-v)")
    if which == "a":
        return a

    def br(u):
        return complex(bracket(u, r, params, cfg))

    den = _nonzero(br(v + 1) * br(pi_hat), "[v+1][pi_hat]")
    if which == "b":
        return a * br(v) * br(pi_hat - 1) / den
    if which == "c":
        return a * br(v + pi_hat) * br(1) / den
    if which == "d":
        return a * br(pi_hat - v) * br(1) / den
    if which == "e":
        return a * br(v) * br(pi_hat + 1) / den
    raise ValueError(f"unknown weight {which!r}")


def bare_R(v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, level=None):
    """The 4x4 matrix R_F(v, pi_hat) without tau factors."""
    w = {k: weight(k, v, pi_hat, params, cfg, level) for k in "abcde"}
    m = np.zeros((4, 4), dtype=np.complex128)
    m[0, 0] = m[3, 3] = w["a"]
    m[1, 1] = w["b"]
    m[1, 2] = w["c"]
    m[2, 1] = w["d"]
    m[2, 2] = w["e"]
    return m


def tau_sign(sign, v, params, cfg=DEFAULT_CFG):
    """tau^{+-}(v) = tau(-v +- 1/2)."""
    return tau(-v + 0.5 * sign, params, cfg)


def build_R(sign, v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, level=None):
    """R_F^{sign}(v, pi_hat) = tau^{sign}(v) R_F(v, pi_hat); ``sign=None`` gives bare R_F."""
    sign = _norm_sign(sign)
    lev = params.r if level is None else level
    m = bare_R(v, pi_hat, params, cfg, lev)
    if sign is not None:
        m = m * tau_sign(sign, v, params, cfg)
    return FaceRMatrix(m, complex(v), float(pi_hat), float(lev), sign)


def build_R_star(sign, v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """R*_F^{sign}(v, pi_hat) = R_F^{sign}(v, -pi_hat) at level r - c."""
    return build_R(sign, v, -pi_hat, params, cfg, level=params.r - params.c)


def _norm_sign(sign):
    if sign in (None, 0):
        return None
    if sign in ("+", 1, "+1"):
        return 1
    if sign in ("-", -1, "-1"):
        return -1
    raise ValueError(f"bad sign {sign!r}")


# ---------------------------------------------------------------- identities

def embed3(rfun, i, j, k, shift):
    """8x8 operator acting as a 4x4 R on slots (i, j) of V^{(x)3}.

    ``rfun(delta)`` returns the 4x4 matrix with pi_hat moved by ``delta``;
    the move is ``shift * mu`` when the spectator slot k holds e_mu.
    """
    out = np.zeros((8, 8), dtype=np.complex128)
    cache = {}
    for a in itertools.product(range(2), repeat=3):
        for b in itertools.product(range(2), repeat=3):
            if a[k] != b[k]:
                continue
            mu = SIGNS[a[k]]
            if mu not in cache:
                cache[mu] = rfun(shift * mu)
            rm = cache[mu]
            out[a[0] * 4 + a[1] * 2 + a[2], b[0] * 4 + b[1] * 2 + b[2]] = rm[a[i] * 2 + a[j], b[i] * 2 + b[j]]
    return out


def dyn_ybe_sides(sign, v1, v2, v3, pi_hat, params, cfg=DEFAULT_CFG, dyn_shift=1.0, level=None):
    sign = _norm_sign(sign)

    def mk(v):
        return lambda d: build_R(sign, v, pi_hat + d, params, cfg, level).entries

    lhs = embed3(mk(v1 - v2), 0, 1, 2, dyn_shift) @ embed3(mk(v1 - v3), 0, 2, 1, 0) @ embed3(mk(v2 - v3), 1, 2, 0, dyn_shift)
    rhs = embed3(mk(v2 - v3), 1, 2, 0, 0) @ embed3(mk(v1 - v3), 0, 2, 1, dyn_shift) @ embed3(mk(v1 - v2), 0, 1, 2, 0)
    return lhs, rhs


def check_dyn_ybe(sign, v1, v2, v3, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG,
                  dyn_shift=1.0, level=None):
    """Max-abs residual of the dynamical Yang-Baxter equation

    R12(pi + s h3) R13(pi) R23(pi + s h1) = R23(pi) R13(pi + s h2) R12(pi),

    where "pi + s h_k" means pi_hat moved by ``s * mu`` on the block where slot
    k carries e_mu.  The identity holds for s = +1 with the entry placement of
    this module (equivalently s = -1 with the transposed placement); s = -2 is
    kept available as a diagnostic and fails.
    """
    lhs, rhs = dyn_ybe_sides(sign, v1, v2, v3, pi_hat, params, cfg, dyn_shift, level)
    return float(np.max(np.abs(lhs - rhs)))


PERM = np.eye(4)[[0, 2, 1, 3]]


def check_unitarity(sign, v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, level=None):
    """Max deviation of R^{s}_{12}(v) R^{-s}_{21}(-v) from the identity.

    The tau factors multiply to tau(u) tau(-u) with u = 1/2 - v, which is 1
    identically; where one factor sits on a pole/zero pair (v = 0) that
    product is taken as its analytic value 1.
    """
    sign = _norm_sign(sign)
    b1 = bare_R(v, pi_hat, params, cfg, level)
    b2 = PERM @ bare_R(-v, pi_hat, params, cfg, level) @ PERM
    try:
        pref = tau_sign(sign, v, params, cfg) * tau_sign(-sign, -v, params, cfg)
        if not np.isfinite(pref):
            raise PoleError("tau product not finite")
    except PoleError:
        pref = 1.0
    return float(np.max(np.abs(pref * b1 @ b2 - np.eye(4))))


def crossing_pairs(v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, sign=1, level=None):
    """All 16 (lhs, rhs) pairs of the crossing relation

    R^{s}(-1-v, pi)^{mu' nu'}_{mu nu}
        = mu mu' R^{-s}(v, pi - mu')^{-nu mu'}_{-nu' mu} [pi - mu'] / [pi].
    """
    sign = _norm_sign(sign)
    r = params.r if level is None else level
    left = build_R(sign, -1 - v, pi_hat, params, cfg, level)
    out = []
    for mu, nu, mup, nup in itertools.product(SIGNS, repeat=4):
        lhs = left.entry((mup, nup), (mu, nu))
        right = build_R(-sign, v, pi_hat - mup, params, cfg, level)
        ratio = complex(bracket(pi_hat - mup, r, params, cfg)) / complex(bracket(pi_hat, r, params, cfg))
        rhs = mu * mup * right.entry((-nu, mup), (-nup, mu)) * ratio
        out.append(((mu, nu, mup, nup), lhs, rhs))
    return out


def check_crossing(v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, level=None):
    worst = 0.0
    for sign in SIGNS:
        for _, lhs, rhs in crossing_pairs(v, pi_hat, params, cfg, sign, level):
            worst = max(worst, abs(lhs - rhs))
    return worst


def check_shift(v, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """R^+(v + r) against R^-(v), entrywise."""
    a = build_R(1, v + params.r, pi_hat, params, cfg).entries
    b = build_R(-1, v, pi_hat, params, cfg).entries
    return float(np.max(np.abs(a - b)))
