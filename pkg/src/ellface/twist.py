"""Face-vertex correspondence: theta intertwiners and the untwisted R-matrices.

The vertex R-matrix is not taken from the literature.  It is whatever the
intertwiners turn R_F into, and it is accepted only if it comes out
independent of the height, satisfies the ordinary Yang-Baxter equation and
twists back to R_F at every other height.

Matrix layout: vertex indices (i, j) in {0, 1}^2 map to row 2*i + j; face
indices follow :func:`ellface.face_rmatrix.idx`.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import DomainError, NonConvergent, SingularIntertwiner
from .face_rmatrix import SIGNS, bare_R, build_R, idx
from .special_functions import _theta_char_scalar

__all__ = [
    "KINDS",
    "generic_r_guard",
    "modular_tau",
    "intertwiner",
    "Intertwiner",
    "intertwiner_matrix",
    "dual_pairings",
    "decompose_pi",
    "UntwistResult",
    "untwist_R",
    "untwist_R_star",
    "retwist",
    "retwist_R_star",
    "vertex_ybe_residual",
]

KINDS = ("unprimed", "primed")
GENERIC_TOL = 1e-6
GENERIC_MAX_DEN = 12
DET_TOL = 1e-12


def generic_r_guard(r, tol=GENERIC_TOL, max_den=GENERIC_MAX_DEN):
    """Raise DomainError if r sits within ``tol`` of p/q with q <= max_den."""
    f = Fraction(r).limit_denominator(max_den)
    if abs(float(f) - r) < tol:
        raise DomainError(f"r = {r} is (close to) the rational {f}; the twist needs generic r")


def _level(kind, params):
    if kind == "unprimed":
        return params.r
    if kind == "primed":
        return params.r - params.c
    raise ValueError(f"kind must be one of {KINDS}, got {kind!r}")


def modular_tau(level, params: ModelParams):
    """-1/(level * w) with x = exp(i pi w)."""
    t = -1 / (level * params.w)
    if not t.imag > 0:
        raise NonConvergent(f"Im(-1/(r w)) = {t.imag} <= 0")
    return t


def _theta_m(m, z, tau, cfg):
    # theta[-m/2; 0](z, 2 tau), scalar fast path of special_functions.theta_k
    return _theta_char_scalar(-m / 2, 0.0, complex(z), 2 * tau, cfg)


def intertwiner(kind, m, height, mu, v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """phi^{(m)}_{height, mu}(v) = theta^{(m)}((v + mu height)/t, -1/(t w)), t the level."""
    if m not in (0, 1) or mu not in SIGNS:
        raise DomainError(f"need m in (0, 1) and mu in (+1, -1), got {m}, {mu}")
    t = _level(kind, params)
    return _theta_m(m, (v + mu * height) / t, modular_tau(t, params), cfg)


@dataclass(frozen=True)
class Intertwiner:
    """The 2x2 matrix phi^{(m)}_{height, mu}(v); rows m, columns mu = (+, -)."""

    kind: str
    matrix: np.ndarray
    v: complex
    height: float

    @property
    def dual(self) -> np.ndarray:
        """bar-phi with rows mu, columns m: the matrix inverse."""
        return np.linalg.inv(self.matrix)

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.matrix))


def intertwiner_matrix(kind, height, v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG) -> Intertwiner:
    mat = np.array([[intertwiner(kind, m, height, mu, v, params, cfg) for mu in SIGNS] for m in (0, 1)])
    out = Intertwiner(kind, mat, complex(v), float(height))
    if abs(out.det) < DET_TOL * max(1.0, float(np.abs(mat).max()) ** 2):
        raise SingularIntertwiner(f"det = {out.det:.3e} at v={v}, height={height}")
    return out


def dual_pairings(kind, height, v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Max deviation from the identity of sum_m bar-phi phi and sum_mu phi bar-phi."""
    it = intertwiner_matrix(kind, height, v, params, cfg)
    eye = np.eye(2)
    return (float(np.abs(it.dual @ it.matrix - eye).max()),
            float(np.abs(it.matrix @ it.dual - eye).max()))


def decompose_pi(pi_hat, k_hat, params: ModelParams):
    """l-hat with pi_hat = (r - c) k_hat - r l_hat."""
    return ((params.r - params.c) * k_hat - pi_hat) / params.r


@dataclass(frozen=True)
class UntwistResult:
    matrix: np.ndarray
    cond_in: float
    cond_out: float


def _pair_matrix(fn):
    """4x4 array P[2a + b, idx(nu, mu)] = fn(a, b, nu, mu)."""
    out = np.zeros((4, 4), dtype=np.complex128)
    for a, b in itertools.product((0, 1), repeat=2):
        for nu, mu in itertools.product(SIGNS, repeat=2):
            out[2 * a + b, idx(nu, mu)] = fn(a, b, nu, mu)
    return out


def _solve(p_out, face, p_in):
    cin, cout = np.linalg.cond(p_in), np.linalg.cond(p_out)
    if not (math.isfinite(cin) and cin < 1 / DET_TOL):
        raise SingularIntertwiner(f"incoming intertwiner product is singular (cond {cin:.2e})")
    return UntwistResult(p_out @ face @ np.linalg.inv(p_in), float(cin), float(cout))


def _unprimed_products(v1, v2, k, params, cfg):
    phi = lambda m, h, mu, v: intertwiner("unprimed", m, h, mu, v, params, cfg)  # noqa: E731
    p_in = _pair_matrix(lambda m, n, nu, mu: phi(m, k, nu, v1) * phi(n, k - nu, mu, v2))
    p_out = _pair_matrix(lambda i, j, nu, mu: phi(i, k - mu, nu, v1) * phi(j, k, mu, v2))
    return p_in, p_out


def _primed_products(v1, v2, l, params, cfg):
    phi = lambda m, h, mu, v: intertwiner("primed", m, h, mu, v, params, cfg)  # noqa: E731
    p_in = _pair_matrix(lambda m, n, nu, mu: phi(m, l + mu, nu, v1) * phi(n, l, mu, v2))
    p_out = _pair_matrix(lambda i, j, nu, mu: phi(i, l, nu, v1) * phi(j, l + nu, mu, v2))
    return p_in, p_out


def _face(sign, v, height, params, cfg, level):
    if sign is None:
        return bare_R(v, height, params, cfg, level)
    return build_R(sign, v, height, params, cfg, level).entries


def untwist_R(v1, v2, k_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, sign=None) -> UntwistResult:
    """Vertex R(v1 - v2) from R_F(v1 - v2, k_hat) at level r.

    Solves R P_in = P_out R_F^T, where P_in carries phi_{k,nu}(v1) phi_{k-nu,mu}(v2)
    and P_out carries phi_{k-mu',nu'}(v1) phi_{k,mu'}(v2).
    """
    generic_r_guard(params.r)
    p_in, p_out = _unprimed_products(v1, v2, k_hat, params, cfg)
    face = _face(sign, v1 - v2, k_hat, params, cfg, params.r)
    return _solve(p_out, face.T, p_in)


def untwist_R_star(v1, v2, l_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, sign=None) -> UntwistResult:
    """Vertex R*(v1 - v2) from the level r - c face matrix at height l_hat.

    The face matrix is R*_F(v, -l_hat), i.e. R_F(v, l_hat) at level r - c.
    """
    generic_r_guard(params.r)
    generic_r_guard(params.r - params.c)
    lev = params.r - params.c
    p_in, p_out = _primed_products(v1, v2, l_hat, params, cfg)
    face = _face(sign, v1 - v2, l_hat, params, cfg, lev)
    return _solve(p_out, face.T, p_in)


def retwist(vertex, v1, v2, k_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """R_F(v1 - v2, k_hat) rebuilt from a vertex matrix (convention of face_rmatrix)."""
    p_in, p_out = _unprimed_products(v1, v2, k_hat, params, cfg)
    return (np.linalg.solve(p_out, vertex @ p_in)).T


def retwist_R_star(vertex, v1, v2, l_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    p_in, p_out = _primed_products(v1, v2, l_hat, params, cfg)
    return (np.linalg.solve(p_out, vertex @ p_in)).T


def _embed(mat, i, j):
    """4x4 acting on tensor slots i < j of (C^2)^{x3}."""
    out = np.zeros((8, 8), dtype=np.complex128)
    for a in itertools.product((0, 1), repeat=3):
        for b in itertools.product((0, 1), repeat=3):
            k = 3 - i - j
            if a[k] != b[k]:
                continue
            out[4 * a[0] + 2 * a[1] + a[2], 4 * b[0] + 2 * b[1] + b[2]] = mat[2 * a[i] + a[j], 2 * b[i] + b[j]]
    return out


def vertex_ybe_residual(rfun, v1, v2, v3):
    """max |R12 R13 R23 - R23 R13 R12| / max |R12 R13 R23| for R = rfun(dv)."""
    r12, r13, r23 = rfun(v1 - v2), rfun(v1 - v3), rfun(v2 - v3)
    lhs = _embed(r12, 0, 1) @ _embed(r13, 0, 2) @ _embed(r23, 1, 2)
    rhs = _embed(r23, 1, 2) @ _embed(r13, 0, 2) @ _embed(r12, 0, 1)
    return float(np.abs(lhs - rhs).max() / np.abs(lhs).max())
