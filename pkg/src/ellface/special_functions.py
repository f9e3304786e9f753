"""q-Pochhammer symbols, theta functions and the elliptic bracket [v]_t.

Every product is truncated a priori: the factor count is the smallest K with
|z| |q|^K below ``cfg.target_tol``, which is exactly the rule "stop when the
last factor deviates from 1 by less than the tolerance".  Inputs may be
scalars or numpy arrays; outputs are complex.
"""
from __future__ import annotations

import cmath
import functools
import math

import numpy as np

from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import DomainError, NonConvergent, TruncationExceeded

__all__ = [
    "xpow",
    "pochhammer",
    "pochhammer_multi",
    "theta_big",
    "theta_series",
    "jacobi_theta_char",
    "sigma",
    "theta_k",
    "bracket",
    "theta_prime",
]


def _c(z):
    return np.asarray(z, dtype=np.complex128)


def _out(a):
    return a[()] if a.ndim == 0 else a


@functools.lru_cache(maxsize=64)
def _log(x):
    return cmath.log(x)


def xpow(a, x):
    """x**a on the principal branch of log x (x may be complex)."""
    if isinstance(a, (int, float, complex)):
        return np.complex128(cmath.exp(a * _log(x)))
    return np.exp(_c(a) * _log(x))


def _n_factors(zmax, qabs, cfg, kind="product"):
    if not qabs < 1:
        raise NonConvergent(f"|q| = {qabs} >= 1")
    cap = cfg.max_product_terms if kind == "product" else cfg.max_sum_terms
    if zmax == 0 or qabs == 0:
        return 1
    k = math.ceil(math.log(cfg.target_tol / zmax) / math.log(qabs)) + 1
    k = max(k, 1)
    if k > cap:
        raise TruncationExceeded(f"{k} factors needed for tolerance {cfg.target_tol}, cap {cap}")
    return k


def pochhammer(z, q, cfg: TruncationConfig = DEFAULT_CFG):
    """(z; q) = prod_{k>=0} (1 - z q^k)."""
    q = complex(q)
    if isinstance(z, (int, float, complex)):
        z = complex(z)
        k = _n_factors(abs(z), abs(q), cfg)
        out, w = 1.0 + 0j, z
        for _ in range(k):
            out *= 1.0 - w
            w *= q
        return np.complex128(out)
    z = _c(z)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    k = _n_factors(zmax, abs(q), cfg)
    qk = q ** np.arange(k)
    return _out(np.prod(1.0 - z[..., None] * qk, axis=-1))


def pochhammer_multi(z, bases, cfg: TruncationConfig = DEFAULT_CFG):
    """(z; q_1, ..., q_m): product of (1 - z q_1^{i_1} ... q_m^{i_m}) over i >= 0."""
    bases = [complex(b) for b in bases]
    if not bases:
        raise DomainError("need at least one base")
    for b in bases:
        if not abs(b) < 1:
            raise NonConvergent(f"|base| = {abs(b)} >= 1")
    z = _c(z)
    zmax = float(np.max(np.abs(z))) if z.size else 0.0
    if zmax == 0:
        return _out(np.ones_like(z))
    # integer log-budget (rounded down: never fewer factors) so calls share the cache
    budget = math.floor(math.log(cfg.target_tol / zmax))
    powers = _lattice_powers(tuple(bases), budget, cfg.max_product_terms)
    return _out(np.prod(1.0 - z[..., None] * powers, axis=-1))


@functools.lru_cache(maxsize=256)
def _lattice_powers(bases, budget, cap):
    """q_1^{n_1} ... q_m^{n_m} for all lattice points with log-size >= budget."""
    logs = [math.log(abs(b)) if b != 0 else -np.inf for b in bases]
    pts = [()]
    for lg in logs:
        new = []
        for p in pts:
            used = sum(n * l for n, l in zip(p, logs))
            n = 0
            while n == 0 or (lg != -np.inf and used + n * lg >= budget):
                new.append(p + (n,))
                n += 1
        pts = new
        if len(pts) > cap * 64:
            raise TruncationExceeded(f"{len(pts)} lattice factors exceed cap")
    arr = np.array(pts, dtype=float)
    # a zero base contributes only its n = 0 factor
    live = [i for i, b in enumerate(bases) if b != 0]
    lb = np.log(np.array([bases[i] for i in live], dtype=np.complex128))
    return np.exp(arr[:, live] @ lb)


def theta_big(z, q, cfg: TruncationConfig = DEFAULT_CFG):
    """Theta_q(z) = (z; q)(q/z; q)(q; q)."""
    z = _c(z)
    if np.any(z == 0):
        raise DomainError("Theta_q(z) undefined at z = 0")
    return pochhammer(z, q, cfg) * pochhammer(q / z, q, cfg) * pochhammer(q, q, cfg)


def theta_series(z, q, cfg: TruncationConfig = DEFAULT_CFG):
    """Triple-product series sum_n (-1)^n q^{n(n-1)/2} z^n, used as an oracle."""
    z = _c(z)
    q = complex(q)
    if not abs(q) < 1:
        raise NonConvergent("|q| >= 1")
    if np.any(z == 0):
        raise DomainError("series undefined at z = 0")
    total = np.zeros_like(z)
    lq = cmath.log(q)
    lz = np.log(z)
    for n in range(0, cfg.max_sum_terms):
        ns = (n,) if n == 0 else (n, -n)
        worst = 0.0
        for m in ns:
            term = (-1) ** (m % 2) * np.exp(m * (m - 1) / 2 * lq + m * lz)
            total = total + term
            worst = max(worst, float(np.max(np.abs(term))))
        if n > 2 and worst < cfg.target_tol * max(1.0, float(np.max(np.abs(total)))):
            return _out(total)
    raise TruncationExceeded("theta series did not converge")


def _theta_char_scalar(a, b, z, tau, cfg):
    # terms decay like exp(-pi Im(tau) (m+a)^2); start at the peak
    im_t = tau.imag
    m0 = int(round(-z.imag / im_t - a))
    total = 0j
    quiet = 0
    for k in range(cfg.max_sum_terms):
        ms = (m0,) if k == 0 else (m0 + k, m0 - k)
        worst = 0.0
        for m in ms:
            u = m + a
            term = cmath.exp(1j * math.pi * (u * u * tau + 2 * u * (z + b)))
            total += term
            worst = max(worst, abs(term))
        if worst < cfg.target_tol * max(1.0, abs(total)):
            quiet += 1
            if quiet >= 2:
                return total
        else:
            quiet = 0
    raise TruncationExceeded("theta characteristic sum did not converge")


def jacobi_theta_char(a, b, z, tau, cfg: TruncationConfig = DEFAULT_CFG):
    """theta[a; b](z, tau) = sum_m exp(i pi [(m+a)^2 tau + 2 (m+a)(z+b)])."""
    tau = complex(tau)
    if not tau.imag > 0:
        raise NonConvergent(f"need Im(tau) > 0, got {tau}")
    z = _c(z)
    flat = [_theta_char_scalar(float(a), float(b), complex(zz), tau, cfg) for zz in z.ravel()]
    return _out(np.array(flat, dtype=np.complex128).reshape(z.shape))


def sigma(alpha, z, tau, cfg: TruncationConfig = DEFAULT_CFG):
    """sigma_alpha(z, tau) with alpha = (alpha1, alpha2); sigma_(0,0) is odd."""
    a1, a2 = alpha
    return jacobi_theta_char(0.5 + a1 / 2, 0.5 + a2 / 2, z, tau, cfg)


def theta_k(k, z, tau, cfg: TruncationConfig = DEFAULT_CFG):
    """theta^{(k)}(z, tau) = theta[-k/2; 0](z, 2 tau)."""
    return jacobi_theta_char(-k / 2, 0.0, z, 2 * complex(tau), cfg)


def bracket(v, t, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """[v]_t = x^{v^2/t - v} Theta_{x^{2t}}(x^{2v})."""
    if not t > 0:
        raise DomainError("bracket needs t > 0")
    x = params.x
    v = _c(v)
    # each factor 1 - x^{2(v + k t)} as -expm1(...), so [v]_t keeps full
    # relative accuracy next to its zeros v in tZ
    l2 = 2 * _log(x)
    qabs = abs(cmath.exp(l2 * t))
    zmax = float(np.max(np.abs(np.exp(l2 * v)))) if v.size else 0.0
    zmax = max(zmax, float(np.max(np.abs(np.exp(l2 * (t - v))))) if v.size else 0.0, qabs)
    k = np.arange(_n_factors(zmax, qabs, cfg))
    vv = v[..., None]
    prod = np.prod(-np.expm1(l2 * (vv + k * t)) * -np.expm1(l2 * ((k + 1) * t - vv)), axis=-1)
    prod = prod * np.prod(-np.expm1(l2 * (k + 1) * t))
    return _out(xpow(v * v / t - v, x) * prod)


def theta_prime(t, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """(x - 1/x) d/dv [v]_t at v = 0.

    With Theta_q(z) = (1 - z)(qz; q)(q/z; q)(q; q) the derivative at z = 1 is
    -(q; q)^3, and dz/dv = 2 ln x, while the Gaussian prefactor equals 1 there.
    """
    if not t > 0:
        raise DomainError("theta_prime needs t > 0")
    x = complex(params.x)
    q = complex(xpow(2 * t, x))
    qq = complex(pochhammer(q, q, cfg))
    return (x - 1 / x) * (-2 * cmath.log(x)) * qq ** 3
