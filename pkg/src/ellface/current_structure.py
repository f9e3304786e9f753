"""Structure functions of the elliptic Drinfeld current algebra.

Each exchange function g(dv), dv = v1 - v2, is the bracket ratio in
``A(v1) B(v2) = g(dv) B(v2) A(v1)``.  Nothing here builds operators; the
algebra is tested only through these scalar ratios and the R-matrix corner
entries a^{+-}, a'^{+-}.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable

import numpy as np

from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import DomainError, PoleError
from .face_rmatrix import build_R, build_R_star
from .free_field import screening_printed
from .special_functions import bracket, xpow

__all__ = [
    "EXCHANGE_KINDS",
    "ExchangeFunction",
    "CartanMatrix",
    "exchange",
    "exchange_function",
    "reciprocity",
    "h_consistency",
    "corner_entries",
    "corner_identities",
    "appendix_c_identities",
    "ef_delta_terms",
    "screening_gap",
    "an_exchange",
    "trig_bracket_limit",
    "large_r_gap",
]

# H-H+ is the reversed ordering of H+H-, derived rather than tabulated
EXCHANGE_KINDS = ("EE", "FF", "HE+", "HE-", "HF+", "HF-", "HH", "H+H-", "H-H+")
RECIPROCAL_KINDS = ("EE", "FF", "HH")
POLE_TOL = 1e-13

# kinds of this module -> names used for the level-one screening currents
_SCREENING_NAME = {
    "EE": "EE", "FF": "FF", "HE+": "H+E", "HE-": "H-E", "HF+": "H+F",
    "HF-": "H-F", "HH": "H+H+", "H+H-": "H+H-",
}


def _br(v, t, params, cfg):
    return complex(bracket(v, t, params, cfg))


def _ratio(num, den, what):
    # relative test: near x = 1 every bracket is tiny in absolute terms
    if den == 0 or abs(den) < POLE_TOL * abs(num):
        raise PoleError(f"{what}: denominator bracket vanishes")
    return num / den


def _generic(kind, dv, a, params, cfg, bracket_fn=None):
    """Structure function with Cartan entry ``a`` (a = 2 gives the sl_2 case)."""
    r, c = params.r, params.c
    rs = r - c
    b = bracket_fn or (lambda v, t: _br(v, t, params, cfg))
    h = a / 2
    if kind == "EE":
        return _ratio(b(dv - h, r), b(dv + h, r), kind)
    if kind == "FF":
        return _ratio(b(dv + h, rs), b(dv - h, rs), kind)
    if kind in ("HE+", "HE-"):
        s = 1 if kind[-1] == "+" else -1
        return _ratio(b(dv - h - s * c / 4, r), b(dv + h - s * c / 4, r), kind)
    if kind in ("HF+", "HF-"):
        s = 1 if kind[-1] == "+" else -1
        return _ratio(b(dv + h + s * c / 4, rs), b(dv - h + s * c / 4, rs), kind)
    if kind == "HH":
        return _ratio(b(dv - h, r) * b(dv + h, rs), b(dv + h, r) * b(dv - h, rs), kind)
    if kind in ("H+H-", "H-H+"):
        s = 1 if kind == "H+H-" else -1
        num = b(dv - h - s * c / 2, r) * b(dv + h + s * c / 2, rs)
        den = b(dv + h - s * c / 2, r) * b(dv - h + s * c / 2, rs)
        return _ratio(num, den, kind)
    raise KeyError(f"unknown exchange kind {kind!r}")


def exchange(kind, dv, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Structure function of ``kind`` at dv = v1 - v2.

    ``H+H-`` is the H^+(v1) H^-(v2) ordering; ``H-H+`` its reverse, obtained
    by flipping the sign of the c/2 shifts (so g_{-+}(dv) g_{+-}(-dv) = 1).
    """
    return _generic(kind, complex(dv), 2, params, cfg)


@dataclass(frozen=True)
class ExchangeFunction:
    kind: str
    evaluator: Callable

    def __call__(self, dv, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
        return self.evaluator(dv, params, cfg)


def exchange_function(kind) -> ExchangeFunction:
    if kind not in EXCHANGE_KINDS:
        raise KeyError(f"unknown exchange kind {kind!r}")
    return ExchangeFunction(kind, lambda dv, p, cfg=DEFAULT_CFG: exchange(kind, dv, p, cfg))


def reciprocity(kind, dv, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """|g(dv) g(-dv) - 1|; zero for the kinds built from one bracket family."""
    return abs(exchange(kind, dv, params, cfg) * exchange(kind, -dv, params, cfg) - 1)


def h_consistency(dv, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Relative gap between the H+H- function and HH after H^-(v) = H^+(v + c/2 - r).

    The substitution turns H^+(v1) H^-(v2) into H^+(v1) H^+(v2'), with
    v1 - v2' = dv + r - c/2.
    """
    got = exchange("H+H-", dv, params, cfg)
    want = exchange("HH", dv + params.r - params.c / 2, params, cfg)
    return abs(got - want) / max(abs(want), 1e-300)


def corner_entries(sign, v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """(a^{sign}(v), a'^{sign}(v)): corner entries of R^{sign} and R*^{sign}
    (``sign=None``: the bare R_F corners)."""
    a = build_R(sign, v, params.pi_hat, params, cfg).entries[0, 0]
    ap = build_R_star(sign, v, params.pi_hat, params, cfg).entries[0, 0]
    return complex(a), complex(ap)


def corner_identities(v, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Residuals of a+(v)a-(-v) = 1, a'+(v)a'-(-v) = 1 and of
    a'(d)/a(d) = a(-d)/a'(-d) with d = v."""
    ap, app = corner_entries(1, v, params, cfg)
    am, apm = corner_entries(-1, -v, params, cfg)
    out = [abs(ap * am - 1), abs(app * apm - 1)]
    # tau^{+-} is common to a and a', so the ratio is sign independent and
    # the bare corners avoid the tau pole at d = 0
    a1, a1p = corner_entries(None, v, params, cfg)
    a2, a2p = corner_entries(None, -v, params, cfg)
    lhs, rhs = a1p / a1, a2 / a2p
    out.append(abs(lhs - rhs) / max(abs(lhs), abs(rhs), 1e-300))
    return out


appendix_c_identities = corner_identities  # name used by the interface listing


def ef_delta_terms(params: ModelParams):
    """Delta terms of [E(v1), F(v2)] as (sign, delta offset, H label, argument offset).

    Term k reads sign * delta(v1 - v2 + offset) * H(v1 + arg offset); the
    overall factor is 1/(x - 1/x).  The two terms carry opposite signs.
    """
    c = params.c
    return ((1, c / 2, "H+", c / 4), (-1, -c / 2, "H-", -c / 4))


def screening_gap(kind, dv, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Relative gap to the level-one screening-current ratio (needs c = 1)."""
    if params.c != 1:
        raise DomainError("screening currents live at c = 1")
    got = exchange(kind, dv, params, cfg)
    if kind == "H-H+":
        want = 1 / screening_printed("H+H-", -dv, params, cfg)
    else:
        want = screening_printed(_SCREENING_NAME[kind], dv, params, cfg)
    return abs(got - want) / max(abs(want), 1e-300)


# ----------------------------------------------------------------- A_{n-1}


@dataclass(frozen=True)
class CartanMatrix:
    """Cartan matrix of A_{n-1}; nodes are labelled 1 .. n-1."""

    n: int

    def __post_init__(self):
        if self.n < 2:
            raise DomainError("need n >= 2")

    @property
    def entries(self) -> np.ndarray:
        m = self.n - 1
        return 2 * np.eye(m, dtype=int) - np.eye(m, k=1, dtype=int) - np.eye(m, k=-1, dtype=int)

    def __getitem__(self, ij):
        i, j = ij
        m = self.n - 1
        if not (1 <= i <= m and 1 <= j <= m):
            raise DomainError(f"node ({i}, {j}) outside 1..{m}")
        return int(self.entries[i - 1, j - 1])


def an_exchange(kind, i, j, dv, cartan: CartanMatrix, params: ModelParams,
                cfg: TruncationConfig = DEFAULT_CFG):
    """Structure function between node i and node j.

    Kinds are those of :func:`exchange` plus ``EF``/``FE`` for E_i F_j
    (F_i E_j) when i != j: -1 for neighbours, 1 otherwise.  EE and FF carry
    the sign (-1)^{A_ij}.
    """
    a = cartan[i, j]
    dv = complex(dv)
    if kind in ("EF", "FE"):
        if i == j:
            raise DomainError("E_j F_j has a delta-function commutator, not an exchange factor")
        return -1.0 + 0j if abs(i - j) == 1 else 1.0 + 0j
    g = _generic(kind, dv, a, params, cfg)
    if kind in ("EE", "FF"):
        g *= (-1) ** (a % 2)
    return g


# ----------------------------------------------------------------- r -> infinity


def trig_bracket_limit(v, params: ModelParams):
    """Large-t limit of [v]_t: x^{-v} - x^{v}."""
    return complex(xpow(-v, params.x) - xpow(v, params.x))


def large_r_gap(kind, dv, params: ModelParams, r_values, cfg: TruncationConfig = DEFAULT_CFG):
    """Relative distance from the elliptic function at each r to its r -> inf form."""
    out = []
    for r in r_values:
        p = params.with_(r=float(r))
        ell = exchange(kind, dv, p, cfg)
        trig = _generic(kind, complex(dv), 2, p, cfg, bracket_fn=lambda v, t: trig_bracket_limit(v, p))
        out.append(abs(ell - trig) / abs(trig))
    return out
