"""Verification suites: named collections of residual checks.

A check is a callable returning a residual; it passes when the residual is
finite and below its tolerance.  Random points come from a seeded numpy
generator and fixed boxes (v in [0.1, 1.2], pi_hat in [1.5, 3.5]) that stay
clear of the bracket zero lattice.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import current_structure as cs
from . import face_rmatrix as fr
from . import free_field as ff
from . import scaling_limit as sl
from . import twist as tw
from . import vertex_ops as vo
from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .special_functions import bracket, theta_big, theta_series

V_BOX = (0.1, 1.2)
PI_BOX = (1.5, 3.5)
SUITES = ("special", "rmatrix", "currents", "freefield", "vertexops", "twist", "scaling")
TWIST_FALLBACK_R = 6.37


@dataclass
class Check:
    check_id: str
    reference: str
    parameters: dict
    fn: Callable[[], float]
    tolerance: float


@dataclass
class SuiteContext:
    params: ModelParams
    trig: sl.TrigParams
    cfg: TruncationConfig = DEFAULT_CFG
    seed: int = 0
    stream: int = 0
    rng: np.random.Generator = field(init=False)

    def __post_init__(self):
        # one stream per suite, so a suite draws the same points alone or inside "all"
        self.rng = np.random.default_rng([self.seed, self.stream])

    def v(self, n=None):
        return self.rng.uniform(*V_BOX, size=n)

    def pi(self):
        return float(self.rng.uniform(*PI_BOX))


def _r(z):
    """JSON-friendly number."""
    z = complex(z)
    return z.real if z.imag == 0 else [z.real, z.imag]


# ----------------------------------------------------------------- special


def special_checks(ctx: SuiteContext):
    p, cfg = ctx.params, ctx.cfg
    out = []
    for k in range(20):
        v = complex(ctx.rng.uniform(-1.5, 1.5), ctx.rng.uniform(-0.5, 0.5))
        for t in (p.r, p.r - p.c):
            def quasi(v=v, t=t):
                w = v + t  # w - t is exact, v + t need not be
                b = complex(bracket(w - t, t, p, cfg))
                return abs(complex(bracket(w, t, p, cfg)) + b) / abs(b)

            def odd(v=v, t=t):
                b = complex(bracket(v, t, p, cfg))
                return abs(complex(bracket(-v, t, p, cfg)) + b) / abs(b)

            prm = {"v": _r(v), "t": t}
            out.append(Check(f"special.quasi_periodicity.{k}.t{t:g}", "bracket quasi-periodicity [v+t]_t = -[v]_t",
                             prm, quasi, 1e-10))
            out.append(Check(f"special.oddness.{k}.t{t:g}", "bracket oddness [-v]_t = -[v]_t", prm, odd, 1e-10))
    for k in range(10):
        z = complex(ctx.rng.uniform(0.3, 2.0)) * complex(math.cos(k), math.sin(k))
        q = complex(p.x) ** (2 * p.r)

        def prod_series(z=z, q=q):
            a, b = complex(theta_big(z, q, cfg)), complex(theta_series(z, q, cfg))
            return abs(a - b) / abs(b)

        out.append(Check(f"special.theta_product_series.{k}", "theta triple product against its series",
                         {"z": _r(z), "q": _r(q)}, prod_series, 1e-10))
    return out


# ----------------------------------------------------------------- rmatrix


def rmatrix_checks(ctx: SuiteContext):
    p, cfg = ctx.params, ctx.cfg
    out = []
    for k in range(20):
        v1, v2, v3 = (complex(z) for z in ctx.v(3))
        pi = ctx.pi()
        for s in fr.SIGNS:
            out.append(Check(f"rmatrix.dyn_ybe.{k}.{'+' if s > 0 else '-'}", "dynamical Yang-Baxter equation",
                             {"v1": _r(v1), "v2": _r(v2), "v3": _r(v3), "pi_hat": pi, "sign": s},
                             lambda v1=v1, v2=v2, v3=v3, pi=pi, s=s: fr.check_dyn_ybe(s, v1, v2, v3, pi, p, cfg), 1e-8))
    for k in range(20):
        v, pi = float(ctx.v()), ctx.pi()
        for s in fr.SIGNS:
            out.append(Check(f"rmatrix.unitarity.{k}.{'+' if s > 0 else '-'}", "unitarity R12(v) R21(-v) = 1",
                             {"v": v, "pi_hat": pi, "sign": s},
                             lambda v=v, pi=pi, s=s: fr.check_unitarity(s, v, pi, p, cfg), 1e-8))
        out.append(Check(f"rmatrix.crossing.{k}", "crossing symmetry", {"v": v, "pi_hat": pi},
                         lambda v=v, pi=pi: fr.check_crossing(v, pi, p, cfg), 1e-8))
    for k in range(10):
        v, pi = float(ctx.v()), ctx.pi()
        out.append(Check(f"rmatrix.shift.{k}", "shift property R+(v + r) = R-(v)", {"v": v, "pi_hat": pi},
                         lambda v=v, pi=pi: fr.check_shift(v, pi, p, cfg), 1e-8))
    for pi in (1.7, 2.5, 3.3):
        out.append(Check(f"rmatrix.initial_condition.pi{pi:g}", "R_F(0) is the permutation", {"pi_hat": pi},
                         lambda pi=pi: float(np.abs(fr.bare_R(0.0, pi, p, cfg) - fr.PERM).max()), 1e-12))
    return out


# ----------------------------------------------------------------- currents


def currents_checks(ctx: SuiteContext):
    p, cfg = ctx.params, ctx.cfg
    out = []
    for c in (1.0, 2.0):
        pc = p.with_(c=c)
        for k, v in enumerate(ctx.v(5)):
            v = float(v)
            for i, name in enumerate(("a+a-", "a'+a'-", "ratio_symmetry")):
                out.append(Check(f"currents.corner_identity.{name}.c{c:g}.{k}", f"corner identity {name}",
                                 {"v": v, "c": c}, lambda v=v, i=i, pc=pc: cs.corner_identities(v, pc, cfg)[i], 1e-8))
            out.append(Check(f"currents.h_consistency.c{c:g}.{k}", "H-(v) = H+(v + c/2 - r) consistency",
                             {"dv": v, "c": c}, lambda v=v, pc=pc: cs.h_consistency(v, pc, cfg), 1e-8))
    p1 = p.with_(c=1.0)
    for k in range(5):
        dv = complex(ctx.rng.uniform(-0.9, 0.9), ctx.rng.uniform(0.05, 0.3))
        for kind in cs.EXCHANGE_KINDS:
            out.append(Check(f"currents.level_one.{kind}.{k}", "level-one structure function = screening-current ratio",
                             {"dv": _r(dv), "kind": kind}, lambda dv=dv, kind=kind: cs.screening_gap(kind, dv, p1, cfg), 1e-10))
        for kind in cs.RECIPROCAL_KINDS:
            out.append(Check(f"currents.reciprocity.{kind}.{k}", "reciprocity g(dv) g(-dv) = 1",
                             {"dv": _r(dv), "kind": kind}, lambda dv=dv, kind=kind: cs.reciprocity(kind, dv, p, cfg), 1e-10))
    return out


# ----------------------------------------------------------------- freefield

NORMAL_ORDER_POINTS = (1.1, 1.3, 1.5, 1.7, 1.9)


def freefield_checks(ctx: SuiteContext):
    p, cfg = ctx.params.with_(c=1.0), ctx.cfg
    out = []
    for left, right in ff.NORMAL_ORDER_TABLE:
        for dv in NORMAL_ORDER_POINTS:
            out.append(Check(f"freefield.normal_order.{left}.{right}.dv{dv:g}", f"normal order {left} {right}",
                             {"dv": dv}, lambda pr=(left, right), dv=dv: ff.verify_normal_order(pr, dv, p, cfg), 1e-8))
    out.append(Check("freefield.delta_window", "E-F commutator delta terms (two-domain window)", {"N": 30},
                     lambda: ff.commutator_delta_check(30, p, cfg), 1e-8))
    out.append(Check("freefield.qvirasoro_window", "q-Virasoro exchange relation (window)", {"N": 30},
                     lambda: ff.qvirasoro_exchange_check(30, p, cfg), 1e-6))
    for k in range(3):
        v1 = float(ctx.rng.uniform(-0.2, 0.2))
        v2 = complex(v1 + ctx.rng.uniform(0.3, 0.6), ctx.rng.uniform(0.05, 0.2))
        for rel in ff.SCREENING_RELATIONS:
            out.append(Check(f"freefield.screening_exchange.{rel}.{k}", f"screening exchange {rel}",
                             {"v1": v1, "v2": _r(v2)}, lambda rel=rel, v1=v1, v2=v2: ff.screening_exchange_check(rel, v1, v2, p, cfg),
                             1e-8))
    return out


# ----------------------------------------------------------------- vertexops

# relations with L^+ are sampled where the shifted operators sit near the others
_A, _B, _C = 0.21 + 0.05j, -0.19 + 0.02j, 0.02 + 0.13j


def vertex_points(params: ModelParams):
    big = params.r - 0.5
    return {
        "24": (_A + big, _B), "25": (_A, _B + big), "26+": (_A + big, _B + big), "26-": (_A, _B),
        "56": (_A + params.r, _C), "57": (_A, _C), "58": (_A + params.r, _C), "59": (_A, _C),
    }


def vertexops_checks(ctx: SuiteContext, occs=((),)):
    p, cfg = ctx.params.with_(c=1.0), ctx.cfg
    out = []
    for k in range(3):
        v1 = complex(ctx.rng.uniform(0.1, 0.5), ctx.rng.uniform(0.0, 0.1))
        v2 = complex(ctx.rng.uniform(-0.3, 0.0), ctx.rng.uniform(0.0, 0.1))
        out.append(Check(f"vertexops.zf_pp.{k}", "exchange relations, (+,+) contraction level",
                         {"v1": _r(v1), "v2": _r(v2)}, lambda v1=v1, v2=v2: vo.zf_check_pp(v1, v2, p.pi_hat, p, cfg), 1e-8))
    comps = list(itertools.product(fr.SIGNS, repeat=2))
    v1, v2 = 0.31 + 0.05j, -0.12 + 0.02j
    for rel in (49, 50, 51):
        kw = {"tau_sign": -1} if rel == 51 else {}
        out.append(Check(f"vertexops.zf.{rel}", f"vertex-operator exchange relation {rel - 48}",
                         {"v1": _r(v1), "v2": _r(v2)},
                         lambda rel=rel, kw=kw: vo.zf_check_full(rel, comps, v1, v2, p, cfg, occs=occs, **kw), 1e-8))
    pts = vertex_points(p)
    for rel in ("24", "25", "26+", "26-"):
        a, b = pts[rel]
        out.append(Check(f"vertexops.rll.{rel}", f"level-one RLL relation {rel}", {"v1": _r(a), "v2": _r(b)},
                         lambda rel=rel, a=a, b=b: vo.rll_spot_check(rel, a, b, p, cfg, occs=occs), 1e-6))
    for rel in ("56", "57", "58", "59"):
        a, b = pts[rel]
        out.append(Check(f"vertexops.intertwining.{rel}", f"L-operator / vertex-operator relation {rel}",
                         {"v1": _r(a), "v2": _r(b)},
                         lambda rel=rel, a=a, b=b: vo.prop4_spot_check(rel, a, b, p, cfg, occs=occs), 1e-6))

    def doubling():
        ket = ff.FockStateTrunc(0.37, ())
        word = vo.phi(-1, 0.3 + 0.05j, p)
        bra = vo._sector(word, ket, (), p)
        val, diff = vo.word_element_checked(word, bra, ket, p, cfg, nodes=64, tol=1e-8)
        return diff / max(abs(val), 1e-300)

    out.append(Check("vertexops.node_doubling", "quadrature node doubling on a type I matrix element",
                     {"v": [0.3, 0.05], "nodes": 64}, doubling, 1e-8))
    return out


# ----------------------------------------------------------------- twist


def twist_params(params: ModelParams):
    """The configured parameters, or r moved to a generic value when r is rational."""
    try:
        tw.generic_r_guard(params.r)
        tw.generic_r_guard(params.r - params.c)
        return params
    except Exception:
        return params.with_(r=TWIST_FALLBACK_R)


def twist_checks(ctx: SuiteContext):
    p, cfg = twist_params(ctx.params), ctx.cfg
    out = []

    def rel_diff(a, b):
        return float(np.abs(a - b).max() / np.abs(a).max())

    for k in range(5):
        v1, v2 = (float(z) for z in ctx.v(2))
        h1, h2 = ctx.pi(), ctx.pi()
        prm = {"v1": v1, "v2": v2, "height1": h1, "height2": h2, "r": p.r}
        out.append(Check(f"twist.height_independence.{k}", "untwisted R is height independent", prm,
                         lambda v1=v1, v2=v2, h1=h1, h2=h2: rel_diff(tw.untwist_R(v1, v2, h1, p, cfg).matrix,
                                                                     tw.untwist_R(v1, v2, h2, p, cfg).matrix), 1e-7))
        out.append(Check(f"twist.star_height_independence.{k}", "untwisted R* is height independent", prm,
                         lambda v1=v1, v2=v2, h1=h1, h2=h2: rel_diff(tw.untwist_R_star(v1, v2, h1, p, cfg).matrix,
                                                                     tw.untwist_R_star(v1, v2, h2, p, cfg).matrix), 1e-7))

        def loop(v1=v1, v2=v2, h1=h1, h2=h2):
            vert = tw.untwist_R(v1, v2, h1, p, cfg).matrix
            return rel_diff(fr.bare_R(v1 - v2, h2, p, cfg), tw.retwist(vert, v1, v2, h2, p, cfg))

        out.append(Check(f"twist.retwist.{k}", "retwisting the vertex R gives R_F", prm, loop, 1e-7))
    for k in range(10):
        v1, v2, v3 = (float(z) for z in ctx.v(3))
        h = ctx.pi()
        prm = {"v1": v1, "v2": v2, "v3": v3, "height": h, "r": p.r}
        out.append(Check(f"twist.vertex_ybe.{k}", "untwisted R satisfies the ordinary YBE", prm,
                         lambda v1=v1, v2=v2, v3=v3, h=h: tw.vertex_ybe_residual(
                             lambda d: tw.untwist_R(d + 0.11, 0.11, h, p, cfg).matrix, v1, v2, v3), 1e-7))
        out.append(Check(f"twist.vertex_ybe_star.{k}", "untwisted R* satisfies the ordinary YBE", prm,
                         lambda v1=v1, v2=v2, v3=v3, h=h: tw.vertex_ybe_residual(
                             lambda d: tw.untwist_R_star(d + 0.11, 0.11, h, p, cfg).matrix, v1, v2, v3), 1e-7))
    return out


# ----------------------------------------------------------------- scaling


def scaling_checks(ctx: SuiteContext):
    t, cfg = ctx.trig, ctx.cfg
    out = [Check("scaling.kappa_zero", "kappa(0) = 1", {"beta": 0.0}, lambda: abs(sl.kappa(0.0, t, cfg) - 1), 1e-12)]
    for k in range(5):
        beta = float(ctx.rng.uniform(0.1, 1.5))
        out.append(Check(f"scaling.kappa_reflection.{k}", "kappa(-beta) kappa(beta) = 1", {"beta": beta},
                         lambda b=beta: abs(sl.kappa(b, t, cfg) * sl.kappa(-b, t, cfg) - 1), 1e-12))
        out.append(Check(f"scaling.kappa_cutoff.{k}", "kappa stable under cutoff doubling", {"beta": beta},
                         lambda b=beta: abs(sl.kappa(b, t, cfg) - sl.kappa(b, t, cfg, cutoff=2 * sl.kappa_cutoff(t))), 1e-9))
        pi = ctx.pi()
        for s in (1, -1):
            out.append(Check(f"scaling.trig_unitarity.{k}.{'+' if s > 0 else '-'}", "trigonometric unitarity",
                             {"beta": beta, "pi_hat": pi, "sign": s},
                             lambda b=beta, pi=pi, s=s: sl.trig_unitarity(s, b, pi, t, cfg), 1e-8))
    for k in range(10):
        b1, b2, b3 = (float(z) for z in ctx.rng.uniform(-1.0, 1.0, 3))
        pi = ctx.pi()
        out.append(Check(f"scaling.trig_dyn_ybe.{k}", "trigonometric dynamical YBE",
                         {"beta": [b1, b2, b3], "pi_hat": pi},
                         lambda b1=b1, b2=b2, b3=b3, pi=pi: sl.trig_dyn_ybe(1, b1, b2, b3, pi, t, cfg), 1e-8))

    def monotone(which):
        rep = sl.elliptic_to_trig_convergence(which, 0.5, 2.5, cfg=cfg)
        # worst ratio of successive errors; < 1 means strictly decreasing
        return max(b / a for a, b in zip(rep.errors, rep.errors[1:]))

    for which in ("b", "c", "d", "e") + sl.TRIG_KINDS:
        out.append(Check(f"scaling.convergence.{which}", f"elliptic -> trigonometric convergence of {which}",
                         {"beta": 0.5, "pi_hat": 2.5, "xs": list(sl.X_SEQUENCE), "eta": sl.CONVERGENCE_ETA},
                         lambda w=which: monotone(w), 1.0))
    return out


BUILDERS = {
    "special": special_checks,
    "rmatrix": rmatrix_checks,
    "currents": currents_checks,
    "freefield": freefield_checks,
    "vertexops": vertexops_checks,
    "twist": twist_checks,
    "scaling": scaling_checks,
}


def build_checks(name, ctx: SuiteContext):
    names = SUITES if name == "all" else (name,)
    out = []
    for n in names:
        if n not in BUILDERS:
            raise KeyError(f"unknown suite {n!r}")
        sub = SuiteContext(ctx.params, ctx.trig, ctx.cfg, ctx.seed, SUITES.index(n))
        out.extend(BUILDERS[n](sub))
    return out
