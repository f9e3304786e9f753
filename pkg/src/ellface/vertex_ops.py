"""Type I / type II vertex operators, their exchange algebra and the level-one
L-operators built from them, evaluated as Fock-space matrix elements.

An operator expression is a *word*: a left-to-right list of vertex factors
(at fixed points or at integration variables) and c-number kernels that
depend on pi_hat.  pi_hat = sqrt(2r(r-1)) P and a kernel reads it from the
state standing to its right.  With the symmetric zero-mode exponentials this
is the unique choice that makes every contour integrand single-valued in
zeta = x^{2u}.

Each integration variable runs over a circle |zeta| = rho plus small loops
around poles that the circle leaves on the wrong side.  The side of every
pole is fixed by operator ordering (a screening factor sees the poles of
factors to its right inside, those of factors to its left outside) and by
the kernel prescriptions: type I keeps the kernel poles x^{2v+1+2rk}, k >= 0,
inside; type II keeps x^{2v-1+2(r-1)k}, k >= 0, inside.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field

import numpy as np

from .config import DEFAULT_CFG, ModelParams, TruncationConfig
from .errors import ChargeMismatch, PoleError, QuadratureNotConverged
from .face_rmatrix import build_R, build_R_star, idx, tau
from .free_field import (FockStateTrunc, basic_factor, fock_matrix_element, kappa_pi, structure_funcs)
from .special_functions import bracket, xpow

QUAD_TOL = 1e-6


# ------------------------------------------------------------------ kernels


def kernel_f(v, w, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """f(v, w) = [v + 1/2 - w]_r / [v - 1/2]_r."""
    den = bracket(np.asarray(v) - 0.5, params.r, params, cfg)
    if np.any(np.abs(den) < 1e-14):
        raise PoleError("f kernel at a pole")
    return bracket(np.asarray(v) + 0.5 - w, params.r, params, cfg) / den


def kernel_f_prime(v, w, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """f'(v, w) = [v - 1/2 + w]_{r-1} / [v + 1/2]_{r-1}."""
    den = bracket(np.asarray(v) + 0.5, params.r - 1, params, cfg)
    if np.any(np.abs(den) < 1e-14):
        raise PoleError("f' kernel at a pole")
    return bracket(np.asarray(v) - 0.5 + w, params.r - 1, params, cfg) / den


# ------------------------------------------------------------------ words


@dataclass(frozen=True)
class Var:
    """Integration variable ``k`` (an index into the word's variable list)."""

    k: int


@dataclass(frozen=True)
class Fac:
    name: str
    at: object  # complex or Var


@dataclass(frozen=True)
class Ker:
    """c-number kernel fn(u_values..., pi_hat, params, cfg); ``on`` lists the
    spectral arguments (complex or Var); pole data describes its u-poles."""

    fn: object
    on: tuple
    label: str = ""
    poles: tuple = ()  # (Var, base point v, step, offset, inside_if_k_ge_0)


@dataclass
class Word:
    items: list = field(default_factory=list)
    nvars: int = 0
    owners: dict = field(default_factory=dict)  # var -> item index of its own "host" factor

    def __mul__(self, other: "Word") -> "Word":
        shift = self.nvars

        def sh(a):
            return Var(a.k + shift) if isinstance(a, Var) else a

        items = list(self.items)
        for it in other.items:
            if isinstance(it, Fac):
                items.append(Fac(it.name, sh(it.at)))
            elif isinstance(it, Ker):
                poles = tuple((sh(p[0]),) + tuple(p[1:]) for p in it.poles)
                items.append(Ker(it.fn, tuple(sh(a) for a in it.on), it.label, poles))
            else:
                items.append(it)
        return Word(items, self.nvars + other.nvars)

    def scaled(self, c):
        return Word(self.items + [Ker(lambda pi, c=c, **_: c, (), f"const {c}")], self.nvars)


def phi(mu, v, params: ModelParams) -> Word:
    """Type I operator Phi_mu(v)."""
    if mu > 0:
        return Word([Fac("eta", complex(v))], 0)
    r = params.r
    return Word([
        Fac("eta", complex(v)),
        Fac("E", Var(0)),
        Ker(lambda u, pi, params, cfg, v=v: kernel_f(u - v, pi, params, cfg), (Var(0),), "f",
            ((Var(0), complex(v), r, 0.5, True),)),
    ], 1)


def psi(mu, v, params: ModelParams) -> Word:
    """Type II operator Psi_mu(v) (unstarred)."""
    if mu > 0:
        return Word([Fac("eta'", complex(v))], 0)
    r = params.r
    return Word([
        Fac("eta'", complex(v)),
        Fac("F", Var(0)),
        Ker(lambda u, pi, params, cfg, v=v: kernel_f_prime(u - v, pi, params, cfg), (Var(0),), "f'",
            ((Var(0), complex(v), r - 1, -0.5, True),)),
    ], 1)


def psi_star(mu, v, params: ModelParams) -> Word:
    """Psi*_mu(v) = Psi_{-mu}(v) / [pi_hat]_{r-1}."""
    def inv_br(pi, params, cfg):
        den = bracket(pi, params.r - 1, params, cfg)
        if abs(den) < 1e-14:
            raise PoleError("[pi_hat]_{r-1} = 0")
        return 1 / den

    return psi(-mu, v, params) * Word([Ker(inv_br, (), "1/[pi]")], 0)


PLUS_FORMS = ("shifted", "printed")


def miki_L(sign, mu, nu, v, params: ModelParams, eps=0.0, plus_form="shifted") -> Word:
    """Level-one L-operators as products of a type I and a type II operator.

    L^{-mu}_nu(v) = Phi_mu(v - 1/2 + eps) Psi*_nu(v).

    For L^+ two forms are offered.  ``"printed"`` is Phi_mu(v) Psi*_nu(v - 1/2 + eps);
    in this realisation the eta(v) eta'(v - 1/2) contraction has a pole there,
    so the word is singular at eps = 0.  ``"shifted"`` (default) is
    L^-(v - r + 1/2), the unique shift compatible with R at level r and R* at
    level r - 1 for generic r.

    ``eps`` detunes the fusion point; use :func:`fused_element` for the value at
    eps = 0, which is a limit rather than a plain evaluation.
    """
    if sign in ("+", 1):
        if plus_form == "printed":
            return phi(mu, v, params) * psi_star(nu, v - 0.5 + eps, params)
        if plus_form != "shifted":
            raise ValueError(f"plus_form must be one of {PLUS_FORMS}")
        v = v - params.r + 0.5
    return phi(mu, v - 0.5 + eps, params) * psi_star(nu, v, params)


def word_charge(word: Word, params: ModelParams):
    return sum(basic_factor(it.name, params).alpha for it in word.items if isinstance(it, Fac))


def pi_shift(word: Word, params: ModelParams):
    """Change of pi_hat produced by the word (pi_hat W = W (pi_hat + shift))."""
    return -kappa_pi(params) * word_charge(word, params)


# ------------------------------------------------------------------ poles


def _pair_poles(lname, rname, r):
    """u-differences d = v_right - v_left at which a contraction has poles:
    list of (offset, step) meaning d = offset + step * n, n >= 0."""
    key = (lname, rname)
    if key in (("eta", "E"), ("E", "eta")):
        return [(-0.5, -r)]
    if key == ("E", "E"):
        return [(-(r - 1), -r)]
    if key in (("E", "F"), ("F", "E")):
        return [(-0.5, 0.0), (0.5, 0.0)]
    if key in (("eta'", "F"), ("F", "eta'")):
        return [(0.5, -(r - 1))]
    if key == ("F", "F"):
        return [(-r, -(r - 1))]
    return []


def _zeta(u, x):
    return complex(xpow(2 * u, x))


def _pair_zeros(lname, rname):
    """Zeros of the polynomial contractions (same encoding as _pair_poles)."""
    if (lname, rname) in (("eta", "F"), ("F", "eta"), ("eta'", "E"), ("E", "eta'")):
        return [(0.0, 0.0)]
    return []


def _cancel(poles, zeros, key, tol=1e-9):
    """Drop poles that coincide with a zero (each zero cancels one pole)."""
    zs = list(zeros)
    out = []
    for p in poles:
        hit = next((n for n, z in enumerate(zs) if abs(key(p) - z) < tol * max(1.0, abs(z))), None)
        if hit is None:
            out.append(p)
        else:
            zs.pop(hit)
    return out


def _requirements(word: Word, params: ModelParams, nmax):
    """Pole side requirements per integration variable.

    fixed[k]: list of (zeta, inside) for poles at fixed positions;
    rel[k]: list of (j, zeta ratio, inside) for poles sitting at zeta_j * ratio.
    Poles sitting on a zero of a polynomial contraction are removed.
    """
    x, r = params.x, params.r
    facs = [(i, it) for i, it in enumerate(word.items) if isinstance(it, Fac)]
    fixed = {k: [] for k in range(word.nvars)}
    rel = {k: [] for k in range(word.nvars)}
    for k in range(word.nvars):
        fz, rz = [], []
        hi, host = next((i, it) for i, it in facs if it.at == Var(k))
        for i, it in facs:
            if i == hi:
                continue
            if i < hi:  # factor to the left: its poles stay outside
                fams, inside, sgn = _pair_poles(it.name, host.name, r), False, 1
                zf = _pair_zeros(it.name, host.name)
            else:
                fams, inside, sgn = _pair_poles(host.name, it.name, r), True, -1
                zf = _pair_zeros(host.name, it.name)
            for off, _ in zf:
                if isinstance(it.at, Var):
                    rz.append((it.at.k, _zeta(sgn * off, x)))
                else:
                    fz.append(_zeta(it.at + sgn * off, x))
            for off, step in fams:
                for n in (range(nmax) if step != 0 else range(1)):
                    d = sgn * (off + step * n)
                    if isinstance(it.at, Var):
                        rel[k].append((it.at.k, _zeta(d, x), inside))
                    else:
                        fixed[k].append((_zeta(it.at + d, x), inside))
        for it in word.items:
            if isinstance(it, Ker):
                for var, vbase, step, off, _ in it.poles:
                    if var == Var(k):
                        for kk in range(-nmax, nmax):
                            fixed[k].append((_zeta(vbase + off + step * kk, x), kk >= 0))
        fixed[k] = _cancel(fixed[k], fz, key=lambda p: p[0])
        for j in {j for j, _ in rz}:
            mine = [p for p in rel[k] if p[0] == j]
            rest = [p for p in rel[k] if p[0] != j]
            rel[k] = rest + _cancel(mine, [z for jj, z in rz if jj == j], key=lambda p: p[1])
    return fixed, rel


@dataclass(frozen=True)
class VarContour:
    """One integration variable's path: the main circle (center 0) or a small
    loop around a pole, traversed with orientation ``orient``."""

    radius: float
    center: complex = 0j
    orient: int = 1

    @property
    def is_circle(self):
        return self.center == 0


@dataclass
class ContourPlan:
    """A sum of tensor-product paths; ``configs`` are tuples of VarContour."""

    radii: list
    configs: list
    notes: list
    gap: float = np.inf  # smallest log-distance between a pole and a main circle

    def nodes_for(self, base, digits=16.0, budget=2_000_000):
        """Trapezoid nodes per variable: error ~ exp(-n gap), limited by memory."""
        k = max(1, len(self.radii))
        need = math.ceil(digits * math.log(10) / self.gap) if self.gap > 0 else base
        cap = max(base, int(budget ** (1.0 / k)))
        return int(min(max(base, need), cap))


def _choose_radii(fixed, rel, K, grid, home, gap_cap=1.0):
    cands = []
    for k in range(K):
        lm = np.array([math.log(abs(z)) for z, _ in fixed[k]])
        ins = np.array([i for _, i in fixed[k]])
        grid_k = np.linspace(lm.min() - 1.0, lm.max() + 1.0, 6 * grid)
        mis = ((lm[None, :] < grid_k[:, None]) != ins[None, :]).sum(axis=1)
        gap = np.abs(lm[None, :] - grid_k[:, None]).min(axis=1)
        cands.append((grid_k, mis, gap))
    for extra in range(0, 4):
        axes = []
        for grid_k, mis, gap in cands:
            sel = np.flatnonzero(mis <= mis.min() + extra)
            if len(sel) > grid:
                sel = sel[np.linspace(0, len(sel) - 1, grid).astype(int)]
            axes.append(sel)

        def mesh_of(i):
            return np.meshgrid(*[cands[k][i][axes[k]] for k in range(K)], indexing="ij")

        mesh = mesh_of(0)
        tot_mis = sum(mesh_of(1))
        obj = np.minimum.reduce(mesh_of(2))
        drift = sum(np.abs(mesh[k] - home[k]) for k in range(K))
        feasible = np.ones(obj.shape, dtype=bool)
        for k in range(K):
            for j, ratio, inside in rel[k]:
                s = mesh[j] + math.log(abs(ratio)) - mesh[k]
                g = -s if inside else s
                feasible &= g > 0
                obj = np.minimum(obj, g)
                # a fixed pole of j left on the wrong side pins j there; keep
                # the induced pole of k away from k's circle as well
                for z, ins_j in fixed[j]:
                    lz = math.log(abs(z))
                    pinned = (lz < mesh[j]) != ins_j
                    gi = np.abs(lz + math.log(abs(ratio)) - mesh[k])
                    obj = np.minimum(obj, np.where(pinned, gi, np.inf))
        if feasible.any():
            score = np.where(feasible, -1000.0 * tot_mis + np.minimum(obj, gap_cap) - 0.01 * drift, -np.inf)
            pick = np.unravel_index(np.argmax(score), score.shape)
            return [float(np.exp(mesh[k][pick])) for k in range(K)], float(obj[pick])
    raise PoleError("no admissible contour radii; move the spectral points")


def _home(word: Word, params: ModelParams):
    # log-modulus of x^{2v} for the operator that owns each variable
    out = [0.0] * word.nvars
    for it in word.items:
        if isinstance(it, Ker):
            for var, vbase, *_ in it.poles:
                out[var.k] = math.log(abs(_zeta(vbase, params.x)))
    return out


def plan_contours(word: Word, params: ModelParams, nmax=6, grid=41, seed_frac=1e-4, radii=None):
    """Contour plan realising every pole-side requirement of ``word``.

    Radii are picked jointly: poles tied to another integration variable must
    fall on the correct side of the circles (hard constraint), and among the
    admissible choices the number of misplaced fixed poles is minimised, then
    the smallest log-distance between a pole and a circle is maximised.

    Each misplaced pole is repaired by a residue loop.  Pinning a variable to
    a loop turns its relative poles into (slightly moving) poles of the other
    variables, which may need loops in turn; the set of paths is closed under
    that rule.  A loop always encloses the whole range swept by a moving pole,
    coincident poles share one loop, and coincident poles demanding opposite
    sides are a pinch (PoleError).
    """
    fixed, rel = _requirements(word, params, nmax)
    K = word.nvars
    if K == 0:
        return ContourPlan([], [()], [])
    if radii is None:
        radii, gap = _choose_radii(fixed, rel, K, grid, _home(word, params))
    else:
        gap = min(abs(math.log(abs(z) / radii[k])) for k in range(K) for z, _ in fixed[k])
    radii = list(radii)

    def poles_for(cfg, k):
        out = [(z, ins, 0.0) for z, ins in fixed[k]]
        for j, ratio, ins in rel[k]:
            if not cfg[j].is_circle:
                out.append((cfg[j].center * ratio, ins, cfg[j].radius * abs(ratio)))
        return out

    def groups(pl):
        gs = []
        for z, ins, sp in pl:
            for g in gs:
                z0, _, sp0 = g[0]
                if abs(z - z0) < 1e-9 * abs(z0) + 3 * (sp + sp0):
                    g.append((z, ins, sp))
                    break
            else:
                gs.append([(z, ins, sp)])
        return gs

    start = tuple(VarContour(radii[k]) for k in range(K))
    seen, queue, configs, notes = {start}, [start], [], []
    while queue:
        cfg = queue.pop()
        configs.append(cfg)
        for k in range(K):
            if not cfg[k].is_circle:
                continue
            gs = groups(poles_for(cfg, k))
            for g in gs:
                z0 = g[0][0]
                sp = max(m[2] for m in g)
                if sp > 0 and abs(abs(z0) - radii[k]) < 2 * sp:
                    raise PoleError(f"moving pole straddles the circle of variable {k}")
                misplaced = [(abs(z) < radii[k]) != ins for z, ins, _ in g]
                if not any(misplaced):
                    continue
                if len({ins for _, ins, _ in g}) > 1:
                    raise PoleError(f"pinched poles at {z0:.4g} for variable {k}")
                ins = g[0][1]
                others = [abs(w - z0) - s for h in gs if h is not g for w, _, s in h]
                rad = max(4 * sp, seed_frac * abs(z0))
                if others and rad > 0.3 * min(others):
                    raise PoleError(f"no room for a residue loop at {z0:.4g} (variable {k})")
                new = cfg[:k] + (VarContour(rad, z0, 1 if ins else -1),) + cfg[k + 1:]
                if new not in seen:
                    seen.add(new)
                    queue.append(new)
                    notes.append(f"var {k}: residue loop ({'+' if ins else '-'}) at {z0:.4g}")
        if len(seen) > 512:
            raise PoleError("residue bookkeeping does not close")
    for cfg in configs:
        for k in range(K):
            if cfg[k].is_circle:
                for z, _, sp in poles_for(cfg, k):
                    gap = min(gap, abs(math.log(abs(z) / radii[k])))
    return ContourPlan(radii, configs, notes, gap)


# ------------------------------------------------------------------ evaluation


def _config_nodes(cfg, n):
    """zeta grids and quadrature weights for one tensor-product path."""
    K = len(cfg)
    th = 2 * np.pi * (np.arange(n) + 0.5) / n
    shape = [n] * K
    zetas = []
    weight = np.ones(shape, dtype=np.complex128)
    for k, vc in enumerate(cfg):
        e = np.exp(1j * th).reshape([n if a == k else 1 for a in range(K)])
        z = vc.center + vc.radius * e
        zetas.append(z)
        weight = weight * (vc.orient * vc.radius * e / (z * n))
    return zetas, weight


def word_element(word: Word, bra: FockStateTrunc, ket: FockStateTrunc, params: ModelParams,
                 cfg: TruncationConfig = DEFAULT_CFG, nodes=64, plan=None, adaptive=True):
    """<bra| word |ket>: trapezoid quadrature over every path of the contour plan.

    With ``adaptive`` the node count is raised so that the nearest pole (at
    log-distance ``plan.gap`` from a circle) costs no more than ~1e-16.
    """
    kap = kappa_pi(params)
    p = ket.momentum
    pis = {}
    for i in range(len(word.items) - 1, -1, -1):
        it = word.items[i]
        if isinstance(it, Fac):
            p += basic_factor(it.name, params).alpha
        else:
            pis[i] = kap * p
    if abs(p - bra.momentum) > 1e-9:
        return 0j
    plan = plan if plan is not None else plan_contours(word, params)
    if adaptive:
        nodes = plan.nodes_for(nodes)
    lnx = np.log(complex(params.x))
    sf = structure_funcs(params, cfg)
    facs = [it for it in word.items if isinstance(it, Fac)]
    ops_base = [basic_factor(f.name, params) for f in facs]
    total = 0j
    for path in plan.configs:
        if word.nvars:
            zetas, weight = _config_nodes(path, nodes)
            us = [np.log(z) / (2 * lnx) for z in zetas]
        else:
            us, weight = [], np.array(1.0)

        def val(a):
            return us[a.k] if isinstance(a, Var) else a

        vals = fock_matrix_element([(b, val(f.at)) for b, f in zip(ops_base, facs)], bra, ket, params, cfg, sf)
        for i, it in enumerate(word.items):
            if isinstance(it, Ker):
                vals = vals * it.fn(*[val(a) for a in it.on], pis[i], params=params, cfg=cfg)
        total += complex(np.sum(vals * weight))
    return total


def word_element_checked(word, bra, ket, params, cfg=DEFAULT_CFG, nodes=64, tol=QUAD_TOL):
    """Evaluate at ``nodes`` and ``2*nodes``; raise if they disagree."""
    plan = plan_contours(word, params)
    n = plan.nodes_for(nodes)
    a = word_element(word, bra, ket, params, cfg, n, plan, adaptive=False)
    b = word_element(word, bra, ket, params, cfg, 2 * n, plan, adaptive=False)
    if abs(a - b) > tol * max(1.0, abs(b)):
        raise QuadratureNotConverged(f"{n} vs {2 * n} nodes: {a} vs {b}")
    return b, abs(a - b)


FUSION_POINTS = 16
FUSION_RADIUS = 0.02


def fused_element(build, bra, ket, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG, nodes=64,
                  points=FUSION_POINTS, radius=FUSION_RADIUS):
    """eps -> 0 value of <bra| build(eps) |ket> for words containing fused pairs.

    At exact fusion a kernel pole meets a contraction zero while two other
    poles pinch, so evaluating at eps = 0 drops a finite term.  The mean over
    the circle |eps| = radius returns the limit when it exists (and the
    constant Laurent coefficient otherwise); the error is
    O((radius / R)^points) with R the distance to the next singularity.
    """
    th = 2 * np.pi * (np.arange(points) + 0.25) / points
    vals = [word_element(build(radius * np.exp(1j * t)), bra, ket, params, cfg, nodes) for t in th]
    return complex(np.mean(vals))


# ------------------------------------------------------------------ relations

SIGNS = (1, -1)


def vo_entry(m, upper, lower):
    """Structure constant R^{upper}_{lower} as it enters the vertex-operator
    relations: every spin index reversed relative to ``FaceRMatrix.entry``.
    Since P R(pi) P = R(-pi) this is the same as reading R at -pi_hat."""
    return m[idx(-upper[0], -upper[1]), idx(-lower[0], -lower[1])]


def _sector(word, ket, occ, params):
    return FockStateTrunc(ket.momentum + word_charge(word, params), occ)


def _rel_resid(lhs, rhs, scale=0.0):
    """|lhs - rhs| relative to the larger side, or to ``scale`` when that is
    bigger (entries that vanish identically come out as round-off)."""
    if not (np.isfinite(lhs) and np.isfinite(rhs)):
        raise PoleError("non-finite matrix element")
    return abs(lhs - rhs) / max(abs(lhs), abs(rhs), scale, 1e-300)


ZERO_FLOOR = 1e-6


def _worst(pairs):
    """Worst residual over (lhs, rhs) pairs.  Sides below ZERO_FLOOR times the
    largest side in the batch are compared on that absolute scale."""
    if not pairs:
        return 0.0
    top = max(max(abs(a), abs(b)) for a, b in pairs)
    return max(_rel_resid(a, b, ZERO_FLOOR * top) for a, b in pairs)


def zf_check_pp(v1, v2, pi_hat, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG):
    """Contraction-level (+,+) components of the three exchange relations.

    Uses the bare factors only: eta eta against the corner weight a(v1-v2),
    eta' eta' against -a'(v1-v2) at level r-c, and eta eta' against tau(v1-v2).
    ``pi_hat`` is accepted for symmetry with the full check; corner weights do
    not depend on it.
    """
    sf = structure_funcs(params, cfg)
    e, ep = basic_factor("eta", params), basic_factor("eta'", params)
    ket = FockStateTrunc(0.0, ())

    def ratio(f1, w1, f2, w2):
        bra = FockStateTrunc(f1.alpha + f2.alpha, ())
        a = fock_matrix_element([(f1, w1), (f2, w2)], bra, ket, params, cfg, sf)
        b = fock_matrix_element([(f2, w2), (f1, w1)], bra, ket, params, cfg, sf)
        return a / b

    v = v1 - v2
    a = build_R(None, v, pi_hat, params, cfg).entries[0, 0]
    a_star = build_R_star(None, v, pi_hat, params, cfg).entries[0, 0]
    res = [
        abs(ratio(e, v2, e, v1) - a) / abs(a),
        abs(ratio(ep, v1, ep, v2) + a_star) / abs(a_star),
        abs(ratio(e, v1, ep, v2) - tau(v, params, cfg)) / abs(tau(v, params, cfg)),
    ]
    return float(max(res))


def phi_minus_matrix_element(v, bra, ket, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG,
                             nodes=64, tol=QUAD_TOL):
    """<bra| Phi_-(v) |ket> with the node-doubling check."""
    return word_element_checked(phi(-1, v, params), bra, ket, params, cfg, nodes, tol)[0]


def zf_check_full(relation, components, v1, v2, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG,
                  p0=0.37, occs=((), ((1, 1),)), nodes=64, tau_sign=1):
    """Worst relative residual of one exchange relation on Fock matrix elements.

    relation 49: Phi_nu(v2) Phi_mu(v1) = sum R^{mu nu}_{mu' nu'} Phi_mu'(v1) Phi_nu'(v2)
    relation 50: Psi*_mu(v1) Psi*_nu(v2) = -sum R*^{mu' nu'}_{mu nu} Psi*_nu'(v2) Psi*_mu'(v1)
    relation 51: Phi_nu(v1) Psi*_mu(v2) = tau_sign tau(v1-v2) Psi*_mu(v2) Phi_nu(v1)

    Structure constants use :func:`vo_entry` with pi_hat read from the bra;
    note the upper/lower pair order in 49 and 50 (see the decisions notes).
    ``components`` is a list of (mu, nu).
    """
    ket = FockStateTrunc(p0, ())
    kap = kappa_pi(params)
    v = v1 - v2
    pairs = []
    for mu, nu in components:
        for occ in occs:
            if relation in (49, "49"):
                left = phi(nu, v2, params) * phi(mu, v1, params)
                bra = _sector(left, ket, occ, params)
                m = build_R(None, v, kap * bra.momentum, params, cfg).entries
                lhs = word_element(left, bra, ket, params, cfg, nodes)
                rhs = 0j
                for a, b in itertools.product(SIGNS, repeat=2):
                    c = vo_entry(m, (mu, nu), (a, b))
                    if c != 0:
                        rhs += c * word_element(phi(a, v1, params) * phi(b, v2, params), bra, ket, params, cfg, nodes)
            elif relation in (50, "50"):
                left = psi_star(mu, v1, params) * psi_star(nu, v2, params)
                bra = _sector(left, ket, occ, params)
                m = build_R_star(None, v, kap * bra.momentum, params, cfg).entries
                lhs = word_element(left, bra, ket, params, cfg, nodes)
                rhs = 0j
                for a, b in itertools.product(SIGNS, repeat=2):
                    c = vo_entry(m, (a, b), (mu, nu))
                    if c != 0:
                        rhs -= c * word_element(psi_star(b, v2, params) * psi_star(a, v1, params), bra, ket,
                                                params, cfg, nodes)
            elif relation in (51, "51"):
                nu_, mu_ = nu, mu
                left = phi(nu_, v1, params) * psi_star(mu_, v2, params)
                bra = _sector(left, ket, occ, params)
                lhs = word_element(left, bra, ket, params, cfg, nodes)
                rhs = tau_sign * tau(v, params, cfg) * word_element(psi_star(mu_, v2, params) * phi(nu_, v1, params),
                                                                    bra, ket, params, cfg, nodes)
            else:
                raise ValueError(f"unknown relation {relation!r}")
            pairs.append((lhs, rhs))
    return _worst(pairs)


def _nvars_L(sign, mu, nu):
    return (1 if mu < 0 else 0) + (1 if nu > 0 else 0)


RLL_RELATIONS = {
    # name: (sign of L1, sign of L2, R sign, R shift, R* sign, R* shift)  (c = 1)
    "24": (1, -1, 1, 0.5, 1, -0.5),
    "25": (-1, 1, -1, -0.5, -1, 0.5),
    "26+": (1, 1, 1, 0.0, 1, 0.0),
    "26-": (-1, -1, -1, 0.0, -1, 0.0),
}


def cheap_rll_components(relation, max_vars=2):
    """Components (mu1, mu2, nu1, nu2) whose words need at most ``max_vars``
    contour integrals (default spot-check set)."""
    s1, s2 = RLL_RELATIONS[relation][:2]
    out = []
    for mu1, mu2, nu1, nu2 in itertools.product(SIGNS, repeat=4):
        cost = 0
        for a1, a2 in itertools.product(SIGNS, repeat=2):
            if a1 + a2 == mu1 + mu2:
                cost = max(cost, _nvars_L(s1, a1, nu1) + _nvars_L(s2, a2, nu2))
        for b1, b2 in itertools.product(SIGNS, repeat=2):
            if b1 + b2 == nu1 + nu2:
                cost = max(cost, _nvars_L(s1, mu1, b1) + _nvars_L(s2, mu2, b2))
        if cost <= max_vars:
            out.append((mu1, mu2, nu1, nu2))
    return out


def rll_spot_check(relation, v1, v2, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG,
                   components=None, p0=0.37, occs=((), ((1, 1),)), nodes=64, plus_form="shifted"):
    """Worst relative residual of R L1 L2 = L2 L1 R* for the level-one L-operators.

    R on the left reads pi_hat from the bra, R* on the right from the ket.
    Fused words are evaluated with :func:`fused_element`.
    """
    if abs(params.c - 1) > 1e-12:
        raise ValueError("the Miki construction realises level c = 1")
    s1, s2, rs, rsh, ss, ssh = RLL_RELATIONS[str(relation)]
    comps = components if components is not None else cheap_rll_components(str(relation))
    kap = kappa_pi(params)
    ket = FockStateTrunc(p0, ())
    v = v1 - v2

    def L(sg, a, b, w, e):
        return miki_L(sg, a, b, w, params, e, plus_form)

    pairs = []
    for mu1, mu2, nu1, nu2 in comps:
        for occ in occs:
            bra = None
            lhs = 0j
            for a1, a2 in itertools.product(SIGNS, repeat=2):
                if a1 + a2 != mu1 + mu2:
                    continue

                def left(e, a1=a1, a2=a2):
                    return L(s1, a1, nu1, v1, e) * L(s2, a2, nu2, v2, e)

                bra = bra or _sector(left(0.0), ket, occ, params)
                m = build_R(rs, v + rsh, kap * bra.momentum, params, cfg).entries
                lhs += vo_entry(m, (mu1, mu2), (a1, a2)) * fused_element(left, bra, ket, params, cfg, nodes)
            mstar = build_R_star(ss, v + ssh, kap * ket.momentum, params, cfg).entries
            rhs = 0j
            for b1, b2 in itertools.product(SIGNS, repeat=2):
                if b1 + b2 != nu1 + nu2:
                    continue

                def right(e, b1=b1, b2=b2):
                    return L(s2, mu2, b2, v2, e) * L(s1, mu1, b1, v1, e)

                rhs += fused_element(right, bra, ket, params, cfg, nodes) * vo_entry(mstar, (b1, b2), (nu1, nu2))
            pairs.append((lhs, rhs))
    return _worst(pairs)


PROP4_SIGN = -1


def _nvars_phi(mu):
    return 1 if mu < 0 else 0


def _nvars_psi_star(nu):
    return 1 if nu > 0 else 0


def cheap_prop4_components(relation, max_vars=2):
    """Components of one intertwining relation whose words need at most
    ``max_vars`` contour integrals."""
    rel = str(relation)
    out = []
    for c in itertools.product(SIGNS, repeat=3):
        if rel in ("56", "57"):
            mu1, mu2, nu1 = c
            cost = max(_nvars_L(0, a1, nu1) + _nvars_phi(a2)
                       for a1, a2 in itertools.product(SIGNS, repeat=2) if a1 + a2 == mu1 + mu2)
        elif rel in ("58", "59"):
            mu1, nu1, nu2 = c
            cost = max(_nvars_L(0, mu1, b1) + _nvars_psi_star(b2)
                       for b1, b2 in itertools.product(SIGNS, repeat=2) if b1 + b2 == nu1 + nu2)
        else:
            raise ValueError(f"unknown relation {relation!r}")
        if cost <= max_vars:
            out.append(c)
    return out


def prop4_spot_check(relation, v1, v2, params: ModelParams, cfg: TruncationConfig = DEFAULT_CFG,
                     components=None, p0=0.37, occs=((), ((1, 1),)), nodes=64, star_sign=None,
                     plus_form="shifted", overall_sign=PROP4_SIGN):
    """Worst relative residual of one intertwining relation.

    56: R^+(v1-v2) L1^+(v1) Phi2(v2) = s Phi2(v2) L1^+(v1)
    57: R^-(v1-v2-1/2) L1^-(v1) Phi2(v2) = s Phi2(v2) L1^-(v1)
    58: L1^+(v1) Psi*2(v2) = s Psi*2(v2) L1^+(v1) R*^+(v1-v2-1/2)
    59: L1^-(v1) Psi*2(v2) = s Psi*2(v2) L1^-(v1) R*^{star_sign}(v1-v2)

    ``s = overall_sign``.  Each relation moves a type I past a type II
    operator once, so it inherits the sign of that exchange: s = -1 here.
    ``star_sign`` defaults to -1, the sign compatible with L^+ = L^-(v-r+1/2)
    and the shift property; pass +1 for the printed variant.
    """
    if abs(params.c - 1) > 1e-12:
        raise ValueError("the Miki construction realises level c = 1")
    rel = str(relation)
    kap = kappa_pi(params)
    ket = FockStateTrunc(p0, ())
    v = v1 - v2
    pairs = []

    def L(sg, a, b, e):
        return miki_L(sg, a, b, v1, params, e, plus_form)

    if rel in ("56", "57"):
        s = 1 if rel == "56" else -1
        shift = 0.0 if rel == "56" else -0.5
        comps = components or cheap_prop4_components(rel)
        for mu1, mu2, nu1 in comps:
            for occ in occs:
                def right(e):
                    return phi(mu2, v2, params) * L(s, mu1, nu1, e)

                bra = _sector(right(0.0), ket, occ, params)
                rhs = overall_sign * fused_element(right, bra, ket, params, cfg, nodes)
                m = build_R(s, v + shift, kap * bra.momentum, params, cfg).entries
                lhs = 0j
                for a1, a2 in itertools.product(SIGNS, repeat=2):
                    if a1 + a2 != mu1 + mu2:
                        continue

                    def left(e, a1=a1, a2=a2):
                        return L(s, a1, nu1, e) * phi(a2, v2, params)

                    lhs += vo_entry(m, (mu1, mu2), (a1, a2)) * fused_element(left, bra, ket, params, cfg, nodes)
                pairs.append((lhs, rhs))
        return _worst(pairs)
    if rel in ("58", "59"):
        s = 1 if rel == "58" else -1
        shift = -0.5 if rel == "58" else 0.0
        ssign = 1 if rel == "58" else (star_sign if star_sign is not None else -1)
        comps = components or cheap_prop4_components(rel)
        mstar = build_R_star(ssign, v + shift, kap * ket.momentum, params, cfg).entries
        for mu1, nu1, nu2 in comps:
            for occ in occs:
                def left(e):
                    return L(s, mu1, nu1, e) * psi_star(nu2, v2, params)

                bra = _sector(left(0.0), ket, occ, params)
                lhs = fused_element(left, bra, ket, params, cfg, nodes)
                rhs = 0j
                for b1, b2 in itertools.product(SIGNS, repeat=2):
                    if b1 + b2 != nu1 + nu2:
                        continue

                    def right(e, b1=b1, b2=b2):
                        return psi_star(b2, v2, params) * L(s, mu1, b1, e)

                    rhs += fused_element(right, bra, ket, params, cfg, nodes) * vo_entry(mstar, (b1, b2), (nu1, nu2))
                pairs.append((lhs, overall_sign * rhs))
        return _worst(pairs)
    raise ValueError(f"unknown relation {relation!r}")
