"""Type I / type II vertex operators on low-lying Fock states.

Matrix elements are contour integrals over screening positions.  The demo
checks the exchange relations and one level-one RLL relation (takes ~10 s).

Run:  python3 demos/03_vertex_operators.py
"""
import itertools

from ellface import ModelParams
from ellface import vertex_ops as vo
from ellface.suites import vertex_points

p = ModelParams(c=1.0)
v1, v2 = 0.31 + 0.05j, -0.12 + 0.02j
comps = list(itertools.product((1, -1), repeat=2))

print(f"(+,+) contraction level: {vo.zf_check_pp(v1, v2, p.pi_hat, p):.1e}")
print(f"type I exchange:         {vo.zf_check_full(49, comps, v1, v2, p, occs=((),)):.1e}")
print(f"type II exchange:        {vo.zf_check_full(50, comps, v1, v2, p, occs=((),)):.1e}")
for sign in (1, -1):
    r = vo.zf_check_full(51, comps, v1, v2, p, occs=((),), tau_sign=sign)
    print(f"mixed, tau sign {sign:+d}:     {r:.1e}")

a, b = vertex_points(p)["26-"]
print(f"RLL (minus, minus):      {vo.rll_spot_check('26-', a, b, p, occs=((),)):.1e}")
