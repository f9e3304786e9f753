"""Trigonometric degeneration: kappa(beta) and convergence as x -> 1.

Run:  python3 demos/05_scaling_limit.py
"""
from ellface import scaling_limit as sl

t = sl.TrigParams()
for beta in (0.0, 0.3, 0.7, 1.5):
    k = sl.kappa(beta, t)
    print(f"kappa({beta}) = {k.real:+.12f}{k.imag:+.12f}j")

print(f"\ntrig unitarity at beta = 0.4: {sl.trig_unitarity(1, 0.4, 2.5, t):.1e}")
print(f"trig dynamical YBE:           {sl.trig_dyn_ybe(1, 0.4, -0.3, 0.1, 2.5, t):.1e}")

print(f"\nrelative error along x = {sl.X_SEQUENCE} (eta = {sl.CONVERGENCE_ETA})")
for which in ("b", "c") + sl.TRIG_KINDS:
    rep = sl.elliptic_to_trig_convergence(which, 0.5, 2.5)
    errs = "  ".join(f"{e:.1e}" for e in rep.errors)
    print(f"  {which:5s} {errs}   monotone={rep.monotone}")
