"""Build the dynamical face R-matrix and watch its defining identities hold.

Run:  python3 demos/01_face_rmatrix.py
"""
import numpy as np

from ellface import ModelParams
from ellface import face_rmatrix as fr

p = ModelParams()  # x = 0.3, r = 6, c = 1, pi_hat = 2.5
np.set_printoptions(precision=4, suppress=True)

R = fr.build_R(1, 0.8, 2.5, p)
print("R^+(v=0.8, pi_hat=2.5):")
print(R.entries.real)
print("R_F(0) equals the permutation:", np.allclose(fr.bare_R(0.0, 2.5, p), fr.PERM, atol=1e-12))

print("\ndynamical YBE residuals")
for shift in (1.0, -2.0):
    res = fr.check_dyn_ybe(1, 0.7, 0.3, -0.2, 2.5, p, dyn_shift=shift)
    print(f"  spectator shift {shift:+.0f}: {res:.2e}")

print("\nunitarity / crossing / shift at v = 0.37")
print(f"  unitarity {fr.check_unitarity(1, 0.37, 2.5, p):.2e}")
print(f"  crossing  {fr.check_crossing(0.37, 2.5, p):.2e}")
print(f"  shift     {fr.check_shift(0.37, 2.5, p):.2e}")
