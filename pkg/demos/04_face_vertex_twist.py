"""Untwist the face R-matrix with theta-function intertwiners.

The result is height independent, of eight-vertex form, and satisfies the
ordinary Yang-Baxter equation.  r must be generic, so r = 6.37 here.

Run:  python3 demos/04_face_vertex_twist.py
"""
import numpy as np

from ellface import ModelParams
from ellface import twist as tw

p = ModelParams(r=6.37)
np.set_printoptions(precision=5, suppress=True)

for h in (1.7, 2.5, 3.3):
    m = tw.untwist_R(0.5, 0.1, h, p).matrix
    print(f"height {h}:\n{m.real}\n")

ybe = tw.vertex_ybe_residual(lambda d: tw.untwist_R(d + 0.11, 0.11, 2.3, p).matrix, 0.7, 0.3, -0.2)
print(f"vertex YBE residual: {ybe:.1e}")
try:
    tw.untwist_R(0.5, 0.1, 2.5, ModelParams(r=6.0))
except Exception as exc:
    print("r = 6 is refused:", exc)
