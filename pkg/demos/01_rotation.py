"""Rotating Z^n with a cyclotomic field.

Run with ``python3 demos/01_rotation.py``.  Each ``# %%`` block is one step.
"""

# %% The field and its generator matrix
import numpy as np

from noma_lab.lattice import build_lattice, shell_dpmin, witness_point

lat = build_lattice(5)
print("p =", lat.p, " n =", lat.n)
print(np.round(lat.generator, 6))

# %% It is only a rotation: G G^T = I, so Euclidean geometry is untouched
for p in (5, 7, 11, 13, 29, 61):
    print(f"p={p:2d}  n={build_lattice(p).n:2d}  |G G^T - I|_max = "
          f"{build_lattice(p).orthogonality_residual():.1e}")

# %% ...but every nonzero point now has all coordinates away from zero.
# The smallest coordinate product over a shell matches p^-(n-1)/2,
# and b = [0, ..., 0, 1] attains it with unit length.
for p in (5, 7, 11):
    lat = build_lattice(p)
    val, b = shell_dpmin(lat, 3)
    w = witness_point(lat)
    print(f"p={p:2d}  shell min={val:.6f}  closed form={lat.dpmin:.6f}  "
          f"witness norm={np.linalg.norm(w):.3f}  argmin b={b}")

# %% Compare the unrotated grid: any axis-aligned difference has product zero
z = np.array([1.0, 0.0])
print("Z^2 difference", z, "product", np.prod(np.abs(z)))
print("rotated       ", np.round(build_lattice(5).points(z), 4),
      "product", round(float(np.prod(np.abs(build_lattice(5).points(z)))), 6))
