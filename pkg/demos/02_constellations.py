"""Two users on one rotated lattice: superposition and lattice partition."""

# %%
import itertools

import numpy as np

from noma_lab.constellation import (
    alpha_lattice_partition,
    composite_1d,
    coset_leaders,
    lattice_partition_scheme,
    leaders_power,
    superimpose,
)
from noma_lab.lattice import build_lattice

lat = build_lattice(5)

# %% Coset leaders: 2^(n m) points per user, centred by the dither
c1 = coset_leaders(lat, 2)
c2 = coset_leaders(lat, 1)
for c in (c1, c2):
    power = (c.dithered ** 2).sum(axis=1).mean()
    print(f"m={c.m}: {c.size:3d} points, power {power:.4f} "
          f"(formula {leaders_power(lat.n, c.m):.4f})")

# %% Superposition with a power split alpha; the result always has power n
for a in (0.05, 0.2, 0.31, 0.5):
    s = superimpose(c1, c2, a)
    print(f"alpha={a:<5} eta={s.eta:.4f}  power={(s.points ** 2).sum(1).mean():.6f}  "
          f"distinct points={len(np.unique(np.round(s.points, 9), axis=0))}/{s.size}")

# %% At alpha = 1/(1 + 4^m1) the superposition *is* a finer lattice partition
a_lp = alpha_lattice_partition(c1.m)
lp = lattice_partition_scheme(lat, 2, 1)
gen = superimpose(c1, c2, a_lp)
print("alpha_LP =", a_lp, " max |LP - superposition| =", np.abs(lp.points - gen.points).max())

# %% Undo the rotation and the composite is a Cartesian product of a 1-D set
one = composite_1d(2, 1, 0.31)
flat = lat.unrotate(superimpose(c1, c2, 0.31).points)
grid = np.array(list(itertools.product(one, repeat=2)))
same = sorted(map(tuple, np.round(flat, 9))) == sorted(map(tuple, np.round(grid, 9)))
print("1-D composite:", np.round(np.sort(one), 4))
print("unrotated composite == product of 1-D sets:", same)
