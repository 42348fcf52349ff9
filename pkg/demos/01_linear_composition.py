"""Composing linear Lagrangian correspondences.

A transverse pair composes to a Lagrangian; a Lagrangian followed by its own
transpose does not, and the kernel of the fiber product is the obstruction.
"""

import numpy as np

from quiltlab import corrlin
from quiltlab.symplinalg import random_lagrangian, random_symplectic, standard_space, subspace_distance

rng = np.random.default_rng(1)
space = standard_space(2)

a, b = random_symplectic(2, rng), random_symplectic(2, rng)
rep = corrlin.compose(corrlin.graph(a, space), corrlin.graph(b, space))
print("graphs of two symplectic maps")
print(f"  transverse={rep.transverse} defect={rep.defect} min singular value={rep.min_singular:.3g}")
err = subspace_distance(rep.composed.lag, corrlin.graph(b @ a, space).lag)
print(f"  distance from graph of the product: {err:.2e}")

lam, mu = random_lagrangian(2, rng), random_lagrangian(2, rng)
rep = corrlin.compose(
    corrlin.lagrangian_as_correspondence(lam), corrlin.lagrangian_as_correspondence(mu, from_point=False)
)
print("\npoint -> L, then M -> point, for generic L and M")
print(f"  transverse={rep.transverse}, composite lives over {rep.composed.source.n}+{rep.composed.target.n} dimensions")

rep = corrlin.compose(
    corrlin.lagrangian_as_correspondence(lam), corrlin.lagrangian_as_correspondence(lam, from_point=False)
)
print("\npoint -> L, then L -> point")
print(f"  transverse={rep.transverse} defect={rep.defect}")
print(f"  kernel spans L: distance {subspace_distance(rep.kernel.basis, lam.frame):.2e}")
