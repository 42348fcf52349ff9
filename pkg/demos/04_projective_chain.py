"""Toric correspondences between projective spaces.

The composition of two such correspondences is computed in action-angle
coordinates, and generators of a quilted sequence come from a cosine Morse
function on its clean intersection.
"""

from pathlib import Path

import numpy as np

from quiltlab import jsonio, toric

n = 3
print("scales of the reduced spaces, in units of pi:")
for k in range(1, n + 1):
    print(f"  k={k}:", {key: str(v) for key, v in toric.reduced_space_scale(k, n).items()})
print("  tau =", toric.tau(n))

rng = np.random.default_rng(7)
c = toric.compose_toric(toric.clifford(1, n), toric.sigma(2, n).relation(), rng, 16, known=[toric.clifford(n)])
print(f"\nClifford torus followed by the reduction: embedded={c.embedded}, identified as {c.identified_as}")

rep = toric.calc_chain(2)
print("\nreduction chain for n=2:", "ok" if rep["ok"] else "FAILED")

here = Path(__file__).parent
seq = jsonio.load_sequence(jsonio.read(here / "data" / "sphere_sequence.json"))
gens = toric.perturbed_generators(seq, n_mod=seq.modulus)
print(f"\nsphere_sequence.json: {len(gens)} generators")
print("  Morse indices", toric.index_distribution(gens))
print("  degrees mod 2", toric.degree_multiset(gens))
