"""A cyclic sequence of linear subtori: generators, degrees and composition.

The sequence is read from demos/data/slope_three.json: a line of slope three in
the two-torus followed by a horizontal circle, both perturbed off each other.
"""

from pathlib import Path

import numpy as np

from quiltlab import complexes, jsonio, quilt

here = Path(__file__).parent
seq = jsonio.load_sequence(jsonio.read(here / "data" / "slope_three.json"))

gens = quilt.intersection_points(seq)
print(f"{len(gens)} generators")
for g in gens:
    print("  ", [np.round(p, 4).tolist() for p in g.points], "degree", g.degree)

print("\ndegree routes agree:", quilt.all_degrees(seq, np.random.default_rng(0)))

rng = np.random.default_rng(8)
# some compositions are not embedded (the fiber product is disconnected); draw again
while True:
    longer = quilt.random_sequence(rng, r_max=3, n_max=2, modulus=4, length=3)
    try:
        res = quilt.compose_at(longer, 1)
        break
    except quilt.NotEmbedded as exc:
        print("skipping a sequence:", exc)
before = quilt.intersection_points(longer)
after = quilt.intersection_points(res.sequence)
ok, note = quilt.check_bijection(before, after, res.mapping)
print(f"\nrandom three-step sequence: {len(before)} generators, {len(after)} after composing at 1 ({note or 'bijection'})")
print("  degrees before", sorted(g.degree for g in before))
print("  degrees after ", sorted(g.degree for g in after))

h = complexes.homology(quilt.build_complex(longer))
print("\nwith the zero differential the homology is free on the generators:", complexes.total_rank(h))
