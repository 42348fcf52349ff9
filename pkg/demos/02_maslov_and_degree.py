"""Crossing index of Lagrangian paths and degrees of graded pairs."""

import numpy as np

from quiltlab import grading, maslov
from quiltlab.symplinalg import LagrangianFrame, random_lagrangian, standard_space

line = LagrangianFrame(standard_space(1), np.array([[1.0], [0.0]]))

print("a line turned by pi, back to itself:",
      maslov.rs_index(maslov.rotation(line), line))
print("turned by pi/2, ending transverse:",
      maslov.rs_index(maslov.rotation(line, np.pi / 2), line))
print("fixed path first instead (sign flips):", maslov.rs_index(line, maslov.rotation(line)))

rng = np.random.default_rng(3)
print("\nrandom loops in higher dimension: crossing count vs winding of det^2")
for n in (1, 2, 3):
    path, expected = maslov.random_loop(n, rng)
    other = random_lagrangian(n, rng)
    print(f"  n={n}: crossings {maslov.rs_index(path, other)}, winding {round(maslov.winding_lift(path))}, built as {expected}")

horizontal = grading.grade(line, 0, 4)
vertical = grading.grade(LagrangianFrame(standard_space(1), np.array([[0.0], [1.0]])), 0, 4)
print("\ndegrees modulo 4")
print("  horizontal -> vertical:", grading.degree(horizontal, vertical))
print("  vertical -> horizontal:", grading.degree(vertical, horizontal))
print("  shifting the target by 3 adds 3:", grading.degree(horizontal, grading.shift(vertical, 3)))
a, b = grading.random_graded(standard_space(3), 8, rng), grading.random_graded(standard_space(3), 8, rng)
print(f"  random pair in dimension 3: closed form {grading.degree(a, b)}, "
      f"counted along a path {grading.degree_via_crossings(a, b)}")
