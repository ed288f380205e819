"""Chaos game for the Bernoulli convolution and evidence of no atoms."""
import numpy as np

from ifs_harmonic import measure
from ifs_harmonic.ifs import bernoulli_ifs, binary_ifs

rep = measure.chaos_game(bernoulli_ifs("1/2"), (0.5, 0.5), 1_000_000)
print(f"lam=1/2  residual {rep.self_similarity_residual:.2e}  "
      f"uniformity deviation {measure.uniformity_deviation(rep):.2%}")
scan = measure.atom_scan(rep)
print("largest bin mass per refinement:", np.array2string(scan.max_mass, precision=5))
print("atom suspected:", scan.atom_suspect)
print("after injecting a 10% point mass:", measure.atom_scan(measure.with_point_mass(rep, 0.3, 0.1)).atom_suspect)

rep = measure.chaos_game(bernoulli_ifs("2/3"), (0.5, 0.5), 1_000_000, bins=16)
print("\nlam=2/3 histogram (16 bins):")
for lo, hi, m in zip(rep.edges[:-1], rep.edges[1:], rep.masses):
    print(f"  [{lo:6.2f}, {hi:6.2f})  {'#' * int(400 * m)}")

# backward orbits grow at least linearly
B = binary_ifs("2/3")
print("\nbackward orbit sizes of x=0 under the {0,1} system, lam=2/3:",
      [measure.backward_orbit_count(B, 0, n) for n in range(1, 11)])
