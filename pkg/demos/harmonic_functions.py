"""Path-space harmonic functions h0 and h1.

The exhaustive series is exact term by term but only reaches word length
about 22.  At that depth the captured mass is still far from one; the
Monte Carlo estimator reaches much longer words and shows the slow climb.
"""
import warnings

import numpy as np

from ifs_harmonic import fourier, pathspace

for lam in ("1/2", "2/3", "3/4"):
    top = fourier.cycle_fixed_point(lam)
    print(f"\nlam={lam}, X_L = [0, {top:.4g}]")
    for x in np.linspace(0, top, 5):
        h0, h1 = pathspace.harmonic_pair(pathspace.path_query(lam, x, 18))
        extra = "" if h1 is None else f"  h1={h1.value:.6f}"
        print(f"  x={x:.4f}  h0={h0.value:.6f}{extra}")

print("\nmass captured at lam=2/3, x=0.3 as the depth grows")
for d in (10, 16, 22):
    print(f"  exhaustive depth {d:4d}: {pathspace.h0(pathspace.path_query('2/3', 0.3, d)).value:.6f}")
for d in (100, 1000, 3000):
    est = pathspace.h0_monte_carlo(pathspace.path_query("2/3", 0.3, d), samples=4000)
    print(f"  Monte Carlo depth {d:4d}: {est.mean:.4f} +- {est.stderr:.4f}")

# the same series from the Fourier side
with warnings.catch_warnings():
    warnings.simplefilter("ignore")
    s = fourier.functional_identity_partial("2/3", 0.3, 22)
print("\nidentity series equals h0 at matched depth:",
      np.array_equal(s.partial_sums, pathspace.h0(pathspace.path_query("2/3", 0.3, 22)).partial_sums))
probe = fourier.identity_uniqueness_probe("2/3", 0.1)
print(f"perturbing |nu_hat|^2 by a bump of height 0.1 moves the residual by {probe.residual_change:.3f}")

q = pathspace.path_query("3/4", 0.4, 10, seed=1)
print("\nthree sampled paths at lam=3/4, x=0.4:")
for p in pathspace.sample_paths(q, 16, 3):
    print("  ", "".join(map(str, p.letters)))
