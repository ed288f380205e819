"""Fourier transform and distribution function of Bernoulli convolutions.

At lam = 1/2 the measure is uniform on [-2, 2], so both the infinite
cosine product and the cascade CDF have closed forms to compare against.
"""
import numpy as np

from ifs_harmonic import fourier

t = np.linspace(-3, 3, 7)
v, err = fourier.nu_hat(fourier.fourier_product("1/2"), t)
print("lam=1/2  t, nu_hat(t), sinc(4t), error bound")
for row in zip(t, v, np.sinc(4 * t), err):
    print("  %5.2f  % .15f  % .15f  %.1e" % row)

x = np.linspace(-2, 2, 9)
print("\nHaar CDF from the fixed-point cascade vs (x+2)/4")
print(np.column_stack([x, fourier.cdf_eval("1/2", x), (x + 2) / 4]))

# for lam = 2/3 there is no closed form; compare the cascade with sampling
x = np.linspace(-3, 3, 7)
print("\nlam=2/3 CDF, cascade vs Monte Carlo")
print(np.column_stack([x, fourier.cdf_eval("2/3", x), fourier.cdf_eval("2/3", x, "monte_carlo")]))

# Cesaro means of |nu_hat|^2 decay like 1/L: no atoms
res = fourier.wiener_cesaro("1/2", 1.0, 10)
print("\nWiener means at L = 2^n:", np.array2string(res.s, precision=3))
print("fitted log2 slope over n=4..10: %.4f" % res.log2_slope(4, 10))
