"""How fast does the Fourier transform of a measure decay on average?

We compare three measures in the plane and in space: the surface measure of
a sphere (whose averaged transform decays like R^{-(d-1)}), a self-similar
Cantor dust, and a union of tiny balls placed on a lattice. For each one we
sample sigma(R), the squared transform averaged over the sphere of radius R,
and read the decay exponent off a log-log fit.

Run with ``python demos/decay_of_measures.py``.
"""

import math

from fdlab import measures, spectral


def scan(mu, quad, grid):
    curve = spectral.decay_scan(mu, grid, quad)
    fit = spectral.fit_decay_exponent(curve)
    return curve, fit


def main():
    quad3 = spectral.build_sphere_quadrature(3, 2000)
    # the closed form is 4 pi (sin R / R)^2, so keep radii off its zeros
    grid = spectral.jittered_dyadic_grid(4, 64, seed=0, accept=lambda r: abs(math.sin(r)) >= 0.85)
    sphere = measures.make_sphere_measure(3, 10_000)
    curve, fit = scan(sphere, quad3, grid)
    print("unit sphere in R^3")
    for R, s in zip(curve.R, curve.sigma):
        exact = 4 * math.pi * (math.sin(R) / R) ** 2
        print(f"  R = {R:7.3f}   sigma = {s:.5e}   closed form = {exact:.5e}")
    print(f"  fitted beta = {fit.beta:.3f} (surface measure gives 2)\n")

    quad2 = spectral.build_sphere_quadrature(2, 512)
    for ratio, depth in ((1 / 16, 3), (1 / 4, 5)):
        mu = measures.make_cantor_measure(2, ratio, depth)
        alpha = mu.meta.get("nominal_alpha")
        _, fit = scan(mu, quad2, spectral.jittered_dyadic_grid(8, 128, seed=0))
        print(f"Cantor dust, ratio {ratio:g}, {len(mu)} points, nominal dimension {alpha:.3f}: "
              f"beta = {fit.beta:.3f}")

    # lattice measures have a Frostman constant that shrinks like a power of R
    print("\nball-counting constant of lattice measures (d = 2, kappa = 1/2)")
    for R in (32, 64, 128, 256):
        mu = measures.make_lattice_measure(2, R, 0.5, 0.5)
        rep = measures.c_alpha_estimate(mu, 1.0, measures.dyadic_radii(0.5 / R, 2.0),
                                        extra_centers=[[0.0, 0.0]], max_centers=2000)
        print(f"  R = {R:4d}   c_1 estimate = {rep.value:.4e}   R^-1 = {1 / R:.4e}")


if __name__ == "__main__":
    main()
