"""Pointwise convergence and the growth of the Schrodinger maximal function.

First the propagator is checked against the closed-form evolution of a
Gaussian. Then random data with frequencies near R are evolved on the line,
the supremum over 0 < t < 1 is measured in L^2 of a uniform measure on
[0, 1], and the growth rate in R is compared with the sharp 1/4.
"""

import numpy as np

from fdlab import evolution, measures


def main():
    f = evolution.gaussian_datum(1, 1.0)
    x = np.linspace(-3, 3, 7)[:, None]
    for t in (0.0, 0.5, 2.0):
        err = np.max(np.abs(evolution.truncated_propagator(f, 2, t, x)
                            - evolution.gaussian_evolution(x, t, 1.0, 1)))
        print(f"Gaussian, t = {t}: max error {err:.2e}")

    mu = measures.make_grid_measure(1, 512, 0.0, 1.0)
    res = evolution.maximal_scaling_fit(1, mu, 1.0, [16, 32, 64, 128], seeds=range(4))
    print("\n   R     ||sup_t |S_t f| ||")
    for R, v in zip(res.R, res.norms):
        print(f"  {R:5g}  {v:.4f}")
    print(f"fitted growth exponent {res.slope:.3f} +- {res.stderr:.3f}; sharp value {res.s0}")


if __name__ == "__main__":
    main()
