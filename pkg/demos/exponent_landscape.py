"""Known lower and upper bounds for the decay exponent beta_d(alpha).

Prints a coarse table for a few dimensions, the gap between the bounds, and
the consequences for the distance-set problem and for the divergence sets of
the wave equation.
"""

import numpy as np

from fdlab import exponents as E


def table(d, n=9):
    print(f"d = {d}")
    print(f"  {'alpha':>6} {'lower':>8} {'source':<24} {'upper':>8} {'source'}")
    for a in np.linspace(d / n, d, n):
        lo, up = E.beta_lower(d, a), E.beta_upper(d, a)
        print(f"  {a:6.3f} {lo.value:8.4f} {lo.provenance:<24} {up.value:8.4f} {up.provenance}")


def main():
    for d in (2, 3, 4):
        table(d)
        print()
    print("distance sets: smallest alpha forcing positive length of the distance set")
    for d in range(3, 8):
        print(f"  d = {d}:  older bound {E.distance_set_threshold(d, 'erdogan'):.4f}   "
              f"with the new floor {E.distance_set_threshold(d, 'theorem'):.4f}   "
              f"best combined {E.distance_set_threshold(d, 'full'):.4f}")
    print("\nwave divergence sets at s = 1 (upper bound for the dimension)")
    for d in range(3, 8):
        print(f"  d = {d}:  {E.gamma_upper_wave(d, 1.0):.4f}   (trivial bound {d - 1})")


if __name__ == "__main__":
    main()
