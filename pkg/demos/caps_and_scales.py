"""Caps on the paraboloid, their normals, and the multi-scale ladder.

Two caps over +-1/4 become less transversal as they shrink; the rescaled
paraboloid is its own fixed point while the sphere flattens toward its
osculating quadratic; the ladder of scales K_2 < ... < K_{d+1} stays far
below R^eps.
"""

from fractions import Fraction

import numpy as np

from fdlab import caps


def main():
    para, sph = caps.Phase("paraboloid"), caps.Phase("sphere")
    print("transversality of the caps over -1/4 and +1/4")
    for side in ("1/8", "1/50", "1/1000"):
        a = caps.Cap.centered(para, [Fraction(1, 4)], Fraction(side))
        b = caps.Cap.centered(para, [Fraction(-1, 4)], Fraction(side))
        print(f"  side {side:>7}: {caps.transversality_constant([a, b]):.6f}")

    g = np.linspace(-0.5, 0.5, 41)[:, None]
    print("\nsphere rescaled at 0.2: distance to the osculating quadratic")
    for delta in (0.5, 0.25, 0.125, 0.0625):
        ph = caps.rescale_phase(sph, [0.2], delta)
        dist = np.max(np.abs(ph.value_grad(g)[0] - caps.osculating_quadratic(sph, [0.2], g)))
        print(f"  delta = {delta:<7g} {dist:.3e}")

    print("\nscale ladder, R = 2^40, eps = 0.1")
    for d in (2, 3, 4):
        lad = caps.build_scale_ladder(2.0 ** 40, 0.1, d)
        ks = ", ".join(f"{k:.4g}" for k in lad.scales)
        print(f"  d = {d}: [{ks}]  monotone {lad.monotone()}  below R^eps {lad.below_R_eps()}")

    root = caps.Cap.centered(para, [Fraction(0), Fraction(0)], Fraction(1, 2))
    kids = caps.cap_partition(root, 4)
    print(f"\na cap of side 1/2 splits into {len(kids)} caps of side {kids[0].side}")


if __name__ == "__main__":
    main()
