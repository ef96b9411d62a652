"""Upper bounds from integer points on spheres in R^4.

Lattice vectors of length n are spread over the sphere; small balls around
a dilated lattice then carry a measure whose Fourier transform stays large
on caps around those directions. This script walks through the pieces for
n = 1, 2, 3 and fits the decay exponent the construction forces.
"""

from fdlab import knapp


def main():
    print("representations as sums of four squares")
    for n in range(1, 9):
        pts = knapp.sum_of_squares_points(4, n)
        print(f"  r4({n}) = {len(pts):4d}   divisor formula {knapp.jacobi_r4(n)}")
    print(f"  r3(7) = {len(knapp.sum_of_squares_points(3, 7))}  (7 is not a sum of three squares)\n")

    reports, alpha = [], None
    for n in (1, 2, 3):
        cfg = knapp.KnappConfig(d=4, n=n, kappa=0.5, rho=0.01, epsilon=0.01)
        rep = knapp.knapp_pipeline(cfg, phase_samples=5000)
        alpha = cfg.alpha
        reports.append(rep)
        print(f"n = {n}: R = {rep.R:8.2f}  directions {rep.gamma_count:4d}  "
              f"phases inside {rep.containment_fraction:.3f}  "
              f"extension ratio {rep.min_extension_ratio:.4f}  "
              f"mass / reference {rep.mu_mass / rep.mu_mass_reference:.3f}")
    print(f"\nexponent forced by the family: {knapp.implied_beta_fit(reports):.3f}")
    print(f"formula value at alpha = {alpha:g}: {reports[0].formula_beta:g}")


if __name__ == "__main__":
    main()
