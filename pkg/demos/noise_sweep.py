"""Effect of motional noise on the discrepancy for the magnesium clock.

Amplitude damping shrinks Δ₁,coh by (1 − e^{−Γ_a T})/(Γ_a T), phase damping
leaves every secular quantity unchanged, and diffusion only widens the
distribution of elapsed times.

    python demos/noise_sweep.py
"""

import math

from lattice_dilation import MG24, derive_lattice, free_report
from lattice_dilation.closedform import amplitude_report, diffusion_report, phase_report

THETA, PHI, T = math.pi / 4, math.pi, 1.0


def main():
    mg = derive_lattice(MG24)
    alpha = mg.alpha(10e-9)
    free = free_report(mg, alpha, THETA, PHI, T)
    print(f"free: D1 = {free.Delta1_coh:.4e} s, D2_cq^2 = {free.Delta2_cq_sq:.4e} s^2")
    print(f"\n{'gamma [1/s]':>12} {'amp D1/free':>12} {'phase D1/free':>14} {'diff added var':>15}")
    for gamma in (0.01, 0.1, 1.0, 10.0, 100.0):
        amp = amplitude_report(mg, alpha, THETA, PHI, T, gamma)
        phase = phase_report(mg, alpha, THETA, PHI, T, gamma)
        diff = diffusion_report(mg, alpha, THETA, PHI, T, gamma)
        added = MG24.clock_omega**2 * (diff.Delta2_cq_sq - free.Delta2_cq_sq) / 2
        print(
            f"{gamma:>12g} {amp.Delta1_coh / free.Delta1_coh:>12.6f}"
            f" {phase.Delta1_coh / free.Delta1_coh:>14.6f} {added:>15.3e}"
        )


if __name__ == "__main__":
    main()
