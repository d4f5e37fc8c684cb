"""How the quantum/classical time-dilation gap depends on the cat-state size.

For each lattice clock the script sweeps the displacement d of the two
coherent branches, prints the amplitude α₀, the discrepancy |Δ₁,coh|/T after
one second, and whether a single interrogation could resolve it.

    python demos/displacement_sweep.py
"""

import math

from lattice_dilation import MG24, SR87, derive_lattice, free_report
from lattice_dilation.clock import detectability

THETA, PHI, T = math.pi / 4, math.pi, 1.0


def sweep(atom):
    derived = derive_lattice(atom)
    print(f"\n{atom.name}: omega_z = {derived.omega_z:.4e} rad/s, z_s = {derived.z_s * 1e9:.3f} nm")
    print(f"{'d [nm]':>7} {'alpha0':>8} {'|D1|/T':>11} {'ratio':>10}")
    for d_nm in (0, 2, 5, 10, 15, 20, 30):
        alpha = derived.alpha(d_nm * 1e-9)
        report = free_report(derived, alpha, THETA, PHI, T)
        det = detectability(report, atom.clock_omega)
        print(f"{d_nm:>7} {alpha:>8.4f} {abs(report.relative_discrepancy):>11.3e} {det.ratio:>10.3e}")


if __name__ == "__main__":
    for atom in (MG24, SR87):
        sweep(atom)
