"""Energies of stacked ABC and ABAC layers, and which one wins as gamma grows.

    python3 demos/repeats_and_asymptotics.py
"""
from ternok import analytic, energy
from ternok.optimizer import optimize_repeats

omega = (0.14, 0.43, 0.43)
params = energy.ModelParams.from_family("ren", omega, (1.0, 1.0, 1.0))

# closed form vs direct evaluation for a few repeat counts
for n in (1, 2, 3):
    pat = "ABAC" * n
    direct = energy.free_energy(pat, energy.uniform_widths(pat, omega), params).total
    print(f"ABAC x{n}: closed form {analytic.j_abac(n, params):.12f}  direct {direct:.12f}")

# leading coefficient of min_n J ~ C * gamma^(1/3)
for c in analytic.compare_candidates(["ABC", "ABAC"], params):
    print(f"{c.repetend:5s} S={c.S:.3f} K={c.K:.6f} C={c.C:.4f}")

abac = analytic.asymptotic_coefficient("ABAC", params)
for gamma in (1e2, 1e4, 1e6):
    n, e = abac.best_integer_energy(gamma)
    print(f"gamma={gamma:8.0e}: best n={n:3d}  J={e:10.3f}  C*gamma^(1/3)={abac.C * gamma ** (1 / 3):10.3f}")

# the same n found by optimizing every repeat count directly
gamma = 1558.7
rr = optimize_repeats("ABAC", params.with_gamma(gamma * params.gamma), 8)
print(f"gamma={gamma}: optimize_repeats picks n={rr.n}, J={rr.result.energy.total:.4f}")
