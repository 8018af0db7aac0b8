"""Brute-force ground states of the discrete charged-ball model.

    python3 demos/charged_balls.py
"""
from ternok import balls, energy, interaction

# binary: alternating spins are the unique minimizer
for n in range(1, 6):
    r = balls.brute_force_optimal(n, mode="binary")
    print(f"binary n={n}: {r.minimizers}  U={r.energy:.6f}")

# ternary with a blend matrix: a whole family of arrangements ties
omega = (0.14, 0.43, 0.43)
f = interaction.f_from_gamma(interaction.build_blend(omega), omega)
r = balls.brute_force_optimal(3, omega, f)
print("blend n=3 minimizers:", r.minimizers)
print("predicted family:    ", tuple(balls.blend_family(3)))

# uniform-width layers behave like balls with centred charges
params = energy.ModelParams.from_family("ren", omega, (1, 1, 1))
res = balls.ok_discrete_equivalence(("ABCABC", "ACBBAC"), params)
print(f"continuum/discrete residual: {res:.1e}")

# flipping the dipoles of one half leaves the energy unchanged when f13 = f23
om = (0.25, 0.25, 0.5)
f = interaction.f_from_gamma(interaction.build_ren(om), om)
print("dipole flip:", [f"{balls.dipole_flip_check(m, om, f):+.1e}" for m in (2, 4, 6)])
print("with f13 != f23:", f"{balls.dipole_flip_check(2, om, interaction.compose_f(-0.5, -0.2, -0.6), strict=False):+.3e}")
