"""Picone inequalities: the pointwise polynomial gate and the discrete form.

The generalized Picone route to the antimaximum principle needs

    (q-1) s^p + q s^{p-1} - (p-q) s + (q-p+1) >= 0   for all s >= 0,

which already forces q > p - 1.  This script maps where the condition holds in
the (p, q) strip and then exercises the epsilon-regularized discrete Picone
inequality, whose two sides saturate to equality at the eigenfunction.
"""

import numpy as np

from plap import (
    Weight,
    build_interval,
    discrete_picone_check,
    picone_polynomial,
    picone_polynomial_check,
    principal_eigenpair,
)

print("== polynomial condition over the (p, q) strip ==")
p_grid = np.linspace(1.2, 4.0, 15)
print("rows: p; columns: q/p fraction from 0.1 to 0.95; '#' = holds, '.' = fails")
for p in p_grid:
    row = ""
    for frac in np.linspace(0.1, 0.95, 30):
        q = 1.0 + frac * (p - 1.0)
        row += "#" if picone_polynomial_check(p, q).holds else "."
    print(f"p = {p:4.2f}  {row}")
print("for p = 2 the expression factors as (q-1)(s+1)^2, so the whole row holds;")
print("for larger p only q close to p survives (q - p + 1 > 0 is necessary:")
print(f"  value at s = 0 for (p, q) = (3, 1.5): {picone_polynomial(3.0, 1.5, 0.0):+.2f})")

print("\n== discrete weak Picone inequality ==")
mesh = build_interval(0.0, 1.0, 256)
pair = principal_eigenpair(mesh, Weight.constant(1.0), 2.0)
print("u = phi = phi1 is the equality case; the regularization keeps lhs short of rhs:")
print(f"{'eps':>8} | {'lhs':>12} | {'rhs':>12} | lhs/rhs")
for eps in (1e-1, 1e-2, 1e-4, 1e-6, 1e-9):
    chk = discrete_picone_check(pair.phi, pair.phi, 2.0, eps)
    print(f"{eps:8.0e} | {chk.lhs:12.8f} | {chk.rhs:12.8f} | {chk.lhs / chk.rhs:.8f}")

rng = np.random.default_rng(1)
trials, holds = 300, 0
for _ in range(trials):
    uv = np.zeros(mesh.n_vertices)
    uv[mesh.interior_vertices] = rng.random(len(mesh.interior_vertices))
    pv = np.zeros(mesh.n_vertices)
    pv[mesh.interior_vertices] = rng.standard_normal(len(mesh.interior_vertices))
    from plap import DiscreteFunction

    if discrete_picone_check(DiscreteFunction(mesh, uv), DiscreteFunction(mesh, pv), 3.0, 1e-3).holds:
        holds += 1
print(f"\nrandom campaign, p = 3: inequality held in {holds}/{trials} trials")
print("(in 1D the interpolated test function satisfies the inequality cell by cell)")
