"""Feedback stability criteria side by side on two loops.

First the bundled pair: the plant's huge gain kills the small-gain test
and its negative passivity index kills the index test, yet the loop phase
stays strictly inside +-180 degrees, so the small-phase test certifies
stability.  Then a scalar Lur'e loop, where the gain-free cone test is
compared with the circle test it implies.
"""

import numpy as np

import phasekit as pk
from phasekit.stability import (
    circle_criterion_check,
    closed_loop_phase_bound,
    freqwise_small_phase_check,
    index_passivity_check,
    phase_cone_check,
    small_gain_check,
    small_phase_check,
)

P = pk.benchmark_plant()
report = pk.lti_phase(P)
hinf, _ = pk.hinf_norm(P)
nu = pk.lti_passivity_index(P)

# Controller side: closed-form sector from its passivity surplus.
phi_c = pk.vsp_phase(pk.PassivityIndices(2.0 / 3.0, 1.0 / 3.0))

# Empirical lower bound on the controller gain (enough to refute small gain).
corpus = pk.gen_corpus(pk.quick_corpus_spec(seed=3, count=30, channels=2))
op = pk.SystemOperator(pk.benchmark_controller())
gain_lb = max(y.norm() / u.norm() for u, y in zip(corpus, op.batch(corpus)))

print("criterion        status   margins")
v = small_gain_check(hinf, gain_lb)
print(f"small-gain       {v.status:7s}  {v.margins}")
v = small_phase_check(report.interval, phi_c, report.is_sectorial, True)
print(f"small-phase      {v.status:7s}  {v.margins}")
v = index_passivity_check(nu, nu, 2.0 / 3.0, 1.0 / 3.0)
print(f"index-passivity  {v.status:7s}  {v.margins}")

g1, g2 = closed_loop_phase_bound(report.interval, phi_c)
print("\nclosed-loop sector bounds:",
      [round(d, 3) for d in g1.degrees], "and",
      [round(d, 3) for d in g2.degrees])

# A scalar Lur'e loop: first-order lag against anything in sector (1/2, 3/2).
print("\nscalar loop: P = 1/(s+1), static nonlinearity in (0.5, 1.5)")
lag = pk.TransferMatrix.scalar([1.0], [1.0, 1.0])
sector = pk.SectorBound(0.5, 1.5)
for check in (circle_criterion_check, phase_cone_check):
    v = check(lag, sector)
    print(f"  {v.criterion:12s} {v.status:6s} {v.margins}")

# The cone is spanned by the disk, so passing the cone implies passing the
# circle; the converse can fail (the double lag passes circle, not cone).
dbl = pk.TransferMatrix.scalar([1.0], [1.0, 2.0, 1.0])
print("\n  double lag:",
      "circle", circle_criterion_check(dbl, sector).status + ",",
      "cone", phase_cone_check(dbl, sector).status)

# LTI pair, frequency-wise: per-frequency sums must stay inside +-180 deg.
v = freqwise_small_phase_check(P, pk.TransferMatrix.constant(np.eye(2)))
print("\nfrequency-wise vs identity controller:", v.status,
      {k: round(float(x), 3) for k, x in v.margins.items()})
