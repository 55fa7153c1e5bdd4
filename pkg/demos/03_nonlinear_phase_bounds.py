"""Closed-form phase sectors for static and passive nonlinear systems,
validated against sampled range clouds.

A static map pinched between the lines a*x and b*x has all its range
samples inside the disk with center (a+b)/2 and radius (b-a)/2, hence
inside the symmetric sector +-arcsin((b-a)/(b+a)).  A very strictly
passive system with surplus (delta, epsilon) obeys the analogous bound
+-arcsin(sqrt(1 - 4*delta*epsilon)).
"""

import math

import phasekit as pk

# Logarithmic quantizer with density 1/3: sector (1/2, 3/2), phase +-30 deg.
bound = pk.quantizer_sector(pk.QuantizerParams(1.0 / 3.0))
sp = pk.sector_phase(bound)
print(f"quantizer rho=1/3: sector ({bound.a}, {bound.b}), "
      f"phase +-{math.degrees(sp.interval.hi):.1f} deg, "
      f"disk center {sp.disk_center}, radius {sp.disk_radius}")

corpus = pk.gen_corpus(pk.quick_corpus_spec(seed=5, count=60))
quantizer = pk.sector_static(pk.quantizer_map(1.0 / 3.0), name="quantizer")
samples = pk.empirical_nrange(pk.SystemOperator(quantizer), corpus)
emp = pk.empirical_phase(samples)
print("sampled interval:", [round(math.degrees(x), 3)
                            for x in (emp.interval.lo, emp.interval.hi)],
      f"({emp.n_used} used, {emp.n_excluded} excluded)")

# A coarser quantizer has a wider sector.
for rho in (0.1, 1.0 / 3.0, 0.7, 0.95):
    b = pk.quantizer_sector(pk.QuantizerParams(rho))
    print(f"  rho={rho:4.2f} -> phase +-"
          f"{math.degrees(pk.sector_phase(b).interval.hi):6.2f} deg")

# Very strict passivity: the bundled cubic controller has surplus (2/3, 1/3).
idx = pk.PassivityIndices(2.0 / 3.0, 1.0 / 3.0)
vsp = pk.vsp_phase(idx)
print(f"\nVSP(2/3, 1/3) bound: +-{math.degrees(vsp.hi):.4f} deg")

corpus2 = pk.gen_corpus(pk.quick_corpus_spec(seed=6, count=40, channels=2))
controller = pk.SystemOperator(pk.benchmark_controller())
emp2 = pk.empirical_phase(pk.empirical_nrange(controller, corpus2))
print("sampled controller interval:",
      [round(math.degrees(x), 3) for x in (emp2.interval.lo, emp2.interval.hi)])

# The sector formula is the VSP formula at (ab/(a+b), 1/(a+b)).
a, b = 0.5, 1.5
via_vsp = pk.vsp_phase(pk.PassivityIndices(a * b / (a + b), 1.0 / (a + b)))
print("\nsector formula recovered through VSP indices:",
      math.degrees(via_vsp.hi), "deg (expect 30)")

# Empirical passivity margins confirm the surplus on the corpus.
ys = controller.batch(corpus2)
res = pk.empirical_passivity(list(zip(corpus2, ys)), idx.delta, idx.epsilon)
print("worst normalized VSP margin on corpus:", res.min_normalized)
