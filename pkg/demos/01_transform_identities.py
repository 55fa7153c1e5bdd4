"""Quadrature transform on sampled signals: the identities that make the
phase machinery work.

The FFT multiplier -j*sgn(omega) turns a cosine into a sine, preserves
energy, and is exactly anti-self-adjoint on signals without DC or Nyquist
content.  The half-scaled analytic signal (u + jHu)/2 then carries half
the energy and collapses the redundant negative spectrum, which is what
lets an inner product <analytic(u), y> act as a single complex "range
sample" of an operator.
"""

import numpy as np

import phasekit as pk

# A 5 Hz cosine with an integer number of periods in the window.
dt = 1.0 / 512.0
t = np.arange(4096) * dt
u = pk.RealSignal(np.cos(2.0 * np.pi * 5.0 * t), dt)

hu = pk.hilbert(u)
print("tone shift: max |H(cos) - sin| =",
      np.max(np.abs(hu.samples[:, 0] - np.sin(2.0 * np.pi * 5.0 * t))))

# Energy preservation and orthogonality.
print("isometry:      |Hu| / |u|      =", hu.norm() / u.norm())
print("orthogonality: <u, Hu> / |u|^2 =", abs(pk.inner(u, hu)) / u.norm() ** 2)

# The analytic signal carries exactly half the energy.
ua = pk.analytic(u)
print("half energy:   |u_a|^2 / |u|^2 =", ua.norm() ** 2 / u.norm() ** 2)

# The identity triple, quantified over a random corpus.
corpus = pk.gen_corpus(pk.quick_corpus_spec(seed=1, count=20))
worst = 0.0
for a, b in zip(corpus, corpus[1:]):
    aa, ba = pk.analytic(a), pk.analytic(b)
    scale = a.norm() * b.norm()
    z1, z2, z3 = pk.inner(aa, b), pk.inner(a, ba), pk.inner(aa, ba)
    worst = max(worst, abs(z1 - z2) / scale, abs(z1 - z3) / scale)
print("identity triple worst residual over 19 pairs:", worst)

# An identity operator therefore samples at angle zero with |z| = |u|^2/2.
z = pk.inner(pk.analytic(corpus[0]), corpus[0])
print("identity-system range sample:", z, "angle:", np.angle(z))
