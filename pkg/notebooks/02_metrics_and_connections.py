"""
Describing a metric and computing its connections
=================================================

Metrics are written in a small expression language over z1..zn, eta1..etan
and conj(). Hermitian, Randers, Kropina and conformally flat families take
their coefficient fields; anything else goes in as a custom L.
"""

import numpy as np

from cfinsler import TangentSample, connection, cov_derivs, dump_metric, load_metric, make_spec, zoo
from cfinsler.geometry import bundle_identities, compatibility

spec = make_spec("quadratic_randers", "randers", 2, a=[["1", "0"], ["0", "1"]], b=["z1^2", "0"])
print(dump_metric(spec))
assert load_metric(dump_metric(spec)) == spec

point = TangentSample([0.3 + 0.1j, -0.2 + 0.25j], [0.7 + 0.2j, 0.4 - 0.3j])
b = connection(spec, point)

# %%
# The bundle carries the fundamental tensor, its inverse, the nonlinear
# connection N, the spray G and the horizontal coefficients of the
# Chern-Finsler and Berwald connections.

print("N^i_j =\n", np.round(b.N, 6))
print("G^i =", np.round(b.G, 6))
print("Chern-Finsler L^1_{jk} =\n", np.round(b.L_cf[0], 6))
print("Berwald BL^1_{jk} =\n", np.round(b.BL[0], 6))

# %%
# Built-in identities should vanish to rounding at any admissible point.

d = cov_derivs(b)
for name, value in {**bundle_identities(b), **compatibility(b, d)}.items():
    print(f"{name:32s} {value:.2e}")

# %%
# Zoo entries are ready-made specs with documented defaults.

for id in zoo.IDS:
    s = zoo.make(id)
    print(f"{id:28s} kind={s.kind:18s} expected generalized_berwald: {zoo.expected(id)['generalized_berwald']}")
