"""
Randers and Kropina metrics
===========================

For (alpha, beta) metrics the spray has a closed form in terms of the
Hermitian part and the one-form. The generalized Berwald condition then
reduces to a single scalar per sample, which we compare with the full
engine.
"""

from cfinsler import SamplePlan, classify, zoo
from cfinsler.classifier import kropina_gb_residual, randers_gb_residual
from cfinsler.metric import plan_samples

plan = SamplePlan(z_count=3, eta_count=3)

for b in (["0.3", "0"], ["z1^2", "0"], ["0.3+0.2*conj(z2)", "0.1*z1"]):
    spec = zoo.make("randers", b=b)
    samples = plan_samples(spec, plan)
    report = classify(spec, samples)
    print(f"randers b={b}: scalar residual {randers_gb_residual(spec, samples):.3e}, "
          f"engine verdict {report.lattice['generalized_berwald']}, "
          f"consistent {report.crosscheck('randers_generalized_berwald')['consistent']}")

# %%
# Kropina: the metric is only defined where beta is nonzero, so the
# base point moves away from the zero of b.

spec = zoo.make("kropina", b=["z1", "0"], base_point=[0.8, 0, 0, 0])
samples = plan_samples(spec, plan)
print(kropina_gb_residual(spec, samples))
report = classify(spec, samples)
print("generalized_berwald:", report.lattice["generalized_berwald"])
for name in ("kropina_generalized_berwald", "kropina_spray", "kropina_connection"):
    print(name, report.crosscheck(name)["consistent"])
