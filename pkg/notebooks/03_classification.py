"""
Sampling a metric and sorting it into classes
=============================================

The classifier evaluates every predicate on a grid of (z, eta) samples,
turns the worst scaled residual into a verdict, and checks that
equivalent characterizations agree with each other.
"""

from cfinsler import SamplePlan, classify, zoo

plan = SamplePlan(z_count=4, eta_count=4, seed=42, radius=0.5)

report = classify(zoo.make("antonelli_shimada"), plan)
for cls, verdict in report.lattice.items():
    print(f"{cls:22s} {verdict}")
print("all cross-checks consistent:", report.consistent)

# %%
# Individual predicates keep their per-sample residuals, which is where
# to look when a verdict is surprising.

p = report.predicate("generalized_berwald_spray")
print(p.id, "aggregate", p.aggregate, "over", len(p.per_sample), "samples")
print("worst five:", sorted(p.per_sample, reverse=True)[:5])

# %%
# A purely Hermitian metric that is not Kaehler: Landsberg-type classes
# hold while Kaehler and complex Berwald fail.

nk = classify(zoo.make("hermitian_nonkahler"), plan)
print({k: v for k, v in nk.lattice.items()})
print("kahler residual:", nk.aggregate("kahler"))

# %%
# Reports serialize to JSON for archiving and CSV for plotting.

print(report.to_json()[:400], "...")
print(report.to_csv().splitlines()[:3])
