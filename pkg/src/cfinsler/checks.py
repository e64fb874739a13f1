"""Identity suites: per-sample residuals of structural identities that must vanish for any metric."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import UnknownId
from .geometry import (
    berwald_cartan_identities, bundle_identities, cartan_cf_identities, compatibility, connection,
    cov_derivs, homogeneity,
)
from .sample import SampleSet

LAMBDAS = (2.0, 0.5j, 1.3 - 0.7j)
DEFAULT_TOL = 1e-7
# computed for information only; a vanishing value is not expected
REPORT_ONLY = frozenset({"cartan_b_hbar_vertical_split"})


def _homogeneity(spec, sample, b, d):
    out = {f"homogeneity_{i}": homogeneity(spec, sample, lam) for i, lam in enumerate(LAMBDAS)}
    out.update(compatibility(b, d))
    return out


def _connection(spec, sample, b, d):
    comp = compatibility(b, d)
    return {**bundle_identities(b), "g_cf_h": comp["g_cf_h"], "eta_h": comp["eta_h"]}


SUITES = {
    "cartan-cf": lambda spec, s, b, d: cartan_cf_identities(b, d),
    "cartan-berwald": lambda spec, s, b, d: berwald_cartan_identities(b, d),
    "connection": _connection,
    "homogeneity": _homogeneity,
}


@dataclass
class SuiteResult:
    suite: str
    tolerance: float
    per_sample: dict

    @property
    def maxima(self) -> dict:
        return {k: float(np.max(v)) for k, v in self.per_sample.items()}

    @property
    def passed(self) -> bool:
        return all(v < self.tolerance for k, v in self.maxima.items() if k not in REPORT_ONLY)

    def to_dict(self) -> dict:
        return {
            "suite": self.suite,
            "tolerance": self.tolerance,
            "passed": self.passed,
            "identities": [
                {"id": k, "max_residual": v, "gated": k not in REPORT_ONLY,
                 "below_tolerance": v < self.tolerance}
                for k, v in self.maxima.items()
            ],
        }


def run_suite(spec, suite: str, samples: SampleSet, tol: float = DEFAULT_TOL) -> SuiteResult:
    try:
        fn = SUITES[suite]
    except KeyError:
        raise UnknownId(f"unknown suite {suite!r}; known: {', '.join(SUITES)}") from None
    per_sample = {}
    for s in samples.flat:
        b = connection(spec, s)
        d = cov_derivs(b)
        for k, v in fn(spec, s, b, d).items():
            per_sample.setdefault(k, []).append(float(v))
    return SuiteResult(suite, tol, per_sample)
