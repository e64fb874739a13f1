"""Sample-based classification of a complex Finsler metric.

Every class predicate is turned into a scaled residual (see
:func:`cfinsler.geometry.scaled_residual`) evaluated over a sample set.
Verdicts: ``holds`` below ``tol``, ``fails`` above ``10 * tol``, otherwise
``borderline``.  Equivalent characterizations are grouped and checked for
split verdicts; the inclusion lattice between classes is checked as a set of
implications.  All of this is evidence on the sampled region, not a proof.
"""

from __future__ import annotations

import csv
import io
import json
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from . import alphabeta
from .errors import FinslerError, KindError
from .geometry import connection, cov_derivs, scaled_residual
from .metric import MetricSpec, plan_samples
from .sample import SamplePlan, SampleSet

DEFAULT_TOL = 1e-7
BAND = 10.0

HOLDS, FAILS, BORDERLINE = "holds", "fails", "borderline"

LATTICE = {
    "kahler": ("kahler",),
    "weakly_kahler": ("kahler_weak",),
    "landsberg": ("landsberg",),
    "generalized_berwald": ("generalized_berwald_spray",),
    "g_landsberg": ("landsberg", "generalized_berwald_spray"),
    "strong_landsberg": ("landsberg_cartan_b0", "cartan_b_bar0"),
    "complex_berwald": ("kahler", "generalized_berwald_spray"),
}

INCLUSIONS = (
    ("complex_berwald", "strong_landsberg"),
    ("strong_landsberg", "g_landsberg"),
    ("g_landsberg", "landsberg"),
    ("g_landsberg", "generalized_berwald"),
    ("kahler", "landsberg"),
    ("kahler", "weakly_kahler"),
)

# group name -> equivalent members; a member holds when all of its predicates hold
EQUIVALENCES = {
    "landsberg_characterizations": (("landsberg",), ("landsberg_cartan_b0",), ("landsberg_vertical_berwald",), ("landsberg_metric_berwald",)),
    "g_landsberg_characterizations": (
        ("landsberg", "generalized_berwald_spray"),
        ("landsberg", "dispersion_BL"),
        ("landsberg_cartan_b0", "cartan_b_bar_00"),
        ("g_landsberg_metric", "generalized_berwald_spray"),
        ("cartan_b_sym", "cartan_b_bar_sym"),
    ),
    "strong_landsberg_characterizations": (
        ("landsberg_cartan_b0", "cartan_b_bar0"),
        ("dispersion_g_B", "generalized_berwald_spray"),
        ("cartan_b_h", "generalized_berwald_spray"),
        ("cartan_b_hbar",),
    ),
    "complex_berwald_characterizations": (
        ("kahler", "generalized_berwald_spray"),
        ("berwald_mixed_vs_cf",),
        ("berwald_vs_cf", "dispersion_L_cf"),
        ("kahler", "dispersion_L_cf"),
        ("metric_berwald", "generalized_berwald_spray"),
        ("mixed_vanish",),
    ),
    "complex_berwald_via_cartan": (("kahler", "generalized_berwald_spray"), ("kahler", "cartan_cf_either")),
    "generalized_berwald_characterizations": (("dispersion_BL",), ("generalized_berwald_spray",), ("berwald_mixed",), ("berwald_vertical",)),
    "cartan_cf_h_vs_hbar": (("cartan_cf_h",), ("cartan_cf_hbar",)),
    "strong_landsberg_via_dispersion": (("dispersion_cLg", "generalized_berwald_spray"), ("landsberg_cartan_b0", "cartan_b_bar0")),
    "kahler_vs_strongly_kahler": (("kahler",), ("kahler_strong",)),
    "cartan_b_hbar_conjugate_forms": (("cartan_b_hbar",), ("cartan_b_hbar_conj",)),
}
RANDERS_EQUIVALENCES = {
    "randers_generalized_berwald": (("randers_gb_scalar",), ("generalized_berwald_spray",)),
    "randers_weakly_kahler": (("randers_weak_kahler",), ("kahler_weak",)),
    "randers_complex_berwald": (("generalized_berwald_spray", "kahler_weak"), ("kahler", "generalized_berwald_spray")),
}
KROPINA_EQUIVALENCES = {
    "kropina_spray": (("kropina_gb_scalar",), ("kropina_spray_gap",)),
    "kropina_connection": (("kropina_gb_vector",), ("kropina_connection_gap",)),
}
KROPINA_IMPLICATIONS = {
    "kropina_generalized_berwald": (("kropina_gb_scalar",), ("generalized_berwald_spray",)),
    "kropina_complex_berwald": (("alpha_kahler", "kropina_gb_vector"), ("kahler", "generalized_berwald_spray")),
    "kropina_connection_to_spray": (("kropina_gb_vector",), ("kropina_gb_scalar",)),
}

DISPERSIONS = {"dispersion_BL": "BL", "dispersion_L_cf": "L_cf", "dispersion_g_B": "g_B", "dispersion_cLg": "cLg"}

CONVENTIONS = (
    "convention: Berwald kbar-derivatives use the conjugate-dual correction rule",
    "convention: z-only predicates are tested by eta-dispersion at fixed z",
)


def verdict_of(value: float, tol: float) -> str:
    if value < tol:
        return HOLDS
    if value > BAND * tol:
        return FAILS
    return BORDERLINE


def _combine(verdicts) -> str:
    verdicts = list(verdicts)
    if FAILS in verdicts:
        return FAILS
    if BORDERLINE in verdicts:
        return BORDERLINE
    return HOLDS


@dataclass
class PredicateResidual:
    id: str
    per_sample: list
    aggregate: float
    tolerance: float
    verdict: str


@dataclass
class ClassificationReport:
    metric: str
    plan: dict
    tolerance: float
    predicates: list
    lattice: dict
    crosschecks: list
    warnings: list = field(default_factory=list)

    def predicate(self, pid: str) -> PredicateResidual:
        for p in self.predicates:
            if p.id == pid:
                return p
        raise KeyError(pid)

    def aggregate(self, pid: str) -> float:
        return self.predicate(pid).aggregate

    def crosscheck(self, name: str) -> dict:
        for c in self.crosschecks:
            if c["theorem"] == name:
                return c
        raise KeyError(name)

    @property
    def consistent(self) -> bool:
        return all(c["consistent"] for c in self.crosschecks)

    def to_dict(self) -> dict:
        return {
            "metric": self.metric,
            "plan": {k: self.plan[k] for k in ("seed", "z_count", "eta_count", "radius") if k in self.plan},
            "tolerance": self.tolerance,
            "predicates": [{"id": p.id, "aggregate": p.aggregate, "verdict": p.verdict} for p in self.predicates],
            "lattice": dict(self.lattice),
            "crosschecks": [{"theorem": c["theorem"], "consistent": c["consistent"]} for c in self.crosschecks],
            "warnings": list(self.warnings),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2, sort_keys=False)

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["predicate_id", "sample_index", "residual"])
        for p in self.predicates:
            for i, r in enumerate(p.per_sample):
                w.writerow([p.id, i, repr(float(r))])
        return buf.getvalue()


# --------------------------------------------------------------------------
# per-sample residuals

def sample_residuals(spec: MetricSpec, b, d) -> tuple[dict, dict]:
    """Residuals at one sample, plus the arrays needed for dispersion statistics."""
    eta, etab = b.eta, b.eta.conj()
    g = b.g
    R = {}
    Teta = np.einsum("ijk,j->ik", b.T, eta)
    weak = np.einsum("il,ik,l->k", g, Teta, etab)
    R["kahler_strong"] = scaled_residual(b.T, b.L_cf)
    R["kahler"] = scaled_residual(Teta, b.L_cf, b.N)
    R["kahler_weak"] = scaled_residual(weak, np.einsum("il,ijk->ljk", g, b.L_cf), b.N, g)

    R["landsberg"] = scaled_residual(b.BL - b.cL, b.BL, b.cL)
    CB0 = np.einsum("lrhk,k->lrh", d.C_B_h, eta)
    R["landsberg_cartan_b0"] = scaled_residual(CB0, d.C_B_h)
    dBL = b.jets["BL"].grad("eta", b.n).value  # [i, j, k, h]
    lhs = (2 * np.einsum("ijkh,ir->jrhk", dBL, g)
           - np.einsum("mrk,jmh->jrhk", d.Bc, b.C)
           - np.einsum("mrj,kmh->jrhk", d.Bc, b.C))
    rhs = d.C_B_h.transpose(0, 1, 2, 3) + d.C_B_h.transpose(3, 1, 2, 0)
    R["landsberg_vertical_berwald"] = scaled_residual(lhs - rhs, lhs, rhs)
    cLg = np.einsum("mjk,im->ijk", b.cLbar.conj(), g)   # cL^{mbar}_{jbar k} g_{i mbar}
    BLg = np.einsum("mjk,im->ijk", d.Bc, g)
    R["landsberg_metric_berwald"] = scaled_residual(d.g_B - (cLg - BLg), d.g_B, cLg, BLg)

    R["generalized_berwald_spray"] = scaled_residual(b.dGbar, b.cN)
    R["berwald_mixed"] = scaled_residual(b.BLbar, b.BL)
    R["berwald_vertical"] = scaled_residual(dBL, b.BL)
    R["cartan_b_bar_00"] = scaled_residual(np.einsum("jrhk,r,k->jh", d.C_B_bar, etab, etab), d.C_B_bar)
    R["g_landsberg_metric"] = scaled_residual(d.g_B - cLg, d.g_B, cLg)
    R["cartan_b_sym"] = scaled_residual(d.C_B_h + d.C_B_h.transpose(3, 1, 2, 0), d.C_B_h)
    R["cartan_b_bar_sym"] = scaled_residual(d.C_B_bar + d.C_B_bar.transpose(0, 3, 2, 1), d.C_B_bar)
    R["cartan_b_bar0"] = scaled_residual(np.einsum("jrhk,k->jrh", d.C_B_bar, etab), d.C_B_bar)
    R["cartan_b_h"] = scaled_residual(d.C_B_h, b.C, b.BL)
    R["cartan_b_hbar"] = scaled_residual(d.C_B_bar, b.C, b.BL)
    R["cartan_b_hbar_conj"] = scaled_residual(d.C_B_hbar_arg, b.Cbar, b.BL)
    R["berwald_mixed_vs_cf"] = scaled_residual(b.BLbar - b.cLbar, b.BLbar, b.cLbar)
    R["berwald_vs_cf"] = scaled_residual(b.BL - b.L_cf, b.BL, b.L_cf)
    R["metric_berwald"] = scaled_residual(d.g_B, g, b.BL)
    R["mixed_vanish"] = max(scaled_residual(b.BLbar, b.BL), scaled_residual(b.cLbar, b.cL))
    R["cartan_cf_h"] = scaled_residual(d.C_cf_h, b.C, b.L_cf)
    R["cartan_cf_hbar"] = scaled_residual(d.C_cf_hbar, b.C, b.L_cf)

    if spec.kind == "randers":
        r = alphabeta.randers_aux(spec, b.sample)
        x = r.base
        t1, t2 = (t @ eta for t in x.gb_terms())
        R["randers_gb_scalar"] = scaled_residual(t1 + t2, t1, t2)
        wk = alphabeta.randers_weak_kahler_vector(r)
        R["randers_weak_kahler"] = scaled_residual(wk, x.l, x.b, x.da, x.db)
    elif spec.kind == "kropina":
        kr = alphabeta.kropina_aux(spec, b.sample)
        x = kr.base
        v1, v2 = x.gb_terms()
        R["kropina_gb_scalar"] = scaled_residual((v1 + v2) @ eta, v1 @ eta, v2 @ eta)
        R["kropina_gb_vector"] = scaled_residual(v1 + v2, v1, v2)
        R["kropina_spray_gap"] = scaled_residual(b.G - x.aG, b.G, x.aG)
        R["kropina_connection_gap"] = scaled_residual(b.N - x.aN, b.N, x.aN)
        R["alpha_kahler"] = scaled_residual(x.da - x.da.transpose(2, 1, 0), x.da)

    arrays = {"BL": b.BL, "L_cf": b.L_cf, "g_B": d.g_B, "cLg": cLg}
    return R, arrays


def dispersion(arrays) -> float:
    """Max pairwise entry difference across samples, scaled by 1 + max |entry|."""
    stack = np.stack(arrays)
    worst = 0.0
    for a in range(len(stack)):
        worst = max(worst, float(np.max(np.abs(stack[a + 1:] - stack[a]), initial=0.0)))
    return worst / (1.0 + float(np.max(np.abs(stack), initial=0.0)))


def _evaluate_sample(spec, sample):
    b = connection(spec, sample)
    d = cov_derivs(b)
    return sample_residuals(spec, b, d)


def _workers(threads):
    if threads is None:
        env = os.environ.get("FINSLER_THREADS")
        threads = int(env) if env and env.isdigit() else 1
    return max(1, int(threads))


# --------------------------------------------------------------------------
# aggregation

def _member_verdict(member, verdicts):
    return _combine(verdicts[p] for p in member)


def _equivalence(name, members, verdicts):
    mv = [_member_verdict(m, verdicts) for m in members]
    split = HOLDS in mv and FAILS in mv
    return {
        "theorem": name,
        "consistent": not split,
        "members": [{"predicates": list(m), "verdict": v} for m, v in zip(members, mv)],
        "borderline": BORDERLINE in mv,
    }


def _implication(name, antecedent, consequent, verdicts):
    a = _member_verdict(antecedent, verdicts)
    c = _member_verdict(consequent, verdicts)
    return {
        "theorem": name,
        "consistent": not (a == HOLDS and c == FAILS),
        "members": [{"predicates": list(antecedent), "verdict": a}, {"predicates": list(consequent), "verdict": c}],
        "borderline": BORDERLINE in (a, c),
    }


def classify(spec: MetricSpec, plan=None, tol: float = DEFAULT_TOL, threads: int | None = None) -> ClassificationReport:
    """Evaluate every applicable predicate over the plan (a SamplePlan or an explicit SampleSet)."""
    if not tol > 0:
        raise ValueError("tolerance must be positive")
    plan = SamplePlan() if plan is None else plan
    samples = plan if isinstance(plan, SampleSet) else plan_samples(spec, plan)
    flat = samples.flat
    warnings = list(CONVENTIONS)

    workers = _workers(threads)
    if workers > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            futures = [pool.submit(_evaluate_sample, spec, s) for s in flat]
            outcomes = []
            for f in futures:
                try:
                    outcomes.append(f.result())
                except FinslerError as err:
                    outcomes.append(err)
    else:
        outcomes = []
        for s in flat:
            try:
                outcomes.append(_evaluate_sample(spec, s))
            except FinslerError as err:
                outcomes.append(err)

    per_sample = {}
    sizes = [len(g) for g in samples.groups]
    offsets = np.cumsum([0] + sizes)
    disp_groups = {k: [] for k in DISPERSIONS}
    for idx, out in enumerate(outcomes):
        if isinstance(out, Exception):
            warnings.append(f"sample {idx} skipped: {type(out).__name__}: {out}")
            continue
        R, _ = out
        for k, v in R.items():
            per_sample.setdefault(k, [np.nan] * len(flat))[idx] = v
    if all(isinstance(o, Exception) for o in outcomes):
        raise FinslerError("no sample could be evaluated; see warnings: " + "; ".join(warnings[len(CONVENTIONS):]))

    for gi in range(len(sizes)):
        group = [o for o in outcomes[offsets[gi]:offsets[gi + 1]] if not isinstance(o, Exception)]
        for pid, key in DISPERSIONS.items():
            value = dispersion([o[1][key] for o in group]) if len(group) > 1 else 0.0
            col = per_sample.setdefault(pid, [np.nan] * len(flat))
            for idx in range(offsets[gi], offsets[gi + 1]):
                col[idx] = value
            disp_groups[pid].append(value)
    if max(sizes) < 2:
        warnings.append("eta_count < 2: dispersion predicates are vacuous")

    predicates = []
    verdicts = {}
    aggregates = {}
    for pid, values in per_sample.items():
        arr = np.array(values, dtype=float)
        agg = float(np.nanmax(arr)) if np.any(~np.isnan(arr)) else float("nan")
        aggregates[pid] = agg
        verdicts[pid] = verdict_of(agg, tol) if np.isfinite(agg) else BORDERLINE
        predicates.append(PredicateResidual(pid, [float(v) for v in values], agg, tol, verdicts[pid]))
    either = min(aggregates["cartan_cf_h"], aggregates["cartan_cf_hbar"])
    verdicts["cartan_cf_either"] = verdict_of(either, tol)
    predicates.append(PredicateResidual(
        "cartan_cf_either",
        [min(a, b) for a, b in zip(per_sample["cartan_cf_h"], per_sample["cartan_cf_hbar"])],
        either, tol, verdicts["cartan_cf_either"],
    ))

    lattice = {cls: _combine(verdicts[p] for p in preds) for cls, preds in LATTICE.items()}

    groups = dict(EQUIVALENCES)
    implications = {}
    if spec.kind == "randers":
        groups.update(RANDERS_EQUIVALENCES)
    elif spec.kind == "kropina":
        groups.update(KROPINA_EQUIVALENCES)
        implications.update(KROPINA_IMPLICATIONS)
    crosschecks = [_equivalence(t, m, verdicts) for t, m in groups.items()]
    crosschecks += [_implication(t, a, c, verdicts) for t, (a, c) in implications.items()]
    for lo, hi in INCLUSIONS:
        crosschecks.append(_implication(f"lattice:{lo}=>{hi}", LATTICE[lo], LATTICE[hi], verdicts))

    for c in crosschecks:
        if not c["consistent"]:
            warnings.append(f"inconsistent verdicts in {c['theorem']}: "
                            + ", ".join(f"{'+'.join(m['predicates'])}={m['verdict']}" for m in c["members"]))
        elif c["borderline"]:
            warnings.append(f"borderline residual in {c['theorem']}; consistency not asserted")

    return ClassificationReport(
        metric=spec.name,
        plan=dict(samples.descriptor),
        tolerance=tol,
        predicates=predicates,
        lattice=lattice,
        crosschecks=crosschecks,
        warnings=warnings,
    )


def randers_gb_residual(spec: MetricSpec, samples: SampleSet) -> float:
    """Max over samples of the Randers generalized-Berwald scalar (relative to its two terms)."""
    if spec.kind != "randers":
        raise KindError(f"expected a randers metric, got {spec.kind}")
    worst = 0.0
    for s in samples.flat:
        x = alphabeta.randers_aux(spec, s).base
        t1, t2 = (t @ x.eta for t in x.gb_terms())
        worst = max(worst, scaled_residual(t1 + t2, t1, t2))
    return worst


def randers_weakly_kahler_residual(spec: MetricSpec, samples: SampleSet) -> float:
    worst = 0.0
    for s in samples.flat:
        r = alphabeta.randers_aux(spec, s)
        x = r.base
        worst = max(worst, scaled_residual(alphabeta.randers_weak_kahler_vector(r), x.l, x.b, x.da, x.db))
    return worst


def kropina_gb_residual(spec: MetricSpec, samples: SampleSet) -> dict:
    """Kropina spray-criterion scalar, its uncontracted form, and |G - aG|, |N - aN| (max over samples)."""
    if spec.kind != "kropina":
        raise KindError(f"expected a kropina metric, got {spec.kind}")
    out = {"scalar": 0.0, "vector": 0.0, "spray_gap": 0.0, "connection_gap": 0.0}
    for s in samples.flat:
        b = connection(spec, s)
        x = alphabeta.kropina_aux(spec, s).base
        eta = x.eta
        v1, v2 = x.gb_terms()
        out["scalar"] = max(out["scalar"], scaled_residual((v1 + v2) @ eta, v1 @ eta, v2 @ eta))
        out["vector"] = max(out["vector"], scaled_residual(v1 + v2, v1, v2))
        out["spray_gap"] = max(out["spray_gap"], float(np.max(np.abs(b.G - x.aG))))
        out["connection_gap"] = max(out["connection_gap"], float(np.max(np.abs(b.N - x.aN))))
    return out


