"""Named example metrics with recorded default parameters and expected classes."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

from .errors import SchemaError, UnknownId
from .metric import MetricSpec, dump_metric, make_spec, validate_spec
from .sample import SamplePlan

_FS_DEN = "(1+z1*conj(z1)+z2*conj(z2))"
# i dbar-derivatives of the potential log(1 + |z|^2)
FUBINI_STUDY = (
    (f"1/{_FS_DEN} - conj(z1)*z1/{_FS_DEN}^2", f"-conj(z1)*z2/{_FS_DEN}^2"),
    (f"-conj(z2)*z1/{_FS_DEN}^2", f"1/{_FS_DEN} - conj(z2)*z2/{_FS_DEN}^2"),
)
IDENTITY2 = (("1", "0"), ("0", "1"))

ALL_HOLD = {
    "kahler": "holds", "weakly_kahler": "holds", "landsberg": "holds", "generalized_berwald": "holds",
    "g_landsberg": "holds", "strong_landsberg": "holds", "complex_berwald": "holds",
}


@dataclass(frozen=True)
class ZooEntry:
    id: str
    factory: Callable[..., MetricSpec]
    defaults: dict
    expected: dict
    provenance: dict = field(default_factory=dict)
    params: tuple = ()

    def make(self, **params) -> MetricSpec:
        unknown = set(params) - set(self.params) - {"name", "base_point"}
        if unknown:
            raise SchemaError(f"{self.id}: unknown parameter(s) {', '.join(sorted(unknown))}")
        return self.factory(**{**self.defaults, **params})


def _identity(n):
    return [["1" if i == j else "0" for j in range(n)] for i in range(n)]


def _flat(n=2, name="flat", base_point=None):
    return make_spec(name, "hermitian", n, a=_identity(n), base_point=base_point)


def _hermitian(a, name, base_point=None):
    return make_spec(name, "hermitian", len(a), a=[list(r) for r in a], base_point=base_point)


def _antonelli_shimada(sigma, name="antonelli_shimada", base_point=None):
    spec = make_spec(name, "antonelli_shimada", 2, sigma=sigma, base_point=base_point)
    # nondegeneracy is required on the region the classifier samples, not just the validation probe
    return validate_spec(spec, SamplePlan())


def _randers(a, b, name="randers", base_point=None):
    return make_spec(name, "randers", len(a), a=[list(r) for r in a], b=list(b), base_point=base_point)


def _kropina(a, b, name="kropina", base_point=None):
    return make_spec(name, "kropina", len(a), a=[list(r) for r in a], b=list(b), base_point=base_point)


def _local_minkowski(L="sqrt(abs2(eta1)^2+abs2(eta2)^2)+abs2(eta1)+abs2(eta2)", name="local_minkowski",
                     base_point=None):
    return make_spec(name, "custom", 2, L=L, base_point=base_point)


ENTRIES = {
    "flat": ZooEntry(
        "flat", _flat, {}, dict(ALL_HOLD),
        {"*": "TRIVIAL"}, ("n",),
    ),
    "hermitian_kahler_potential": ZooEntry(
        "hermitian_kahler_potential", _hermitian,
        {"a": FUBINI_STUDY, "name": "hermitian_kahler_potential"}, dict(ALL_HOLD),
        {"*": "DERIVED: Fubini-Study potential log(1+|z|^2); purely Hermitian Kaehler"}, ("a",),
    ),
    "hermitian_nonkahler": ZooEntry(
        "hermitian_nonkahler", _hermitian,
        {"a": (("exp(z2*conj(z2))", "0"), ("0", "1")), "name": "hermitian_nonkahler"},
        {**ALL_HOLD, "kahler": "fails", "weakly_kahler": "fails", "complex_berwald": "fails"},
        {"kahler": "DERIVED: d_w a_11 = conj(w) exp(|w|^2) != 0", "*": "REFERENCE: purely Hermitian spaces are G-Landsberg"},
        ("a",),
    ),
    "antonelli_shimada": ZooEntry(
        "antonelli_shimada", _antonelli_shimada, {"sigma": "(z1*conj(z1)+z2*conj(z2))/2"},
        {"kahler": "fails", "weakly_kahler": "fails", "landsberg": "fails", "generalized_berwald": "holds",
         "g_landsberg": "fails", "strong_landsberg": "fails", "complex_berwald": "fails"},
        {"generalized_berwald": "REFERENCE: known generalized Berwald example", "*": "DERIVED: sampled Kaehler and Landsberg residuals"}, ("sigma",),
    ),
    "randers": ZooEntry(
        "randers", _randers, {"a": IDENTITY2, "b": ("0.3", "0")}, dict(ALL_HOLD),
        {"*": "TRIVIAL: constant b over flat a"}, ("a", "b"),
    ),
    "kropina": ZooEntry(
        "kropina", _kropina, {"a": IDENTITY2, "b": ("1", "0")}, dict(ALL_HOLD),
        {"*": "TRIVIAL: constant b over flat a"}, ("a", "b"),
    ),
    "local_minkowski": ZooEntry(
        "local_minkowski", _local_minkowski, {}, dict(ALL_HOLD),
        {"*": "REFERENCE: L independent of z"}, ("L",),
    ),
}

IDS = tuple(ENTRIES)


def entry(id: str) -> ZooEntry:
    try:
        return ENTRIES[id]
    except KeyError:
        raise UnknownId(f"unknown zoo id {id!r}; known: {', '.join(IDS)}") from None


def make(id: str, **params) -> MetricSpec:
    """Build and validate the named metric; ``params`` override its defaults (a, b, sigma, n, L)."""
    return entry(id).make(**params)


def expected(id: str) -> dict:
    return dict(entry(id).expected)


def export(id: str, **params) -> str:
    """Metric-JSON text for the entry, loadable with :func:`cfinsler.metric.load_metric`."""
    return dump_metric(make(id, **params))
