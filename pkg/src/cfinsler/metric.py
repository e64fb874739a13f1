"""Metric descriptions: the five metric kinds, JSON I/O, validation and transforms."""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from . import dsl
from .dsl import Expr, Num, Var
from .errors import DomainError, ExprSyntaxError, SchemaError, ValidationError
from .sample import SamplePlan, SampleSet, TangentSample, draw_samples
from .tensors import is_positive_definite

KINDS = ("hermitian", "randers", "kropina", "antonelli_shimada", "custom")
PAYLOAD_FIELDS = {
    "hermitian": ("a",),
    "randers": ("a", "b"),
    "kropina": ("a", "b"),
    "antonelli_shimada": ("sigma",),
    "custom": ("L",),
}
ALLOWED_FIELDS = {"name", "dimension", "kind", "a", "b", "sigma", "L", "base_point"}

VALIDATION_PLAN = SamplePlan(z_count=4, eta_count=4, seed=16)
BETA_FLOOR = 1e-6
HERMITIAN_TOL = 1e-10
REAL_TOL = 1e-10


@dataclass(frozen=True)
class MetricSpec:
    """Immutable description of a complex Finsler metric.

    Payload by kind: ``a`` (n x n tuple of Expr, a_{i jbar}) for hermitian,
    randers and kropina; ``b`` (n-tuple of Expr) for randers and kropina;
    ``sigma`` for antonelli_shimada; ``L`` (= F^2) for custom.
    """

    name: str
    dimension: int
    kind: str
    a: tuple | None = None
    b: tuple | None = None
    sigma: Expr | None = None
    L: Expr | None = None
    base_point: tuple = ()
    validation: dict | None = field(default=None, compare=False, repr=False)

    @property
    def n(self) -> int:
        return self.dimension

    @property
    def center(self) -> np.ndarray:
        if self.base_point:
            return np.array(self.base_point, dtype=complex)
        return np.zeros(self.dimension, dtype=complex)

    def alpha2(self) -> Expr:
        """a_{i jbar} eta^i conj(eta^j)."""
        return _hermitian_form(self.a, self.dimension)

    def beta(self) -> Expr:
        """b_i eta^i."""
        return _sum(_mul(b, Var("eta", i + 1)) for i, b in enumerate(self.b))


# --------------------------------------------------------------------------
# expression helpers that keep trees small

def _is_num(e, value=None):
    return isinstance(e, Num) and (value is None or e.value == value)


def _mul(x: Expr, y: Expr) -> Expr:
    if _is_num(x, 0) or _is_num(y, 0):
        return Num(0j)
    if _is_num(x, 1):
        return y
    if _is_num(y, 1):
        return x
    if _is_num(x) and _is_num(y):
        return Num(x.value * y.value)
    return x * y


def _sum(terms) -> Expr:
    out = None
    for t in terms:
        if _is_num(t, 0):
            continue
        out = t if out is None else out + t
    return Num(0j) if out is None else out


def _hermitian_form(a, n) -> Expr:
    return _sum(
        _mul(a[i][j], _mul(Var("eta", i + 1), dsl.conj(Var("eta", j + 1))))
        for i in range(n)
        for j in range(n)
    )


def assemble_L(spec: MetricSpec) -> Expr:
    """L = F^2 as an expression in z and eta."""
    kind = spec.kind
    if kind == "hermitian":
        return spec.alpha2()
    if kind == "randers":
        return (dsl.sqrt(spec.alpha2()) + dsl.sqrt(dsl.abs2(spec.beta()))) ** 2
    if kind == "kropina":
        # (alpha^2 / |beta|)^2 with |beta|^2 kept as abs2(beta)
        return spec.alpha2() ** 2 / dsl.abs2(spec.beta())
    if kind == "antonelli_shimada":
        quartic = dsl.abs2(Var("eta", 1)) ** 2 + dsl.abs2(Var("eta", 2)) ** 2
        return dsl.exp(Num(2) * spec.sigma) * dsl.sqrt(quartic)
    if kind == "custom":
        return spec.L
    raise SchemaError(f"unknown kind {kind!r}")


# --------------------------------------------------------------------------
# construction

def _parse_field(value, path: str) -> Expr:
    if isinstance(value, Expr):
        return value
    if isinstance(value, bool) or not isinstance(value, (str, int, float)):
        raise SchemaError(f"{path}: expected an expression string, got {type(value).__name__}")
    try:
        return dsl.parse(str(value))
    except ExprSyntaxError as err:
        raise type(err)(str(err.args[0]).split(" at offset")[0], err.byte_offset, err.expected, field=path) from None


def _check_vars(e: Expr, path: str, n: int, allow_eta: bool):
    for name, idx in dsl.variables(e):
        if idx > n:
            raise SchemaError(f"{path}: {name}{idx} exceeds dimension {n}")
        if name == "eta" and not allow_eta:
            raise SchemaError(f"{path}: must depend on z only, found {name}{idx}")


def make_spec(name: str, kind: str, dimension: int, *, a=None, b=None, sigma=None, L=None,
              base_point=None, validate: bool = True) -> MetricSpec:
    """Build (and by default validate) a spec; expression slots accept strings or ASTs."""
    if kind not in KINDS:
        raise SchemaError(f"kind: expected one of {', '.join(KINDS)}, got {kind!r}")
    if isinstance(dimension, bool) or not isinstance(dimension, int) or dimension < 2:
        raise SchemaError(f"dimension: expected an integer >= 2, got {dimension!r}")
    n = dimension
    given = {"a": a, "b": b, "sigma": sigma, "L": L}
    for key, value in given.items():
        if key in PAYLOAD_FIELDS[kind] and value is None:
            raise SchemaError(f"{key}: required for kind {kind}")
        if key not in PAYLOAD_FIELDS[kind] and value is not None:
            raise SchemaError(f"{key}: not used by kind {kind}")
    if kind == "antonelli_shimada" and n != 2:
        raise SchemaError("dimension: antonelli_shimada is defined for n = 2 only")
    pa = pb = psigma = pL = None
    if a is not None:
        if len(a) != n or any(len(row) != n for row in a):
            raise SchemaError(f"a: expected a {n}x{n} array")
        pa = tuple(tuple(_parse_field(a[i][j], f"a[{i}][{j}]") for j in range(n)) for i in range(n))
        for i in range(n):
            for j in range(n):
                _check_vars(pa[i][j], f"a[{i}][{j}]", n, False)
    if b is not None:
        if len(b) != n:
            raise SchemaError(f"b: expected {n} entries")
        pb = tuple(_parse_field(b[i], f"b[{i}]") for i in range(n))
        for i in range(n):
            _check_vars(pb[i], f"b[{i}]", n, False)
    if sigma is not None:
        psigma = _parse_field(sigma, "sigma")
        _check_vars(psigma, "sigma", n, False)
    if L is not None:
        pL = _parse_field(L, "L")
        _check_vars(pL, "L", n, True)
    bp = ()
    if base_point is not None and len(base_point):
        vals = list(base_point)
        if len(vals) == n and all(isinstance(v, complex) or isinstance(v, np.complexfloating) for v in vals):
            bp = tuple(complex(v) for v in vals)
        else:
            if len(vals) != 2 * n or not all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in vals):
                raise SchemaError(f"base_point: expected {2 * n} reals (Re, Im pairs)")
            bp = tuple(complex(vals[2 * k], vals[2 * k + 1]) for k in range(n))
    spec = MetricSpec(str(name), n, kind, pa, pb, psigma, pL, bp)
    if validate:
        spec = validate_spec(spec)
    return spec


def spec_from_dict(data: dict, validate: bool = True) -> MetricSpec:
    if not isinstance(data, dict):
        raise SchemaError("metric file must hold a JSON object")
    unknown = set(data) - ALLOWED_FIELDS
    if unknown:
        raise SchemaError(f"unknown field(s): {', '.join(sorted(unknown))}")
    for key in ("name", "dimension", "kind"):
        if key not in data:
            raise SchemaError(f"{key}: required")
    if not isinstance(data["name"], str):
        raise SchemaError("name: expected a string")
    return make_spec(
        data["name"], data["kind"], data["dimension"],
        a=data.get("a"), b=data.get("b"), sigma=data.get("sigma"), L=data.get("L"),
        base_point=data.get("base_point"), validate=validate,
    )


def load_metric(source, validate: bool = True) -> MetricSpec:
    """Read a metric-JSON file (path, JSON text or already-decoded dict)."""
    if isinstance(source, dict):
        return spec_from_dict(source, validate)
    text = None
    if isinstance(source, Path) or (isinstance(source, str) and not source.lstrip().startswith("{")):
        try:
            text = Path(source).read_text()
        except OSError as err:
            raise SchemaError(f"cannot read metric file: {err}") from None
    else:
        text = source
    try:
        data = json.loads(text)
    except json.JSONDecodeError as err:
        raise SchemaError(f"invalid JSON: {err}") from None
    return spec_from_dict(data, validate)


def spec_to_dict(spec: MetricSpec) -> dict:
    out = {"name": spec.name, "dimension": spec.dimension, "kind": spec.kind}
    if spec.a is not None:
        out["a"] = [[dsl.to_text(x) for x in row] for row in spec.a]
    if spec.b is not None:
        out["b"] = [dsl.to_text(x) for x in spec.b]
    if spec.sigma is not None:
        out["sigma"] = dsl.to_text(spec.sigma)
    if spec.L is not None:
        out["L"] = dsl.to_text(spec.L)
    if spec.base_point:
        out["base_point"] = [float(x) for c in spec.base_point for x in (c.real, c.imag)]
    return out


def dump_metric(spec: MetricSpec) -> str:
    return json.dumps(spec_to_dict(spec), indent=2)


# --------------------------------------------------------------------------
# validation

def beta_ok(spec: MetricSpec):
    """Sample filter keeping |beta| above the floor (Kropina only)."""
    if spec.kind != "kropina":
        return None
    beta = spec.beta()

    def accept(s: TangentSample) -> bool:
        return abs(dsl.evaluate_at(beta, s.z, s.eta)) > BETA_FLOOR

    return accept


def _b_identically_zero(spec: MetricSpec, samples: SampleSet) -> bool:
    for group in samples.groups:
        z = group[0].z
        if any(abs(dsl.evaluate_at(b, z)) > 0 for b in spec.b):
            return False
    return True


def plan_samples(spec: MetricSpec, plan: SamplePlan) -> SampleSet:
    if spec.kind == "kropina":
        probe = draw_samples(replace(plan, eta_count=1), spec.n, spec.center)
        if _b_identically_zero(spec, probe):
            raise ValidationError("beta vanishes identically; the Kropina metric needs |beta| != 0")
    return draw_samples(plan, spec.n, spec.center, accept=beta_ok(spec))


def validate_spec(spec: MetricSpec, plan: SamplePlan = VALIDATION_PLAN) -> MetricSpec:
    """Check Hermitian symmetry of ``a``, realness and positivity of L, and positivity of g."""
    from .wirtinger import taylor

    samples = plan_samples(spec, plan)
    L = assemble_L(spec)
    n = spec.n
    worst = {"hermitian": 0.0, "imag_L": 0.0}
    for s in samples.flat:
        if spec.a is not None:
            av = np.array([[dsl.evaluate_at(x, s.z) for x in row] for row in spec.a])
            dev = float(np.max(np.abs(av - av.conj().T)))
            worst["hermitian"] = max(worst["hermitian"], dev)
            if dev > HERMITIAN_TOL * (1 + np.max(np.abs(av))):
                raise ValidationError(f"a is not Hermitian at z={s.z.tolist()} (deviation {dev:.3g})", witness=s)
        try:
            jet = taylor(L, s, 2, 0, 2)
        except DomainError as err:
            raise ValidationError(f"L is singular at the validation sample: {err}", witness=s) from None
        value = complex(jet.value)
        worst["imag_L"] = max(worst["imag_L"], abs(value.imag))
        if abs(value.imag) > REAL_TOL * (1 + abs(value)):
            raise ValidationError(f"L is not real (Im L = {value.imag:.3g})", witness=s)
        if not value.real > 0:
            raise ValidationError(f"L = {value.real:.3g} is not positive", witness=s)
        g = np.array([[jet.derivative({("eta", i): 1, ("etabar", j): 1}) for j in range(n)] for i in range(n)])
        if not is_positive_definite(g):
            raise ValidationError("fundamental tensor is not positive definite", witness=s)
    report = {"seed": plan.seed, "count": len(samples), "radius": plan.radius, **worst}
    return replace(spec, validation=report)


# --------------------------------------------------------------------------
# transforms used by the invariance checks

def scaled(spec: MetricSpec, factor: float = 2.0) -> MetricSpec:
    """The metric with L multiplied by the positive constant ``factor``."""
    if not factor > 0:
        raise ValueError("factor must be positive")
    c = Num(complex(factor))
    r = Num(complex(math.sqrt(factor)))
    kw = {}
    if spec.kind == "hermitian":
        kw["a"] = tuple(tuple(_mul(c, x) for x in row) for row in spec.a)
    elif spec.kind in ("randers", "kropina"):
        kw["a"] = tuple(tuple(_mul(c, x) for x in row) for row in spec.a)
        kw["b"] = tuple(_mul(r, x) for x in spec.b)
    elif spec.kind == "antonelli_shimada":
        kw["sigma"] = spec.sigma + Num(complex(math.log(factor) / 2))
    else:
        kw["L"] = _mul(c, spec.L)
    return validate_spec(replace(spec, name=f"{spec.name}*{factor:g}", **kw))


def _linear_subs(M: np.ndarray, name: str) -> dict:
    n = M.shape[0]
    return {
        (name, k + 1): _sum(_mul(Num(complex(M[k, m])), Var(name, m + 1)) for m in range(n))
        for k in range(n)
    }


def linear_change(spec: MetricSpec, A) -> MetricSpec:
    """The same metric written in coordinates ``z' = A z`` (so ``eta' = A eta``)."""
    A = np.asarray(A, dtype=complex)
    n = spec.n
    if A.shape != (n, n):
        raise ValueError(f"A must be {n}x{n}")
    B = np.linalg.inv(A)
    zs = _linear_subs(B, "z")
    sub = lambda e: dsl.substitute(e, zs)  # noqa: E731
    center = tuple(complex(x) for x in A @ spec.center) if spec.base_point else ()
    name = f"{spec.name}@linear"
    if spec.kind in ("hermitian", "randers", "kropina"):
        a = tuple(
            tuple(
                _sum(
                    _mul(Num(complex(B[k, i] * np.conj(B[l, j]))), sub(spec.a[k][l]))
                    for k in range(n) for l in range(n)
                )
                for j in range(n)
            )
            for i in range(n)
        )
        b = None
        if spec.b is not None:
            b = tuple(_sum(_mul(Num(complex(B[k, i])), sub(spec.b[k])) for k in range(n)) for i in range(n))
        new = replace(spec, name=name, a=a, b=b, base_point=center)
    else:
        subs = {**zs, **_linear_subs(B, "eta")}
        L = dsl.substitute(assemble_L(spec), subs)
        new = MetricSpec(name, n, "custom", L=L, base_point=center)
    return validate_spec(new)


def linear_samples(samples: SampleSet, A) -> SampleSet:
    A = np.asarray(A, dtype=complex)
    return samples.map(lambda s: TangentSample(A @ s.z, A @ s.eta))
