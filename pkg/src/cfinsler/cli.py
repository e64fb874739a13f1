"""``finsler`` command line: classify, check and dump."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import zoo
from .checks import DEFAULT_TOL as CHECK_TOL
from .checks import SUITES, run_suite
from .classifier import DEFAULT_TOL, classify
from .errors import FinslerError, SchemaError
from .geometry import connection, cov_derivs
from .metric import load_metric, plan_samples
from .sample import SamplePlan, TangentSample

EXIT_OK, EXIT_ERROR, EXIT_INCONSISTENT = 0, 1, 2

CONVENTIONS = {
    "indices": "0-based",
    "g": "g[i, j] = g_{i jbar}",
    "g_inv": "g_inv[j, i] = g^{jbar i}",
    "C": "C[i, j, k] = d/deta^k g_{i jbar}",
    "Cbar": "Cbar[i, j, k] = d/detabar^k g_{i jbar}",
    "N": "N[i, k] = N^i_k (Chern-Finsler nonlinear connection)",
    "cN": "cN[i, j] = d/deta^j G^i (canonical nonlinear connection)",
    "G": "G[i] = G^i (spray)",
    "dGbar": "dGbar[i, k] = d/detabar^k G^i",
    "dNbar": "dNbar[i, k, h] = d/detabar^h N^i_k",
    "mixed": "X[i, j, k] = X^i_{jk} for L_cf, C_cf, BL, BLbar, cL, cLbar, T; BLbar and cLbar carry kbar",
    "covariant": "D[l, r, h, k]: derivative index last",
    "complex": "each tensor is {re: nested list, im: nested list}",
}


@dataclass
class RunConfig:
    command: str
    metric: str | None = None
    zoo_id: str | None = None
    zoo_params: dict = field(default_factory=dict)
    plan: SamplePlan = field(default_factory=SamplePlan)
    tol: float | None = None
    out: str | None = None
    fmt: str = "json"
    suite: str | None = None
    sample: list | None = None

    def __post_init__(self):
        if self.tol is not None and not self.tol > 0:
            raise SchemaError("--tol must be positive")
        if (self.metric is None) == (self.zoo_id is None):
            raise SchemaError("exactly one of --metric or --zoo is required")

    def spec(self):
        if self.metric is not None:
            return load_metric(self.metric)
        return zoo.make(self.zoo_id, **self.zoo_params)


def _split_csv(text: str) -> list[str]:
    return [t.strip() for t in next(csv.reader([text]))]


def _parse_a(text: str) -> list[list[str]]:
    """Rows separated by ';', entries by ','."""
    return [_split_csv(row) for row in text.split(";")]


def _complex_json(x) -> dict:
    x = np.asarray(x)
    return {"re": np.real(x).tolist(), "im": np.imag(x).tolist()}


def _write(text: str, out: str | None):
    if out is None:
        sys.stdout.write(text)
    else:
        Path(out).write_text(text)


def cmd_classify(cfg: RunConfig) -> int:
    spec = cfg.spec()
    report = classify(spec, cfg.plan, tol=cfg.tol or DEFAULT_TOL)
    text = report.to_csv() if cfg.fmt == "csv" else report.to_json() + "\n"
    _write(text, cfg.out)
    for w in report.warnings:
        if not w.startswith("convention:"):
            print(f"warning: {w}", file=sys.stderr)
    return EXIT_OK if report.consistent else EXIT_INCONSISTENT


def cmd_check(cfg: RunConfig) -> int:
    spec = cfg.spec()
    samples = plan_samples(spec, cfg.plan)
    result = run_suite(spec, cfg.suite, samples, cfg.tol or CHECK_TOL)
    if cfg.fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["predicate_id", "sample_index", "residual"])
        for k, values in result.per_sample.items():
            for i, v in enumerate(values):
                w.writerow([k, i, repr(v)])
        text = buf.getvalue()
    else:
        text = json.dumps({"metric": spec.name, "plan": cfg.plan.describe(), **result.to_dict()}, indent=2) + "\n"
    _write(text, cfg.out)
    return EXIT_OK if result.passed else EXIT_INCONSISTENT


def cmd_dump(cfg: RunConfig) -> int:
    spec = cfg.spec()
    if cfg.sample is not None:
        if len(cfg.sample) != 4 * spec.n:
            raise SchemaError(f"--sample needs {4 * spec.n} reals for dimension {spec.n}")
        sample = TangentSample.from_reals(cfg.sample)
    else:
        sample = plan_samples(spec, cfg.plan).flat[0]
    b = connection(spec, sample)
    d = cov_derivs(b)
    tensors = {k: _complex_json(v) for k, v in b.arrays().items()}
    for k in ("C_cf_h", "C_cf_hbar", "C_B_h", "C_B_bar", "g_B"):
        tensors[k] = _complex_json(getattr(d, k))
    doc = {
        "metric": spec.name,
        "conventions": CONVENTIONS,
        "sample": sample.to_reals(),
        "L": float(np.real(b.L)),
        "tensors": tensors,
    }
    _write(json.dumps(doc, indent=1) + "\n", cfg.out)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="finsler", description="Connections and classification of complex Finsler metrics.")
    sub = p.add_subparsers(dest="command", required=True)

    common = argparse.ArgumentParser(add_help=False)
    src = common.add_mutually_exclusive_group()
    src.add_argument("--metric", metavar="PATH", help="metric-JSON file")
    src.add_argument("--zoo", metavar="ID", help=f"built-in metric: {', '.join(zoo.IDS)}")
    common.add_argument("--sigma", help="sigma expression (antonelli_shimada)")
    common.add_argument("--a", help="a-matrix: rows separated by ';', entries by ','")
    common.add_argument("--b", help="b-vector, comma separated")
    common.add_argument("--samples", type=int, default=8, help="number of base points z")
    common.add_argument("--eta-samples", type=int, default=8, help="directions per base point")
    common.add_argument("--seed", type=int, default=42)
    common.add_argument("--radius", type=float, default=0.5)
    common.add_argument("--tol", type=float)
    common.add_argument("--out", metavar="PATH")
    common.add_argument("--format", choices=("json", "csv"), default="json")

    sub.add_parser("classify", parents=[common], help="classify a metric")
    c = sub.add_parser("check", parents=[common], help="run an identity suite")
    c.add_argument("suite", help=f"one of {', '.join(SUITES)}")
    d = sub.add_parser("dump", parents=[common], help="dump the connection data at one sample")
    d.add_argument("--sample", help="4n comma-separated reals: Re/Im pairs of z then eta")
    return p


def config_from_args(args) -> RunConfig:
    params = {}
    if args.sigma is not None:
        params["sigma"] = args.sigma
    if args.a is not None:
        params["a"] = _parse_a(args.a)
    if args.b is not None:
        params["b"] = _split_csv(args.b)
    if params and args.zoo is None:
        raise SchemaError("--sigma/--a/--b only apply with --zoo")
    try:
        plan = SamplePlan(z_count=args.samples, eta_count=args.eta_samples, seed=args.seed, radius=args.radius)
    except ValueError as err:
        raise SchemaError(str(err)) from None
    sample = None
    if getattr(args, "sample", None):
        try:
            sample = [float(v) for v in _split_csv(args.sample)]
        except ValueError:
            raise SchemaError("--sample must be comma-separated reals") from None
    return RunConfig(
        command=args.command, metric=args.metric, zoo_id=args.zoo, zoo_params=params, plan=plan,
        tol=args.tol, out=args.out, fmt=args.format, suite=getattr(args, "suite", None), sample=sample,
    )


COMMANDS = {"classify": cmd_classify, "check": cmd_check, "dump": cmd_dump}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_ERROR
    try:
        cfg = config_from_args(args)
        return COMMANDS[cfg.command](cfg)
    except (FinslerError, OSError, ValueError) as err:
        print(f"error: {type(err).__name__}: {err}", file=sys.stderr)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
