"""Points of the slit holomorphic tangent bundle and seeded sample plans."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import DomainError, ValidationError


@dataclass(frozen=True, eq=False)
class TangentSample:
    """A point ``(z, eta)`` with ``eta != 0``."""

    z: np.ndarray
    eta: np.ndarray

    def __post_init__(self):
        z = np.array(self.z, dtype=complex).reshape(-1)
        eta = np.array(self.eta, dtype=complex).reshape(-1)
        if z.shape != eta.shape:
            raise ValueError(f"z and eta dimensions differ: {z.shape} vs {eta.shape}")
        if not np.any(eta):
            raise DomainError("eta = 0 is not on the slit tangent bundle")
        z.setflags(write=False)
        eta.setflags(write=False)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "eta", eta)

    @property
    def n(self) -> int:
        return self.z.size

    def to_reals(self) -> list[float]:
        out = []
        for v in (*self.z, *self.eta):
            out.extend((float(v.real), float(v.imag)))
        return out

    @classmethod
    def from_reals(cls, values) -> "TangentSample":
        values = [float(v) for v in values]
        if len(values) % 4:
            raise ValueError("a sample needs 4n reals: (Re, Im) pairs for z then eta")
        c = [complex(values[k], values[k + 1]) for k in range(0, len(values), 2)]
        n = len(c) // 2
        return cls(c[:n], c[n:])

    def __repr__(self):
        return f"TangentSample(z={self.z.tolist()}, eta={self.eta.tolist()})"


@dataclass(frozen=True)
class SamplePlan:
    """``z_count`` base points times ``eta_count`` directions, reproducible from ``seed``.

    Base points are uniform in the polydisc of ``radius`` around ``center``;
    directions are uniform on the annulus ``eta_min <= |eta_k| <= eta_max``
    componentwise.
    """

    z_count: int = 8
    eta_count: int = 8
    seed: int = 42
    radius: float = 0.5
    eta_min: float = 0.25
    eta_max: float = 1.0

    def __post_init__(self):
        if self.z_count < 1 or self.eta_count < 1:
            raise ValueError("sample counts must be >= 1")
        if self.radius < 0:
            raise ValueError("radius must be non-negative")

    def describe(self) -> dict:
        return {"seed": self.seed, "z_count": self.z_count, "eta_count": self.eta_count, "radius": self.radius}


def _disc(rng, size, radius):
    r = radius * np.sqrt(rng.uniform(0.0, 1.0, size))
    t = rng.uniform(0.0, 2 * np.pi, size)
    return r * np.exp(1j * t)


def _annulus(rng, size, rmin, rmax):
    r = np.sqrt(rng.uniform(rmin ** 2, rmax ** 2, size))
    t = rng.uniform(0.0, 2 * np.pi, size)
    return r * np.exp(1j * t)


@dataclass
class SampleSet:
    """Samples grouped by base point: ``groups[a][b]`` shares ``z`` with ``groups[a][0]``."""

    groups: list
    descriptor: dict = field(default_factory=dict)

    @property
    def flat(self) -> list:
        return [s for g in self.groups for s in g]

    def __len__(self):
        return sum(len(g) for g in self.groups)

    def map(self, fn) -> "SampleSet":
        return SampleSet([[fn(s) for s in g] for g in self.groups], dict(self.descriptor))


def draw_samples(plan: SamplePlan, n: int, center=None, accept=None, max_tries: int = 1000) -> SampleSet:
    """Draw the plan's samples; ``accept(sample) -> bool`` rejects bad directions (e.g. beta = 0)."""
    rng = np.random.default_rng(plan.seed)
    center = np.zeros(n, dtype=complex) if center is None else np.asarray(center, dtype=complex)
    groups = []
    for _ in range(plan.z_count):
        z = center + _disc(rng, n, plan.radius)
        group = []
        tries = 0
        while len(group) < plan.eta_count:
            eta = _annulus(rng, n, plan.eta_min, plan.eta_max)
            s = TangentSample(z, eta)
            tries += 1
            if accept is None or accept(s):
                group.append(s)
            elif tries > max_tries:
                raise ValidationError(f"could not draw an admissible direction at z={z.tolist()}", witness=s)
        groups.append(group)
    return SampleSet(groups, {**plan.describe(), "center": [complex(c) for c in center]})
