"""Closed form against generic engine, object by object, over seeded samples."""

from dataclasses import dataclass, field

import numpy as np

from . import generic as ge
from . import jcm
from .field import em_2form_jcm
from .tolerances import DEFAULT

OBJECTS = ("g", "ginv", "M", "N", "L", "C", "Gk_j1", "torsion", "curvature",
           "ricci", "scalarR", "F")
CHUNK = 8


@dataclass
class Discrepancy:
    max_abs: float = 0.0
    max_rel: float = 0.0
    exact_zero: bool = True  # closed form vanished at every sample

    def update(self, closed, generic, floor=DEFAULT.floor):
        closed = np.asarray(closed, dtype=float)
        diff = float(np.max(np.abs(np.asarray(generic) - closed), initial=0.0))
        scale = float(np.max(np.abs(closed), initial=0.0))
        # relative to the object's magnitude; absolute where it vanishes
        zero = scale <= floor
        self.max_abs = max(self.max_abs, diff)
        self.max_rel = max(self.max_rel, diff if zero else diff / scale)
        self.exact_zero = self.exact_zero and zero

    def passed(self, tol, zero_tol):
        if self.exact_zero:
            return self.max_abs <= min(tol, zero_tol)
        return self.max_rel <= tol

    def as_dict(self, tol, zero_tol):
        return {"max_abs": self.max_abs, "max_rel": self.max_rel,
                "exact_zero": self.exact_zero, "pass": self.passed(tol, zero_tol)}


@dataclass
class ValidationReport:
    sigma: object
    h: object
    samples: int
    seed: int
    tolerance: float = DEFAULT.xval
    zero_tolerance: float = DEFAULT.zero
    objects: dict = field(default_factory=lambda: {k: Discrepancy() for k in OBJECTS})

    @property
    def passed(self):
        return all(d.passed(self.tolerance, self.zero_tolerance)
                   for d in self.objects.values())

    def as_dict(self):
        return {
            "sigma": {"kind": self.sigma.kind, "coefficients": list(self.sigma.coefficients),
                      "terms": [[list(e), c] for e, c in self.sigma.terms]},
            "h": {"kind": self.h.kind, "params": list(self.h.params)},
            "samples": self.samples,
            "seed": self.seed,
            "tolerance": self.tolerance,
            "zero_tolerance": self.zero_tolerance,
            "objects": {k: d.as_dict(self.tolerance, self.zero_tolerance)
                        for k, d in self.objects.items()},
            "passed": self.passed,
        }


def sample_points(n_points, seed, dim=4):
    """Seeded points with t in [0.5, 2], x in [-1, 1]^n and y in [0.1, 2]^n."""
    rng = np.random.default_rng(seed)
    t = rng.uniform(0.5, 2.0, n_points)
    x = rng.uniform(-1.0, 1.0, (n_points, dim))
    y = rng.uniform(0.1, 2.0, (n_points, dim))
    return t, x, y


def generic_objects(lag, h, t, x, y):
    """Every generic-engine object for a batch of points, keyed like OBJECTS."""
    ge._guard(lag, h, t, x, y)
    g = ge._metric(lag, h, t, x, y)
    ginv = ge._inverse(g)
    H, _ = ge._semispray(lag, h, t, x, y)
    N = ge._nonlinear(lag, h, t, x, y)
    Gk, L, C = ge._cartan(lag, h, t, x, y)
    T = ge._torsion(lag, h, t, x, y, N)
    R4 = ge._curvature(lag, h, t, x, y, N, L, C, T)
    ric = np.einsum("bmijm->bij", R4)
    return {
        "g": g,
        "ginv": ginv,
        "M": 2.0 * H,
        "N": N,
        "L": L,
        "C": C,
        "Gk_j1": Gk,
        "torsion": T,
        "curvature": R4,
        "ricci": ric,
        "scalarR": np.einsum("bpq,bpq->b", ginv, ric),
        "F": ge._em_2form(lag, h, t, x, y),
    }


def closed_objects(p, sigma, h):
    b = jcm.geometry_bundle(p, sigma, h)
    zero3 = np.zeros((4, 4, 4))
    return {
        "g": b.g, "ginv": b.ginv, "M": b.M, "N": b.N, "L": b.L,
        "C": zero3, "Gk_j1": np.zeros((4, 4)),
        "torsion": b.torsion, "curvature": b.frakR, "ricci": b.ricci,
        "scalarR": b.scalarR, "F": em_2form_jcm(p, sigma, h),
    }


def cross_validate(sigma, h, sample, seed, tolerance=DEFAULT.xval,
                   zero_tolerance=DEFAULT.zero):
    """Max discrepancy of each closed-form object against the generic engine."""
    if sample < 1:
        raise ValueError("sample must be >= 1")
    report = ValidationReport(sigma, h, sample, seed, tolerance, zero_tolerance)
    lag = ge.jcm_lagrangian(sigma, h)
    t, x, y = sample_points(sample, seed)
    for start in range(0, sample, CHUNK):
        sl = slice(start, start + CHUNK)
        gen = generic_objects(lag, h, t[sl], x[sl], y[sl])
        for b in range(len(t[sl])):
            p = jcm.JetPoint(t[sl][b], x[sl][b], y[sl][b])
            closed = closed_objects(p, sigma, h)
            for name in OBJECTS:
                report.objects[name].update(closed[name], gen[name][b])
    return report
