"""Model ingredients: the conformal factor sigma(x) and the time metric h_11(t).

Both are plain descriptions with exact derivative tables. Their value
functions are written with :mod:`jetgeom.autodiff` helpers, so the generic
engine can differentiate them independently of the analytic tables.
"""

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from . import autodiff as ad
from .errors import DomainError, MalformedField, ParseError

DIM = 4
MAX_DEGREE = 6

SIGMA_KINDS = ("constant", "linear", "quadratic", "polynomial")
METRIC_KINDS = ("constant", "power", "exponential")
FIELD_KEYS = ("sigma.kind", "sigma.coeffs", "sigma.terms", "h.kind", "h.params")


@dataclass(frozen=True)
class ScalarField:
    """sigma(x) on M^4, stored as an exponent -> coefficient table.

    ``coefficients`` are interpreted per ``kind``:

    * constant: ``(c,)``
    * linear: ``(a1, a2, a3, a4)``, sigma = sum a_i x^i
    * quadratic: 16 entries of a symmetric Q (row major), optionally followed
      by a linear part a; sigma = x.Q.x / 2 + a.x
    * polynomial: ignored; ``terms`` holds ``((e1, e2, e3, e4), coeff)`` pairs
    """

    kind: str
    coefficients: tuple = ()
    terms: tuple = ()
    table: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "coefficients",
                           tuple(float(c) for c in self.coefficients))
        object.__setattr__(self, "terms", tuple(
            (tuple(int(e) for e in exps), float(c)) for exps, c in self.terms))
        object.__setattr__(self, "table", _build_table(self))

    @classmethod
    def constant(cls, c):
        return cls("constant", (c,))

    @classmethod
    def linear(cls, a):
        return cls("linear", tuple(a))

    @classmethod
    def quadratic(cls, Q, a=None):
        coeffs = list(np.asarray(Q, dtype=float).ravel())
        if a is not None:
            coeffs += list(a)
        return cls("quadratic", tuple(coeffs))

    @classmethod
    def polynomial(cls, terms):
        return cls("polynomial", (), tuple(terms))

    def __call__(self, x):
        """Value at ``x`` (4 floats, arrays or jets)."""
        total = 0.0
        for exps, c in self.table.items():
            term = c
            for xi, e in zip(x, exps):
                for _ in range(e):
                    term = term * xi
            total = total + term
        return total


def _build_table(f):
    table = {}

    def add(exps, c):
        if c != 0.0:
            table[exps] = table.get(exps, 0.0) + c

    unit = [tuple(int(i == j) for j in range(DIM)) for i in range(DIM)]
    c = f.coefficients
    if f.kind == "constant":
        if len(c) != 1:
            raise MalformedField("constant sigma takes exactly one coefficient")
        add((0,) * DIM, c[0])
    elif f.kind == "linear":
        if len(c) != DIM:
            raise MalformedField("linear sigma takes 4 coefficients")
        for i in range(DIM):
            add(unit[i], c[i])
    elif f.kind == "quadratic":
        if len(c) not in (DIM * DIM, DIM * DIM + DIM):
            raise MalformedField("quadratic sigma takes 16 (Q) or 20 (Q, a) coefficients")
        Q = np.array(c[: DIM * DIM]).reshape(DIM, DIM)
        if not np.array_equal(Q, Q.T):
            raise MalformedField("quadratic sigma needs a symmetric Q")
        for i in range(DIM):
            for j in range(DIM):
                exps = tuple(a + b for a, b in zip(unit[i], unit[j]))
                add(exps, 0.5 * Q[i, j])
        if len(c) > DIM * DIM:
            for i in range(DIM):
                add(unit[i], c[DIM * DIM + i])
    elif f.kind == "polynomial":
        seen = set()
        for exps, coeff in f.terms:
            if len(exps) != DIM or min(exps) < 0:
                raise MalformedField(f"bad exponent tuple {exps}")
            if sum(exps) > MAX_DEGREE:
                raise MalformedField(f"term {exps} exceeds total degree {MAX_DEGREE}")
            if exps in seen:
                raise MalformedField(f"duplicate exponent tuple {exps}")
            seen.add(exps)
            add(exps, coeff)
    else:
        raise MalformedField(f"unknown sigma kind {f.kind!r}")
    if not all(math.isfinite(v) for v in table.values()):
        raise MalformedField("non-finite coefficient")
    return table


@dataclass(frozen=True)
class ScalarFieldEval:
    value: float
    grad: np.ndarray
    hess: np.ndarray
    div_D: float
    grad_norm2: float
    laplacian: float
    frakS: float
    div_D_grad: np.ndarray


def _monomial(exps, x, skip=()):
    # x^exps with the exponents at positions in `skip` lowered by one each
    out = 1.0
    e = list(exps)
    for i in skip:
        out *= e[i]
        e[i] -= 1
    if out == 0.0:
        return 0.0
    for xi, ei in zip(x, e):
        if ei:
            out *= xi**ei
    return out


def eval_sigma(sigma, x):
    """sigma with its exact gradient, Hessian and the aggregates built on them."""
    x = [float(v) for v in x]
    if len(x) != DIM:
        raise ValueError("x must have 4 components")
    value = 0.0
    grad = np.zeros(DIM)
    hess = np.zeros((DIM, DIM))
    for exps, c in sigma.table.items():
        value += c * _monomial(exps, x)
        for i in range(DIM):
            grad[i] += c * _monomial(exps, x, (i,))
            for j in range(i, DIM):
                hess[i, j] += c * _monomial(exps, x, (i, j))
    hess = np.triu(hess) + np.triu(hess, 1).T
    return ScalarFieldEval(
        value=value,
        grad=grad,
        hess=hess,
        div_D=float(grad.sum()),
        grad_norm2=float(grad @ grad),
        laplacian=float(np.trace(hess)),
        frakS=float(hess.sum()),
        div_D_grad=hess.sum(axis=0),
    )


def sigma_third(sigma, x, rel_step=1e-4):
    """d^3 sigma / dx^i dx^j dx^k by central differences of the exact Hessian."""
    x = np.asarray(x, dtype=float)
    out = np.zeros((DIM, DIM, DIM))
    for k in range(DIM):
        h = rel_step * (1.0 + abs(x[k]))
        xp, xm = x.copy(), x.copy()
        xp[k] += h
        xm[k] -= h
        out[:, :, k] = (eval_sigma(sigma, xp).hess - eval_sigma(sigma, xm).hess) / (2 * h)
    return out


class HEval(NamedTuple):
    h11: float
    h11_inv: float
    kappa: float


@dataclass(frozen=True)
class TemporalMetric:
    """Riemannian metric h_11(t) on the time axis.

    constant: h_11 = h0 (> 0); power: h_11 = t**k on t > 0;
    exponential: h_11 = exp(lam * t).
    """

    kind: str
    params: tuple = (1.0,)

    def __post_init__(self):
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        if self.kind not in METRIC_KINDS:
            raise MalformedField(f"unknown h kind {self.kind!r}")
        if len(self.params) != 1 or not math.isfinite(self.params[0]):
            raise MalformedField(f"h kind {self.kind!r} takes exactly one finite parameter")
        if self.kind == "constant" and self.params[0] <= 0:
            raise MalformedField("constant h_11 must be positive")

    @classmethod
    def constant(cls, h0=1.0):
        return cls("constant", (h0,))

    @classmethod
    def power(cls, k):
        return cls("power", (k,))

    @classmethod
    def exponential(cls, lam):
        return cls("exponential", (lam,))

    def in_domain(self, t):
        t = np.asarray(t, dtype=float)
        if self.kind == "power":
            return t > 0
        return np.isfinite(t)

    def h11(self, t):
        """h_11(t) for floats, arrays or jets."""
        p = self.params[0]
        if self.kind == "constant":
            return p
        if self.kind == "power":
            return t**p
        return ad.exp(p * t)

    def dh11(self, t):
        p = self.params[0]
        if self.kind == "constant":
            return 0.0
        if self.kind == "power":
            return p * t ** (p - 1) if p != 0 else 0.0
        return p * math.exp(p * t)


def eval_h(metric, t):
    """h_11, h^11 and the Christoffel symbol kappa = h^11/2 dh_11/dt at ``t``."""
    t = float(t)
    if not metric.in_domain(t):
        raise DomainError(f"t outside the domain of h kind {metric.kind!r}", t)
    h = float(metric.h11(t))
    if not h > 0:
        raise DomainError("h_11 <= 0", t)
    inv = 1.0 / h
    return HEval(h, inv, 0.5 * inv * metric.dh11(t))


def _floats(raw, key, line):
    try:
        return tuple(float(v) for v in raw.split(",") if v.strip())
    except ValueError:
        raise ParseError(f"expected comma-separated reals, got {raw!r}", line, key) from None


def _terms(raw, key, line):
    terms = []
    for entry in raw.split(","):
        entry = entry.strip()
        if not entry:
            continue
        try:
            exps, coeff = entry.split(":")
            terms.append((tuple(int(e) for e in exps.split(".")), float(coeff)))
        except ValueError:
            raise ParseError(f"bad polynomial term {entry!r}, expected e1.e2.e3.e4:coeff",
                             line, key) from None
    return tuple(terms)


def read_pairs(text, allowed=FIELD_KEYS):
    """Split ``key=value`` config text into ``{key: (value, line)}``.

    Several pairs may share a line; ``#`` starts a comment.
    """
    pairs = {}
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0]
        for token in line.split():
            if "=" not in token:
                raise ParseError(f"expected key=value, got {token!r}", lineno)
            key, value = token.split("=", 1)
            key = key.strip()
            if key not in allowed:
                raise ParseError("unknown key", lineno, key)
            if key in pairs:
                raise ParseError("duplicate key", lineno, key)
            pairs[key] = (value.strip(), lineno)
    return pairs


def fields_from_pairs(pairs):
    """Build (ScalarField, TemporalMetric) from :func:`read_pairs` output."""

    def need(key):
        if key not in pairs:
            raise ParseError("missing required key", key=key)
        return pairs[key]

    kind, line = need("sigma.kind")
    if kind not in SIGMA_KINDS:
        raise ParseError(f"unknown sigma kind {kind!r}", line, "sigma.kind")
    try:
        if kind == "polynomial":
            raw, line = need("sigma.terms")
            sigma = ScalarField.polynomial(_terms(raw, "sigma.terms", line))
        else:
            raw, line = need("sigma.coeffs")
            sigma = ScalarField(kind, _floats(raw, "sigma.coeffs", line))
    except MalformedField as exc:
        raise ParseError(str(exc), line) from None

    if "h.kind" in pairs or "h.params" in pairs:
        hkind, hline = need("h.kind")
        raw, pline = need("h.params")
        try:
            metric = TemporalMetric(hkind, _floats(raw, "h.params", pline))
        except MalformedField as exc:
            raise ParseError(str(exc), hline, "h.kind") from None
    else:
        metric = TemporalMetric.constant(1.0)
    return sigma, metric


def parse_field_config(text):
    """Parse flat ``key=value`` text into ``(ScalarField, TemporalMetric)``."""
    return fields_from_pairs(read_pairs(text))
