"""Geometry of an arbitrary jet Lagrangian L(t, x, y) on J^1(R, M^n).

All first and second partials of L come from one :class:`~jetgeom.autodiff.Jet`
evaluation. Quantities that need higher derivatives of L (the nonlinear
connection, the Cartan connection, torsion, curvature) differentiate those
exactly computed second-order fields with a five-point central stencil.

Internally every routine works on batches: ``t`` of shape (B,), ``x`` and
``y`` of shape (B, n). The public functions take a single
:class:`~jetgeom.jcm.JetPoint`.
"""

import math
from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np
import scipy.integrate

from . import autodiff as ad
from .errors import DomainError, DomainExit, NonInvertibleMetric, SingularMatrix
from .jcm import JetPoint
from .tensor import invert_symmetric
from .tolerances import DEFAULT

# first derivatives of exactly computed fields use INNER_STEP; derivatives of
# fields that are themselves differenced use the larger OUTER_STEP
INNER_STEP = 4e-4
OUTER_STEP = 2e-3
FD_STEP = INNER_STEP
# fourth-order central stencil: f' ~ sum_k w_k (f(+k) - f(-k)) / step
_STENCIL_K = np.array([1.0, 2.0])
_STENCIL_W = np.array([8.0, -1.0]) / 12.0
_OFFSETS = np.concatenate([-_STENCIL_K[::-1], _STENCIL_K])


@dataclass(frozen=True)
class LagrangianSpec:
    """A jet Lagrangian.

    ``evaluate(t, x, y)`` receives ``t`` and the coordinate lists ``x``, ``y``
    (each entry a float, array or jet) and must use only arithmetic and the
    :mod:`jetgeom.autodiff` helpers. ``domain_guard(t, x, y)`` gets batched
    arrays and returns a boolean array.
    """

    n: int
    evaluate: Callable
    domain_guard: Optional[Callable] = None
    name: str = "lagrangian"

    def __call__(self, t, x, y):
        return self.evaluate(t, list(x), list(y))


def jcm_lagrangian(sigma, h, eps_dom=DEFAULT.dom):
    """L = F^2 = exp(2 sigma(x)) h^11(t) G11(y) for the JCM metric."""

    def evaluate(t, x, y):
        G11 = 0.0
        for i in range(4):
            for j in range(i + 1, 4):
                G11 = G11 + y[i] * y[j]
        return ad.exp(2.0 * sigma(x)) * G11 / h.h11(t)

    def guard(t, x, y):
        S = y.sum(axis=-1)
        G11 = 0.5 * (S * S - (y * y).sum(axis=-1))
        return (G11 > eps_dom) & h.in_domain(t)

    return LagrangianSpec(4, evaluate, guard, "jcm")


def electrodynamics_lagrangian(n, h, phi=None, potential=None, scalar=None,
                               mc=1.0, e_over_m=1.0):
    """L = mc h^11 phi_ij(x) y^i y^j + (2e/m) A_i(t, x) y^i + F(t, x).

    ``phi(x)`` returns an n x n nested list, ``potential(t, x)`` the n
    components of A, ``scalar(t, x)`` the function F. Omitted pieces default
    to the identity, zero and zero.
    """

    def evaluate(t, x, y):
        total = 0.0
        P = phi(x) if phi is not None else None
        for i in range(n):
            for j in range(n):
                if P is None:
                    if i == j:
                        total = total + y[i] * y[j]
                else:
                    total = total + P[i][j] * y[i] * y[j]
        total = mc * total / h.h11(t)
        if potential is not None:
            A = potential(t, x)
            for i in range(n):
                total = total + 2.0 * e_over_m * A[i] * y[i]
        if scalar is not None:
            total = total + scalar(t, x)
        return total

    def guard(t, x, y):
        return h.in_domain(t)

    return LagrangianSpec(n, evaluate, guard, "electrodynamics")


@dataclass(frozen=True)
class AdaptedFrame:
    """Coefficients of delta/delta t = d_t + kappa y^p d_{y^p} and
    delta/delta x^i = d_{x^i} - N^(p)_(1)i d_{y^p}."""

    N: np.ndarray
    kappa: float
    M: np.ndarray


@dataclass(frozen=True)
class Trajectory:
    t: np.ndarray
    x: np.ndarray
    y: np.ndarray
    step: float

    def __len__(self):
        return len(self.t)


# ---------------------------------------------------------------- batch kernels

def _as_batch(p):
    return np.array([p.t]), np.array([p.x]), np.array([p.y])


def _guard(lag, h, t, x, y):
    ok = h.in_domain(t)
    if lag.domain_guard is not None:
        ok = ok & lag.domain_guard(t, x, y)
    if not np.all(ok):
        b = int(np.argmin(ok))
        raise DomainError(
            "point outside the Lagrangian domain (G11 <= 0 or t invalid)",
            JetPoint(t[b], x[b], y[b]).as_dict())


def _derivs(lag, t, x, y):
    n = lag.n
    pts = np.concatenate([t[:, None], x, y], axis=-1)
    return ad.value_grad_hess(lambda *v: lag.evaluate(v[0], v[1:1 + n], v[1 + n:]), pts)


def _time_metric(h, t):
    """h_11 and kappa = (1/2h_11) dh_11/dt from a one-variable jet of h_11."""
    h11, dh, _ = ad.value_grad_hess(h.h11, t[:, None])
    if np.any(h11 <= 0):
        raise DomainError("h_11 <= 0")
    return h11, 0.5 * dh[:, 0] / h11


def _metric(lag, h, t, x, y):
    n = lag.n
    _, _, hess = _derivs(lag, t, x, y)
    h11, _ = _time_metric(h, t)
    g = 0.5 * h11[:, None, None] * hess[:, 1 + n:, 1 + n:]
    return 0.5 * (g + np.swapaxes(g, -1, -2))


def _inverse(g):
    try:
        return invert_symmetric(g)
    except SingularMatrix as exc:
        raise NonInvertibleMetric(f"fundamental tensor not invertible: {exc}") from None


def _semispray(lag, h, t, x, y):
    n = lag.n
    _, grad, hess = _derivs(lag, t, x, y)
    h11, kappa = _time_metric(h, t)
    g = 0.5 * h11[:, None, None] * hess[:, 1 + n:, 1 + n:]
    g = 0.5 * (g + np.swapaxes(g, -1, -2))
    ginv = _inverse(g)
    Lx = grad[:, 1:1 + n]
    Ly = grad[:, 1 + n:]
    Lxy = hess[:, 1:1 + n, 1 + n:]  # [m, k] = d2L / dx^m dy^k
    Lty = hess[:, 0, 1 + n:]
    bracket = (np.einsum("bmk,bm->bk", Lxy, y) - Lx + Lty
               + Ly * kappa[:, None]
               + 2.0 * (kappa / h11)[:, None] * np.einsum("bkm,bm->bk", g, y))
    G = 0.25 * h11[:, None] * np.einsum("bik,bk->bi", ginv, bracket)
    H = -0.5 * kappa[:, None] * y
    return H, G


def _partials(fn, t, x, y, block, rel_step=FD_STEP):
    """Derivatives of ``fn(t, x, y)`` (batched) along every coordinate of
    ``block`` ('t', 'x' or 'y'); the derivative index is appended last."""
    coords = t[:, None] if block == "t" else (x if block == "x" else y)
    B, m = coords.shape
    step = rel_step * (1.0 + np.abs(coords))  # (B, m)
    P = len(_OFFSETS)
    shift = (_OFFSETS[:, None, None, None] * np.eye(m)[None, :, None, :]
             * step.T[None, :, :, None])  # (P, m, B, m)
    moved = (coords[None, None] + shift).reshape(-1, m)
    tt = np.broadcast_to(t, (P, m, B)).reshape(-1)
    xx = np.broadcast_to(x, (P, m) + x.shape).reshape(-1, x.shape[-1])
    yy = np.broadcast_to(y, (P, m) + y.shape).reshape(-1, y.shape[-1])
    if block == "t":
        tt = moved[:, 0]
    elif block == "x":
        xx = moved
    else:
        yy = moved
    out = fn(tt, xx, yy)
    out = out.reshape((P, m, B) + out.shape[1:])
    # differences first, so a field constant along the stencil gives exactly 0
    half = P // 2
    d = sum(w * (out[half + k] - out[half - 1 - k]) for k, w in enumerate(_STENCIL_W))
    d = d / step.T.reshape((m, B) + (1,) * (d.ndim - 2))
    return np.moveaxis(d, 0, -1)


def _nonlinear(lag, h, t, x, y):
    """N[i, j] = dG^i / dy^j."""
    return _partials(lambda a, b, c: _semispray(lag, h, a, b, c)[1], t, x, y, "y")


def _delta_x(field_fn, N, t, x, y, rel_step=OUTER_STEP):
    """delta/delta x^k of a field: d_k f - N^p_k d_{y^p} f (k appended last)."""
    dx = _partials(field_fn, t, x, y, "x", rel_step)
    dy = _partials(field_fn, t, x, y, "y", rel_step)
    return dx - np.einsum("b...p,bpk->b...k", dy, N)


def _cartan(lag, h, t, x, y):
    """(G^k_j1, L^i_jk, C^i_j(k)) of the Cartan canonical connection."""
    metric = lambda a, b, c: _metric(lag, h, a, b, c)
    g = metric(t, x, y)
    ginv = _inverse(g)
    N = _nonlinear(lag, h, t, x, y)
    _, kappa = _time_metric(h, t)
    dgx = _partials(metric, t, x, y, "x")
    dgy = _partials(metric, t, x, y, "y")
    dgt = _partials(metric, t, x, y, "t")[..., 0]
    Dg = dgx - np.einsum("zabp,zpk->zabk", dgy, N)  # delta g_ab / delta x^k
    Dt = dgt + kappa[:, None, None] * np.einsum("zabp,zp->zab", dgy, y)

    def christoffel(D):
        A = (np.einsum("bjmk->bmjk", D) + np.einsum("bkmj->bmjk", D)
             - np.einsum("bjkm->bmjk", D))
        return 0.5 * np.einsum("bim,bmjk->bijk", ginv, A)

    Gk = 0.5 * np.einsum("bkm,bmj->bkj", ginv, Dt)
    return Gk, christoffel(Dg), christoffel(dgy)


def _torsion(lag, h, t, x, y, N=None):
    if N is None:
        N = _nonlinear(lag, h, t, x, y)
    D = _delta_x(lambda a, b, c: _nonlinear(lag, h, a, b, c), N, t, x, y)
    return D - np.swapaxes(D, -1, -2)


def _curvature(lag, h, t, x, y, N=None, L=None, C=None, T=None):
    """R^l_ijk; already computed N, L, C and torsion may be passed in."""
    if N is None:
        N = _nonlinear(lag, h, t, x, y)
    if L is None or C is None:
        _, L, C = _cartan(lag, h, t, x, y)
    if T is None:
        T = _torsion(lag, h, t, x, y, N)
    DL = _delta_x(lambda a, b, c: _cartan(lag, h, a, b, c)[1], N, t, x, y)
    return (DL - np.swapaxes(DL, -1, -2)
            + np.einsum("brij,blrk->blijk", L, L)
            - np.einsum("brik,blrj->blijk", L, L)
            + np.einsum("blir,brjk->blijk", C, T))


def _em_2form(lag, h, t, x, y):
    g = _metric(lag, h, t, x, y)
    N = _nonlinear(lag, h, t, x, y)
    _, L, _ = _cartan(lag, h, t, x, y)
    h11, _ = _time_metric(h, t)
    A = g @ N  # [j, i] = g_jr N^r_i
    gLy = g @ np.einsum("brjm,bm->brj", L, y)  # [i, j] = g_ir L^r_jm y^m
    F = (np.swapaxes(A, -1, -2) - A + gLy - np.swapaxes(gLy, -1, -2))
    return 0.5 * F / h11[:, None, None]


# ---------------------------------------------------------------- public API

def metric_from_lagrangian(L, p, h):
    """g_ij = (h_11/2) d^2 L / dy^i dy^j at ``p``."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    return _metric(L, h, t, x, y)[0]


def semispray(L, p, h):
    """(H, G): H^(i) = -kappa y^i / 2 and the G^(i) bracket formula."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    H, G = _semispray(L, h, t, x, y)
    return H[0], G[0]


def nonlinear_from_semispray(L, p, h):
    """Adapted frame with N = dG/dy and M = 2H."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    H, _ = _semispray(L, h, t, x, y)
    _, kappa = _time_metric(h, t)
    return AdaptedFrame(N=_nonlinear(L, h, t, x, y)[0], kappa=float(kappa[0]),
                        M=2.0 * H[0])


def cartan_from_metric(L, p, h):
    """Cartan connection components ``(Gk_j1, L3, C)`` from delta-derivatives of g."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    Gk, L3, C = _cartan(L, h, t, x, y)
    return Gk[0], L3[0], C[0]


def torsion_generic(L, p, h):
    """R^(l)_(1)jk = delta N^l_j / delta x^k - delta N^l_k / delta x^j."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    return _torsion(L, h, t, x, y)[0]


def curvature_suite(L, p, h):
    """``(R4, ricci, scalarR)``: the h-curvature with its Ricci and scalar traces."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    R4 = _curvature(L, h, t, x, y)[0]
    ginv = _inverse(_metric(L, h, t, x, y))[0]
    ric = np.einsum("mijm->ij", R4)
    return R4, ric, float(np.einsum("pq,pq->", ginv, ric))


def em_2form(L, p, h):
    """Electromagnetic components F^(1)_(i)j (antisymmetric)."""
    t, x, y = _as_batch(p)
    _guard(L, h, t, x, y)
    return _em_2form(L, h, t, x, y)[0]


# ---------------------------------------------------------------- extremals

def _acceleration(L, h, t, x, y):
    H, G = _semispray(L, h, np.array([t]), x[None], y[None])
    return -2.0 * (H[0] + G[0])


def integrate_extremal(L, h, start, t_end, steps):
    """Fixed-step RK4 for x'' + 2H + 2G = 0 starting at ``start``."""
    if steps < 2:
        raise ValueError("steps must be >= 2")
    t0 = start.t
    dt = (t_end - t0) / steps
    ts = t0 + dt * np.arange(steps + 1)
    xs = np.empty((steps + 1, L.n))
    ys = np.empty((steps + 1, L.n))
    xs[0], ys[0] = start.x, start.y

    def rhs(t, x, y):
        tb, xb, yb = np.array([t]), x[None], y[None]
        ok = h.in_domain(tb)
        if L.domain_guard is not None:
            ok = ok & L.domain_guard(tb, xb, yb)
        if not ok[0]:
            raise DomainError("trajectory left the domain")
        return y, _acceleration(L, h, t, x, y)

    for s in range(steps):
        t, x, y = ts[s], xs[s], ys[s]
        try:
            k1x, k1y = rhs(t, x, y)
            k2x, k2y = rhs(t + dt / 2, x + dt / 2 * k1x, y + dt / 2 * k1y)
            k3x, k3y = rhs(t + dt / 2, x + dt / 2 * k2x, y + dt / 2 * k2y)
            k4x, k4y = rhs(t + dt, x + dt * k3x, y + dt * k3y)
        except DomainError:
            raise DomainExit("extremal left the domain (G11 <= 0)", float(t),
                             JetPoint(t, x, y).as_dict()) from None
        except SingularMatrix as exc:
            raise NonInvertibleMetric(f"{exc} (extremal step from t = {float(t)!r})") from None
        xs[s + 1] = x + dt / 6 * (k1x + 2 * k2x + 2 * k3x + k4x)
        ys[s + 1] = y + dt / 6 * (k1y + 2 * k2y + 2 * k3y + k4y)
    return Trajectory(ts, xs, ys, dt)


def _five_point_derivative(samples, dt):
    return (samples[:-4] - 8 * samples[1:-3] + 8 * samples[3:-1] - samples[4:]) / (12 * dt)


def el_residual(L, h, traj):
    """|x'' + 2H + 2G| at interior nodes, x'' from a five-point stencil on y.

    Returns an array of shape (len(traj) - 4, n).
    """
    acc = _five_point_derivative(traj.y, traj.step)
    idx = range(2, len(traj) - 2)
    want = np.array([_acceleration(L, h, traj.t[i], traj.x[i], traj.y[i]) for i in idx])
    return np.abs(acc - want)


def velocity_defect(traj):
    """max |y - dx/dt| with dx/dt from a five-point stencil on x."""
    return float(np.max(np.abs(_five_point_derivative(traj.x, traj.step) - traj.y[2:-2])))


def action_integral(L, h, traj):
    """Composite Simpson value of the energy functional  int L(t, x, x') sqrt(h_11) dt."""
    if len(traj) < 2 or traj.t[-1] == traj.t[0]:
        return 0.0
    t = traj.t
    ok = h.in_domain(t)
    if L.domain_guard is not None:
        ok = ok & L.domain_guard(t, traj.x, traj.y)
    if not np.all(ok):
        raise DomainError("trajectory sample outside the domain")
    values = np.asarray(L.evaluate(t, list(traj.x.T), list(traj.y.T)), dtype=float)
    integrand = np.broadcast_to(values, t.shape) * np.sqrt(
        np.broadcast_to(np.asarray(h.h11(t), dtype=float), t.shape))
    return float(scipy.integrate.simpson(integrand, x=t))


def perturbed(traj, bump, bump_dot, eps):
    """The trajectory x + eps*bump(t), x' + eps*bump_dot(t)."""
    return Trajectory(traj.t, traj.x + eps * bump(traj.t), traj.y + eps * bump_dot(traj.t),
                      traj.step)


def sine_bump(t0, t1, direction):
    """A variation vanishing at both ends: sin(pi (t - t0)/(t1 - t0)) * direction."""
    w = math.pi / (t1 - t0)
    v = np.asarray(direction, dtype=float)
    return (lambda t: np.sin(w * (t - t0))[:, None] * v,
            lambda t: (w * np.cos(w * (t - t0)))[:, None] * v)
