"""Gravitational and electromagnetic field layer of the JCM model.

The adapted metric G = h_11 dt(x)dt + g_ij dx^i(x)dx^j + h^11 g_ij dy^i(x)dy^j
is block diagonal in the adapted frame, so its Einstein tensor splits into a
time block, a horizontal block, a vertical block and six mixed blocks that
must vanish.
"""

from dataclasses import dataclass

import numpy as np

from .errors import InvalidConstant
from .inputs import DIM, eval_h
from .jcm import (cartan_L, check_domain, fundamental_metric, nonlinear_connection,
                  ricci, scalar_curvature)


@dataclass(frozen=True)
class MetricEnsemble:
    h11: float
    g: np.ndarray
    vertical: np.ndarray  # h^11 g_ij
    N: np.ndarray         # coefficients of the delta y frame


@dataclass(frozen=True)
class EinsteinBlocks:
    G_ij: np.ndarray
    block_tt: float
    block_yy: np.ndarray
    zero_blocks: dict


@dataclass(frozen=True)
class StressEnergy:
    K: float
    T11_up: float
    T_mixed: np.ndarray
    Tyy_mixed: np.ndarray
    T_ij: np.ndarray
    zero_components: dict


@dataclass(frozen=True)
class ConservationResiduals:
    r_time: float
    r_space: np.ndarray
    r_fiber: np.ndarray
    divergence: np.ndarray  # (1/K)(g^mr R_ri - R/2 delta^m_i)_|m, reported only


def assemble_G(p, sigma, h):
    check_domain(p.y)
    he = eval_h(h, p.t)
    g, _ = fundamental_metric(p.x, sigma)
    _, N = nonlinear_connection(p, sigma, h)
    return MetricEnsemble(he.h11, g, he.h11_inv * g, N)


# (name, row block, column block) in the adapted frame ordering t | x | y
_ZERO_BLOCKS = (
    ("T_1i", "t", "x"),
    ("T_i1", "x", "t"),
    ("T^(1)_(i)1", "y", "t"),
    ("T_1(i)^(1)", "t", "y"),
    ("T_i(j)^(1)", "x", "y"),
    ("T^(1)_(i)j", "y", "x"),
)
_SLICES = {"t": slice(0, 1), "x": slice(1, 1 + DIM), "y": slice(1 + DIM, 1 + 2 * DIM)}


def _adapted(tt, xx, yy):
    m = np.zeros((1 + 2 * DIM, 1 + 2 * DIM))
    m[_SLICES["t"], _SLICES["t"]] = tt
    m[_SLICES["x"], _SLICES["x"]] = xx
    m[_SLICES["y"], _SLICES["y"]] = yy
    return m


def einstein_blocks(x, t, sigma, h):
    """Ric - (R/2) G written blockwise in the adapted frame."""
    he = eval_h(h, t)
    g, _ = fundamental_metric(x, sigma)
    R = scalar_curvature(x, sigma)
    ric = ricci(x, sigma)
    zeros = np.zeros((DIM, DIM))
    # only the horizontal Ricci block is effective for this connection
    E = _adapted(0.0, ric, zeros) - 0.5 * R * _adapted(he.h11, g, he.h11_inv * g)
    zero_blocks = {name: E[_SLICES[r], _SLICES[c]].squeeze()
                   for name, r, c in _ZERO_BLOCKS}
    return EinsteinBlocks(
        G_ij=E[_SLICES["x"], _SLICES["x"]],
        block_tt=float(E[0, 0]),
        block_yy=E[_SLICES["y"], _SLICES["y"]],
        zero_blocks=zero_blocks,
    )


def stress_energy(x, t, sigma, h, K=1.0):
    """Stress-energy d-tensor components implied by the Einstein equations."""
    if K == 0:
        raise InvalidConstant("the Einstein constant K must be non-zero")
    he = eval_h(h, t)
    _, ginv = fundamental_metric(x, sigma)
    R = scalar_curvature(x, sigma)
    eb = einstein_blocks(x, t, sigma, h)
    z = {name: block / K for name, block in eb.zero_blocks.items()}
    zero_components = {
        "T^m_1": ginv @ z["T_i1"],
        "T^(m)_(1)1": he.h11 * ginv @ z["T^(1)_(i)1"],
        "T^1_i": he.h11_inv * z["T_1i"],
        "T^1(1)_(i)": he.h11_inv * z["T_1(i)^(1)"],
        "T^(m)_(1)i": he.h11 * ginv @ z["T^(1)_(i)j"],
        "T^m(1)_(i)": ginv @ z["T_i(j)^(1)"],
    }
    return StressEnergy(
        K=float(K),
        T11_up=he.h11_inv * eb.block_tt / K,
        T_mixed=ginv @ eb.G_ij / K,
        Tyy_mixed=-(R / (2 * K)) * np.eye(DIM),
        T_ij=eb.G_ij / K,
        zero_components=zero_components,
    )


def _einstein_mixed(x, sigma):
    _, ginv = fundamental_metric(x, sigma)
    return ginv @ ricci(x, sigma) - 0.5 * scalar_curvature(x, sigma) * np.eye(DIM)


def covariant_divergence(mixed, x, sigma, step):
    """A^m_{i|m} = dA^m_i/dx^m + A^r_i L^m_rm - A^m_r L^r_im for an x-only field.

    ``mixed(x)`` returns A[m, i]; the x-derivatives use five-point central
    differences with step ``step * (1 + |x^m|)``.
    """
    x = np.asarray(x, dtype=float)
    L = cartan_L(x, sigma)
    A = mixed(x)
    div = np.zeros(DIM)
    for m in range(DIM):
        dx = step * (1.0 + abs(x[m]))

        def at(k):
            xs = x.copy()
            xs[m] += k * dx
            return mixed(xs)[m]

        div += (8.0 * (at(1) - at(-1)) - (at(2) - at(-2))) / (12.0 * dx)
    trace = np.einsum("mrm->r", L)
    return div + A.T @ trace - np.einsum("mr,rim->i", A, L)


def conservation_residuals(x, t, sigma, h, K=1.0, y=None, steps=(1e-4, 5e-5)):
    """Residuals of the three conservation laws of the stress-energy d-tensor.

    The horizontal law is checked with two independent stencils: the
    divergence of T (first step) against the divergence of the Einstein
    tensor divided by K (second step).
    """
    if K == 0:
        raise InvalidConstant("the Einstein constant K must be non-zero")
    x = np.asarray(x, dtype=float)
    y = np.ones(DIM) if y is None else np.asarray(y, dtype=float)
    kappa = eval_h(h, t).kappa

    def R_at(tt, xx, yy):
        # R is a function on the jet space that happens to depend on x alone
        return scalar_curvature(xx, sigma)

    dt = 1e-4 * (1.0 + abs(t))
    dRdt = (R_at(t + dt, x, y) - R_at(t - dt, x, y)) / (2 * dt)
    dRdy = np.zeros(DIM)
    for p in range(DIM):
        dy = 1e-4 * (1.0 + abs(y[p]))
        yp, ym = y.copy(), y.copy()
        yp[p] += dy
        ym[p] -= dy
        dRdy[p] = (R_at(t, x, yp) - R_at(t, x, ym)) / (2 * dy)
    r_time = -(dRdt + kappa * float(y @ dRdy)) / (2 * K)
    r_fiber = -dRdy / (2 * K)

    lhs = covariant_divergence(lambda xx: stress_energy(xx, t, sigma, h, K).T_mixed,
                               x, sigma, steps[0])
    rhs = covariant_divergence(lambda xx: _einstein_mixed(xx, sigma), x, sigma, steps[1]) / K
    return ConservationResiduals(float(r_time), lhs - rhs, r_fiber, rhs)


def em_2form_jcm(p, sigma, h):
    """F^(1)_(i)j = h^11/2 [g_jr N^r_i - g_ir N^r_j + (g_ir L^r_jm - g_jr L^r_im) y^m]."""
    check_domain(p.y)
    he = eval_h(h, p.t)
    g, _ = fundamental_metric(p.x, sigma)
    _, N = nonlinear_connection(p, sigma, h)
    L = cartan_L(p.x, sigma)
    A = g @ N
    gLy = g @ np.einsum("rjm,m->rj", L, p.ya)
    return 0.5 * he.h11_inv * (A.T - A + gLy - gLy.T)
