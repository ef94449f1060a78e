"""Closed-form geometry of the jet conformal Minkowski (JCM) metric

    F(t, x, y) = exp(sigma(x)) * sqrt(h^11(t)) * sqrt(G11(y)),
    G11(y)     = sum_{i<j} y^i y^j,

on the 1-jet space J^1(R, M^4). Every object here is evaluated from the
explicit formulas; :mod:`jetgeom.generic` re-derives them from F^2.

Index storage follows :mod:`jetgeom.tensor`; ``N[i, j]`` is N^(i)_(1)j.
"""

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError, SignatureMismatch
from .inputs import DIM, eval_h, eval_sigma
from .tensor import contract_trace, sym_matrix
from .tolerances import DEFAULT

_I = np.eye(DIM)
_OFF = 1.0 - _I  # 1 - delta_ij


@dataclass(frozen=True)
class JetPoint:
    """A point (t; x^1..x^4; y^1_1..y^4_1) of J^1(R, M^4)."""

    t: float
    x: tuple
    y: tuple

    def __post_init__(self):
        object.__setattr__(self, "t", float(self.t))
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y):
            raise ValueError("x and y must have the same dimension")

    @property
    def xa(self):
        return np.array(self.x)

    @property
    def ya(self):
        return np.array(self.y)

    def as_dict(self):
        return {"t": self.t, "x": list(self.x), "y": list(self.y)}


@dataclass(frozen=True)
class QuadraticFormEval:
    G11: float
    S: float
    G_i1: np.ndarray
    G_ij: np.ndarray


def quad_form(y):
    """G11(y) with S = sum y^i, G_i1 = dG11/dy^i and G_ij = 1 - delta_ij."""
    y = np.asarray(y, dtype=float)
    S = float(y.sum())
    return QuadraticFormEval(
        G11=0.5 * (S * S - float(y @ y)),
        S=S,
        G_i1=S - y,
        G_ij=_OFF.copy(),
    )


def check_domain(y, eps=DEFAULT.dom):
    G11 = quad_form(y).G11
    if not G11 > eps:
        raise DomainError(f"G11 <= 0 (G11 = {G11!r}), outside the JCM metric domain",
                          tuple(float(v) for v in y))
    return G11


def jcm_F(p, sigma, h):
    """exp(sigma) * sqrt(h^11) * sqrt(G11)."""
    G11 = check_domain(p.y)
    he = eval_h(h, p.t)
    return math.exp(sigma(p.x)) * math.sqrt(he.h11_inv) * math.sqrt(G11)


def fundamental_metric(x, sigma):
    """g_ij = e^{2 sigma}/2 (1 - delta_ij) and its inverse 2 e^{-2 sigma}/3 (1 - 3 delta)."""
    s = eval_sigma(sigma, x).value
    g = sym_matrix(0.5 * math.exp(2 * s) * _OFF)
    ginv = sym_matrix((2.0 / 3.0) * math.exp(-2 * s) * (1.0 - 3.0 * _I))
    return g, ginv


def nonlinear_connection(p, sigma, h):
    """Canonical nonlinear connection (M, N).

    M^(i)_(1)1 = -kappa y^i and
    N^(i)_(1)j = s_j y^i + (s.y) delta^i_j + (s_i - div/3)(S - y^j),
    with s = grad sigma. The last term is taken as printed: i rides on s_i.
    """
    y = p.ya
    se = eval_sigma(sigma, p.x)
    kappa = eval_h(h, p.t).kappa
    s = se.grad
    M = -kappa * y
    N = (np.outer(y, s) + float(s @ y) * _I
         + np.outer(s - se.div_D / 3.0, y.sum() - y))
    return M, N


def cartan_L(x, sigma):
    """L^i_jk = d^i_j s_k + d^i_k s_j + (1 - d_jk) s_i - (1 - d_jk) div/3."""
    se = eval_sigma(sigma, x)
    s = se.grad
    return (np.einsum("ij,k->ijk", _I, s) + np.einsum("ik,j->ijk", _I, s)
            + np.einsum("jk,i->ijk", _OFF, s - se.div_D / 3.0))


def curvature_frak(x, sigma):
    """The single effective curvature d-tensor, frakR[l, i, j, k] = R^l_ijk."""
    se = eval_sigma(sigma, x)
    s, ds = se.grad, se.div_D_grad
    div = se.div_D
    P = se.hess - np.outer(s, s)  # sigma_ij - sigma_i sigma_j
    d = _I
    off = _OFF
    R = (np.einsum("jl,ik->lijk", d, P) - np.einsum("kl,ij->lijk", d, P)
         + np.einsum("ij,lk->lijk", off, P) - np.einsum("ik,lj->lijk", off, P))
    # (div/3)(s_k - s_j + d_ik s_j - d_ij s_k), independent of l
    t5 = (s[None, None, :] - s[None, :, None]
          + np.einsum("ik,j->ijk", d, s) - np.einsum("ij,k->ijk", d, s))
    R += (div / 3.0) * t5[None]
    # (|grad s|^2 - div^2/3)(d^l_k - d^l_j + d_ik d^l_j - d_ij d^l_k)
    t6 = (np.einsum("kl,ij->lijk", d, np.ones((DIM, DIM)))
          - np.einsum("jl,ik->lijk", d, np.ones((DIM, DIM)))
          + np.einsum("ik,jl->lijk", d, d) - np.einsum("ij,kl->lijk", d, d))
    R += (se.grad_norm2 - div**2 / 3.0) * t6
    # (1/3)(D_j - D_k + d_ij D_k - d_ik D_j) with D = grad(div D_sigma)
    t7 = (ds[None, :, None] - ds[None, None, :]
          + np.einsum("ij,k->ijk", d, ds) - np.einsum("ik,j->ijk", d, ds))
    R += t7[None] / 3.0
    # exact antisymmetry in (j, k)
    return 0.5 * (R - np.swapaxes(R, 2, 3))


def torsion(p, sigma):
    """R^(l)_(1)jk = frakR^l_pjk y^p."""
    return np.einsum("lpjk,p->ljk", curvature_frak(p.x, sigma), p.ya)


def ricci(x, sigma):
    """R_ij = -2(s_ij - s_i s_j) + (1 - d_ij)/3 [3 lap + 6|grad|^2 - 2 div^2 - frakS]."""
    se = eval_sigma(sigma, x)
    bracket = (3 * se.laplacian + 6 * se.grad_norm2 - 2 * se.div_D**2 - se.frakS)
    return sym_matrix(-2.0 * (se.hess - np.outer(se.grad, se.grad))
                      + _OFF * bracket / 3.0)


def scalar_curvature(x, sigma):
    """R = 4 e^{-2 sigma} [3 lap + 3|grad|^2 - div^2 - frakS]."""
    se = eval_sigma(sigma, x)
    return 4.0 * math.exp(-2 * se.value) * (
        3 * se.laplacian + 3 * se.grad_norm2 - se.div_D**2 - se.frakS)


MINKOWSKI_SIGNATURE = np.array([1.0, -1.0, -1.0, -1.0])


def minkowski_transform(tol=1e-12):
    """The constant A with A^T Q A = diag(1, -1, -1, -1), Q_ij = (1 - delta_ij)/2.

    Returns ``(A, signature)``; raises :class:`SignatureMismatch` if the
    product deviates from the canonical form by more than ``tol``.
    """
    r6, r3 = math.sqrt(6.0), math.sqrt(3.0)
    A = np.array([
        [1 / r6, -1 / r3, 1.0, -1 / r6],
        [1 / r6, 2 / r3, 0.0, -1 / r6],
        [1 / r6, 0.0, 0.0, 3 / r6],
        [1 / r6, -1 / r3, -1.0, -1 / r6],
    ])
    deviation = float(np.max(np.abs(A.T @ (0.5 * _OFF) @ A - np.diag(MINKOWSKI_SIGNATURE))))
    if deviation > tol:
        raise SignatureMismatch(f"A^T Q A deviates from diag(1,-1,-1,-1) by {deviation:.3e}")
    return A, MINKOWSKI_SIGNATURE.copy()


@dataclass(frozen=True)
class GeometryBundle:
    g: np.ndarray
    ginv: np.ndarray
    M: np.ndarray
    N: np.ndarray
    L: np.ndarray
    frakR: np.ndarray
    torsion: np.ndarray
    ricci: np.ndarray
    scalarR: float


def geometry_bundle(p, sigma, h):
    """Every closed-form object at ``p``; the point must lie in the metric domain."""
    check_domain(p.y)
    g, ginv = fundamental_metric(p.x, sigma)
    M, N = nonlinear_connection(p, sigma, h)
    R4 = curvature_frak(p.x, sigma)
    return GeometryBundle(
        g=g,
        ginv=ginv,
        M=M,
        N=N,
        L=cartan_L(p.x, sigma),
        frakR=R4,
        torsion=np.einsum("lpjk,p->ljk", R4, p.ya),
        ricci=ricci(p.x, sigma),
        scalarR=scalar_curvature(p.x, sigma),
    )


def trace_ricci(x, sigma):
    """Ricci tensor as the contraction of frakR, the route the closed form must match."""
    return contract_trace(curvature_frak(x, sigma))
