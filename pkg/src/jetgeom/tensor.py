"""Dense index arithmetic for d-tensors.

Storage is 0-based numpy arrays; mathematical indices 1..n map to 0..n-1.
Shapes and index order:

    sym matrix   (n, n)          g_ij, g^ij, R_ij
    rank 3       (n, n, n)       L[i, j, k] = L^i_jk
    rank 4       (n, n, n, n)    R[l, i, j, k] = R^l_ijk

Every function accepts extra leading batch axes.
"""

import numpy as np
import scipy.linalg

from .errors import SingularMatrix
from .tolerances import DEFAULT


def sym_matrix(entries, tol=DEFAULT.sym):
    """Validate and return an exactly symmetric read-only copy of ``entries``."""
    m = np.array(entries, dtype=float)
    if m.ndim < 2 or m.shape[-1] != m.shape[-2]:
        raise ValueError(f"expected square matrix, got shape {m.shape}")
    mt = np.swapaxes(m, -1, -2)
    scale = max(1.0, float(np.max(np.abs(m), initial=0.0)))
    defect = float(np.max(np.abs(m - mt), initial=0.0))
    if defect > tol * scale:
        raise ValueError(f"matrix not symmetric (defect {defect:.3e})")
    m = 0.5 * (m + mt)
    m.setflags(write=False)
    return m


def invert_symmetric(m, eps_det=DEFAULT.det):
    """Inverse of a symmetric matrix (or a stack of them).

    LU with partial pivoting; a pivot smaller than ``eps_det * max|m|``
    raises :class:`SingularMatrix`. The result is re-symmetrized.
    """
    m = np.asarray(m, dtype=float)
    n = m.shape[-1]
    if m.shape[-2] != n or n > 16:
        raise ValueError(f"unsupported matrix shape {m.shape}")
    scale = np.max(np.abs(m), axis=(-2, -1))
    _, _, u = scipy.linalg.lu(m)
    pivots = np.abs(np.diagonal(u, axis1=-2, axis2=-1))
    bad = np.min(pivots, axis=-1) <= eps_det * scale
    if np.any(bad) or np.any(scale == 0):
        raise SingularMatrix("pivot below threshold during inversion")
    r = np.linalg.inv(m)
    return 0.5 * (r + np.swapaxes(r, -1, -2))


def contract_trace(t):
    """result[i, j] = sum_m t[m, i, j, m] (upper index with the last lower one)."""
    return np.einsum("...mijm->...ij", np.asarray(t, dtype=float))


def identity_defect(m, r):
    """max |m r - I|, used by the multiply-back checks."""
    n = m.shape[-1]
    return float(np.max(np.abs(m @ r - np.eye(n))))
