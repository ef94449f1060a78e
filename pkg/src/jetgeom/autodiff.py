"""Second-order forward-mode differentiation.

A :class:`Jet` carries a value together with its gradient and Hessian with
respect to ``k`` seeded variables. It is the multivariate form of a
hyper-dual number: one evaluation of a function on jets yields every first
and second partial derivative exactly (to rounding).

Values may carry leading batch axes: ``val`` has shape ``B``, ``grad``
``B + (k,)`` and ``hess`` ``B + (k, k)``. ``hess`` is ``None`` while it is
identically zero (seed variables), which saves most of the work in
products of seeds.

Functions written with ordinary arithmetic and the helpers in this module
(:func:`exp`, :func:`log`, :func:`sqrt`, :func:`sin`, :func:`cos`) accept
floats, numpy arrays and jets alike.
"""

import numpy as np


class Jet:
    __slots__ = ("val", "grad", "hess")
    __array_ufunc__ = None  # make numpy defer to the reflected operators

    def __init__(self, val, grad, hess):
        self.val = val
        self.grad = grad
        self.hess = hess

    @classmethod
    def seed(cls, values):
        """Independent variables from ``values`` of shape ``B + (k,)``.

        Returns a list of ``k`` jets, the i-th with unit gradient along i.
        """
        values = np.asarray(values, dtype=float)
        k = values.shape[-1]
        batch = values.shape[:-1]
        eye = np.eye(k)
        return [
            cls(values[..., i], np.broadcast_to(eye[i], batch + (k,)), None)
            for i in range(k)
        ]

    def __repr__(self):
        return f"Jet(val={self.val!r})"

    def _chain(self, f0, f1, f2):
        # f(u) with f' = f1, f'' = f2 evaluated at self.val
        g = self.grad
        f1 = np.asarray(f1)
        f2 = np.asarray(f2)
        hess = f2[..., None, None] * (g[..., :, None] * g[..., None, :])
        if self.hess is not None:
            hess = hess + f1[..., None, None] * self.hess
        return Jet(f0, f1[..., None] * g, hess)

    def __add__(self, other):
        if isinstance(other, Jet):
            return Jet(self.val + other.val, self.grad + other.grad,
                       _add_hess(self.hess, other.hess))
        return Jet(self.val + other, self.grad, self.hess)

    __radd__ = __add__

    def __neg__(self):
        return Jet(-self.val, -self.grad, None if self.hess is None else -self.hess)

    def __sub__(self, other):
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            a, b = self, other
            outer = a.grad[..., :, None] * b.grad[..., None, :]
            av = np.asarray(a.val)
            bv = np.asarray(b.val)
            hess = outer + np.swapaxes(outer, -1, -2)
            if b.hess is not None:
                hess = hess + av[..., None, None] * b.hess
            if a.hess is not None:
                hess = hess + bv[..., None, None] * a.hess
            return Jet(a.val * b.val, av[..., None] * b.grad + bv[..., None] * a.grad,
                       hess)
        c = np.asarray(other)
        return Jet(self.val * c, self.grad * c[..., None],
                   None if self.hess is None else self.hess * c[..., None, None])

    __rmul__ = __mul__

    def reciprocal(self):
        v = np.asarray(self.val)
        return self._chain(1.0 / v, -1.0 / v**2, 2.0 / v**3)

    def __truediv__(self, other):
        if isinstance(other, Jet):
            return self * other.reciprocal()
        return self * (1.0 / np.asarray(other))

    def __rtruediv__(self, other):
        return self.reciprocal() * other

    def __pow__(self, p):
        if isinstance(p, Jet):
            return exp(p * log(self))
        v = np.asarray(self.val)
        if p == 0:
            return Jet(np.ones_like(v), np.zeros_like(self.grad), None)
        if p == 1:
            return self
        if p == 2:
            return self * self
        return self._chain(v**p, p * v ** (p - 1), p * (p - 1) * v ** (p - 2))


def _add_hess(a, b):
    if a is None:
        return b
    if b is None:
        return a
    return a + b


def exp(u):
    if isinstance(u, Jet):
        e = np.exp(u.val)
        return u._chain(e, e, e)
    return np.exp(u)


def log(u):
    if isinstance(u, Jet):
        v = np.asarray(u.val)
        return u._chain(np.log(v), 1.0 / v, -1.0 / v**2)
    return np.log(u)


def sqrt(u):
    if isinstance(u, Jet):
        s = np.sqrt(u.val)
        return u._chain(s, 0.5 / s, -0.25 / (s * u.val))
    return np.sqrt(u)


def sin(u):
    if isinstance(u, Jet):
        s, c = np.sin(u.val), np.cos(u.val)
        return u._chain(s, c, -s)
    return np.sin(u)


def cos(u):
    if isinstance(u, Jet):
        s, c = np.sin(u.val), np.cos(u.val)
        return u._chain(c, -s, -c)
    return np.cos(u)


def value_grad_hess(f, point):
    """Value, gradient and Hessian of ``f(*vars)`` at ``point`` (shape B + (k,)).

    ``f`` receives the seeded variables as separate positional arguments.
    Constant results are promoted so the outputs always have full shape.
    """
    point = np.asarray(point, dtype=float)
    k = point.shape[-1]
    batch = point.shape[:-1]
    out = f(*Jet.seed(point))
    if not isinstance(out, Jet):
        v = np.broadcast_to(np.asarray(out, dtype=float), batch)
        return v.copy(), np.zeros(batch + (k,)), np.zeros(batch + (k, k))
    hess = np.zeros(batch + (k, k)) if out.hess is None else out.hess
    return (
        np.broadcast_to(out.val, batch).copy(),
        np.broadcast_to(out.grad, batch + (k,)).copy(),
        np.broadcast_to(hess, batch + (k, k)).copy(),
    )
