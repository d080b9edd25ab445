"""Evaluate symbolic series on matrix models and measure convergence orders.

Double precision is enough for the structural checks, but the sixth-order
truncation error at the smallest coupling sits near the rounding floor, so
the sweeps can run in mpmath at a chosen number of digits.
"""
from __future__ import annotations

import math

import mpmath
import numpy as np
import scipy.linalg as sla

from .algebra import OperatorExpr
from .expoly import NonConvergent
from .matrixlab import MatrixModel, build_model, nw_exact, norm
from .series import hnw_series, omega_u_limit

__all__ = [
    "FGeneratorPresent",
    "evaluate_symbolic",
    "nw_exact_mp",
    "convergence_sweep",
    "omega_u_unitary_check",
    "loglog_slope",
    "omega_u_sweep",
    "NonConvergent",
]


class FGeneratorPresent(ValueError):
    pass


class _Numpy:
    def __init__(self, model: MatrixModel):
        self.mats = {"b": model.beta, "O": model.o_mat, "E": model.e_mat}
        self.dim = model.dim

    def zeros(self):
        return np.zeros((self.dim, self.dim), complex)

    def eye(self):
        return np.eye(self.dim, dtype=complex)

    @staticmethod
    def mm(a, b):
        return a @ b

    @staticmethod
    def num(x):
        return float(x)

    exp = staticmethod(math.exp)


class _Mp:
    def __init__(self, model: MatrixModel, dps: int):
        self.ctx = mpmath.MPContext()
        self.ctx.dps = dps
        self.mats = {k: self.to_mp(v) for k, v in (("b", model.beta), ("O", model.o_mat), ("E", model.e_mat))}
        self.dim = model.dim

    def to_mp(self, a):
        ctx = self.ctx
        return ctx.matrix([[ctx.mpc(complex(x)) for x in row] for row in a])

    def zeros(self):
        return self.ctx.zeros(self.dim)

    def eye(self):
        return self.ctx.eye(self.dim)

    @staticmethod
    def mm(a, b):
        return a * b

    def num(self, x):
        return self.ctx.mpf(x)

    @property
    def exp(self):
        return self.ctx.exp


def _backend(model, dps):
    return _Numpy(model) if dps is None else _Mp(model, dps)


def evaluate_symbolic(expr: OperatorExpr, model: MatrixModel, s=math.inf, dps: int | None = None, _bk=None):
    """Matrix value of ``expr`` with each word scaled by ``kappa**weight``.

    ``s = inf`` uses coefficient limits.  With ``dps`` set the result is an
    mpmath matrix computed at that many digits.
    """
    if "F" in expr.generators():
        raise FGeneratorPresent("F has no matrix realisation")
    bk = _bk or _backend(model, dps)
    kappa = bk.num(model.kappa) if dps is None else bk.ctx.mpf(model.kappa)
    out = bk.zeros()
    cache = {(): bk.eye()}

    def word_matrix(symbols):
        if symbols in cache:
            return cache[symbols]
        m = bk.mm(word_matrix(symbols[:-1]), bk.mats[symbols[-1]])
        cache[symbols] = m
        return m

    for w, c in expr.items():
        if s == math.inf:
            val = c.limit()
            val = bk.num(val.numerator) / val.denominator
        else:
            val = c.evaluate(s if dps is None else bk.ctx.mpf(s), exp=bk.exp)
        symbols = (("b",) if w.beta else ()) + w.factors
        out = out + word_matrix(symbols) * (val * kappa**w.weight)
    return out


def nw_exact_mp(model: MatrixModel, dps: int = 40):
    """Energy-separated Hamiltonian computed in mpmath arithmetic."""
    bk = _Mp(model, dps)
    ctx = bk.ctx
    k = ctx.mpf(model.kappa)
    b = bk.mats["b"]
    h = b + bk.mats["O"] * k + bk.mats["E"] * k**2
    ev, q = ctx.eighe(h)
    n = model.dim
    lam = q * ctx.diag([ctx.sign(ev[i]) for i in range(n)]) * q.H
    x = b + lam
    ev2, q2 = ctx.eighe(x * x)
    inv_sqrt = q2 * ctx.diag([1 / ctx.sqrt(ev2[i]) for i in range(n)]) * q2.H
    t = b * x * inv_sqrt
    return t * h * t.H, bk


def _fro(a, bk=None):
    if isinstance(a, np.ndarray):
        return norm(a)
    return float(bk.ctx.mnorm(a, "f"))


def loglog_slope(kappas, errors) -> float:
    return float(np.polyfit(np.log(kappas), np.log(errors), 1)[0])


def convergence_sweep(dim: int, seed: int, kappas, orders=(2, 4, 6), dps: int | None = 40) -> dict:
    """Truncation errors |H_NW - (b + sum_{n<=N} h_n)| and their log-log slopes."""
    top = max(orders)
    h = hnw_series(top)
    errors = {n: [] for n in orders}
    for kappa in kappas:
        model = build_model(dim, seed, kappa)
        if dps is None:
            target, bk = nw_exact(model), _Numpy(model)
        else:
            target, bk = nw_exact_mp(model, dps)
        approx = bk.mats["b"]
        for n in range(1, top + 1):
            if not h[n].is_zero():
                approx = approx + evaluate_symbolic(h[n], model, math.inf, dps, _bk=bk)
            if n in orders:
                errors[n].append(_fro(target - approx, bk))
    slopes = {n: loglog_slope(kappas, errors[n]) for n in orders}
    return {"kappas": list(kappas), "errors": errors, "slopes": slopes}


def _expm(a, bk):
    if isinstance(a, np.ndarray):
        return sla.expm(a)
    return bk.ctx.expm(a)


def omega_u_unitary_check(model: MatrixModel, max_order: int = 5, dps: int | None = None) -> dict:
    """|[b, e^{-W} H e^{W}]| with ``W`` the evaluated generator limit."""
    g = omega_u_limit(max_order)
    bk = _backend(model, dps)
    w = bk.zeros()
    for n in g:
        if not g[n].is_zero():
            w = w + evaluate_symbolic(g[n], model, math.inf, dps, _bk=bk)
    b = bk.mats["b"]
    kappa = model.kappa if dps is None else bk.ctx.mpf(model.kappa)
    h = b + bk.mats["O"] * kappa + bk.mats["E"] * kappa**2
    u = _expm(w, bk)
    u_inv = _expm(w * -1, bk)
    rot = bk.mm(bk.mm(u_inv, h), u)
    off = _fro(bk.mm(b, rot) - bk.mm(rot, b), bk)
    unitarity = _fro(bk.mm(u, _adj(u)) - bk.eye(), bk)
    antiherm = _fro(w + _adj(w), bk)
    return {"kappa": model.kappa, "off_block": off, "unitarity": unitarity, "anti_hermitian": antiherm}


def _adj(a):
    return a.conj().T if isinstance(a, np.ndarray) else a.H


def omega_u_sweep(dim: int, seed: int, kappas, max_order: int = 5, dps: int | None = 40) -> dict:
    offs = [omega_u_unitary_check(build_model(dim, seed, k), max_order, dps)["off_block"] for k in kappas]
    return {"kappas": list(kappas), "off_block": offs, "slope": loglog_slope(kappas, offs)}

