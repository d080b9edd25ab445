"""Finite matrix realisations of the grading, odd and even operators, with
closed-form evaluations of the sign operator, the beta-flow solution, the
unitary that separates energies and the resulting block-diagonal Hamiltonian.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
import scipy.linalg as sla

__all__ = [
    "MatrixModel",
    "Degenerate",
    "SingularSpectrum",
    "IllConditioned",
    "EigenvalueMinusOne",
    "BranchFailure",
    "build_model",
    "hfunc",
    "sign_operator",
    "exact_z",
    "riccati_residual",
    "eriksen_t",
    "eriksen_ue",
    "nw_exact",
    "hermitian_sqrt",
    "flow_unitary",
    "special_class_z0",
    "off_block_norm",
    "norm",
]

SPECTRAL_GAP = 1e-6
Z_GUARD = 40.0


class Degenerate(RuntimeError):
    pass


class SingularSpectrum(ArithmeticError):
    pass


class IllConditioned(ArithmeticError):
    pass


class EigenvalueMinusOne(ArithmeticError):
    pass


class BranchFailure(ArithmeticError):
    pass


def norm(a) -> float:
    """Frobenius norm, used for every residual in this module."""
    return float(np.linalg.norm(a))


@dataclass(frozen=True, eq=False)
class MatrixModel:
    dim: int
    seed: int
    kappa: float
    beta: np.ndarray
    o_mat: np.ndarray
    e_mat: np.ndarray

    @property
    def h(self) -> np.ndarray:
        return self.beta + self.kappa * self.o_mat + self.kappa**2 * self.e_mat

    @property
    def beta_diag(self) -> np.ndarray:
        return np.real(np.diag(self.beta)).copy()

    def with_kappa(self, kappa: float) -> "MatrixModel":
        return MatrixModel(self.dim, self.seed, kappa, self.beta, self.o_mat, self.e_mat)


def _hermitize(a):
    return (a + a.conj().T) / 2


def _draw(rng, m, special_class):
    def block():
        return rng.uniform(-1, 1, (m, m)) + 1j * rng.uniform(-1, 1, (m, m))

    n = 2 * m
    o = np.zeros((n, n), complex)
    c = block()
    o[:m, m:] = c
    o[m:, :m] = c.conj().T
    e = np.zeros((n, n), complex)
    e[:m, :m] = _hermitize(block())
    e[m:, m:] = _hermitize(block())
    o /= np.linalg.norm(o)
    if special_class:
        e[:] = 0
    else:
        e /= np.linalg.norm(e)
    return o, e


def build_model(dim: int, seed: int, kappa: float, special_class: bool = False) -> MatrixModel:
    """Random model with ``|O|_F = |E|_F = 1``; ``special_class`` sets E to zero."""
    if dim < 4 or dim % 2:
        raise ValueError("dim must be even and at least 4")
    m = dim // 2
    rng = np.random.default_rng(seed)
    beta = np.diag(np.r_[np.ones(m), -np.ones(m)]).astype(complex)
    for _ in range(8):
        o, e = _draw(rng, m, special_class)
        model = MatrixModel(dim, seed, float(kappa), beta, o, e)
        if np.min(np.abs(np.linalg.eigvalsh(model.h))) >= SPECTRAL_GAP:
            return model
    raise Degenerate(f"no invertible Hamiltonian after 8 draws (dim={dim}, seed={seed}, kappa={kappa})")


def hfunc(h: np.ndarray, fn) -> np.ndarray:
    """Apply a scalar function to a hermitian matrix through its eigenbasis."""
    w, u = np.linalg.eigh(h)
    return (u * fn(w)) @ u.conj().T


def hermitian_sqrt(a: np.ndarray) -> np.ndarray:
    return hfunc(_hermitize(a), lambda w: np.sqrt(np.clip(w, 0, None)))


def _inv_sqrt(a: np.ndarray) -> np.ndarray:
    return hfunc(_hermitize(a), lambda w: 1 / np.sqrt(w))


def sign_operator(h: np.ndarray, tol: float = SPECTRAL_GAP) -> np.ndarray:
    w, u = np.linalg.eigh(h)
    if np.min(np.abs(w)) < tol:
        raise SingularSpectrum(f"eigenvalue {np.min(np.abs(w)):.3e} too close to zero")
    return (u * np.sign(w)) @ u.conj().T


def exact_z(model: MatrixModel, s: float, tol: float = 1e-8) -> np.ndarray:
    """``W b W^-1`` with ``W = cosh(2sH) b + sinh(2sH)``."""
    h, b = model.h, model.beta
    if s < 0:
        raise ValueError("s must be non-negative")
    if 2 * s * np.linalg.norm(h, 2) > Z_GUARD:
        raise OverflowError(f"2 s |H| exceeds {Z_GUARD}; compare with sign_operator instead")
    w, u = np.linalg.eigh(h)
    ud = u.conj().T
    wmat = (u * np.cosh(2 * s * w)) @ ud @ b + (u * np.sinh(2 * s * w)) @ ud
    # Z W = W b  <=>  W^T Z^T = (W b)^T
    rhs = wmat @ b
    z = np.linalg.solve(wmat.T, rhs.T).T
    resid = norm(z @ wmat - rhs) / max(norm(rhs), 1.0)
    if resid > tol:
        raise IllConditioned(f"W-solve residual {resid:.3e}")
    return z


def riccati_residual(model: MatrixModel, s: float, h: float) -> float:
    """|dZ/ds / 2 - (H - Z H Z)| with a centred difference of step ``h``."""
    ham = model.h
    dz = (exact_z(model, s + h) - exact_z(model, s - h)) / (2 * h)
    z = exact_z(model, s)
    return norm(dz / 2 - (ham - z @ ham @ z))


def eriksen_t(model: MatrixModel) -> np.ndarray:
    """``b (b + L) / sqrt((b + L)^2)``."""
    b = model.beta
    lam = sign_operator(model.h)
    _check_minus_one(b @ lam)
    x = b + lam
    return b @ x @ _inv_sqrt(x @ x)


def _check_minus_one(bl, tol=1e-8):
    ev = np.linalg.eigvals(bl)
    if np.min(np.abs(ev + 1)) < tol:
        raise EigenvalueMinusOne("b*L has an eigenvalue at -1")


def eriksen_ue(model: MatrixModel) -> np.ndarray:
    """Principal square root of ``b L``."""
    bl = model.beta @ sign_operator(model.h)
    _check_minus_one(bl)
    return sla.sqrtm(bl)


def nw_exact(model: MatrixModel) -> np.ndarray:
    t = eriksen_t(model)
    return t @ model.h @ t.conj().T


def flow_unitary(model: MatrixModel, s: float) -> np.ndarray:
    """``V(s) = (b + Z) / sqrt((b + Z)^2) b``; ``H(s) = V^+ H V``."""
    b = model.beta
    x = b + exact_z(model, s)
    return x @ _inv_sqrt(x @ x) @ b


def special_class_z0(model: MatrixModel, s: float, check: bool = True, tol: float = 1e-8) -> np.ndarray:
    """``tanh(2s sqrt(H^2) + artanh(b L)) L`` for a model whose E part vanishes."""
    if np.any(model.e_mat) and model.kappa:
        raise ValueError("special-class formula needs a model without even part")
    h, b = model.h, model.beta
    lam = sign_operator(h)
    bl = b @ lam
    ev, vec = np.linalg.eig(bl)
    # b*L is unitary, so its spectrum sits on the unit circle; artanh is
    # singular only at +1 and -1
    if np.min(np.abs(ev - 1)) < 1e-10 or np.min(np.abs(ev + 1)) < 1e-10:
        raise BranchFailure("artanh argument has an eigenvalue at +1 or -1")
    at = vec @ np.diag(np.arctanh(ev)) @ np.linalg.inv(vec)
    arg = 2 * s * hermitian_sqrt(h @ h) + at
    ew, ev2 = np.linalg.eig(arg)
    z0 = ev2 @ np.diag(np.tanh(ew)) @ np.linalg.inv(ev2) @ lam
    if check and 2 * s * np.linalg.norm(h, 2) <= Z_GUARD:
        gap = norm(z0 - exact_z(model, s))
        if gap > tol:
            raise ArithmeticError(f"special-class closed form differs from exact Z by {gap:.3e}")
    return z0


def off_block_norm(a: np.ndarray, beta_diag: np.ndarray) -> float:
    """Norm of the odd (off-block) part, i.e. |[b, a]| / 2."""
    mask = np.not_equal.outer(beta_diag, beta_diag)
    return float(np.linalg.norm(a[mask]))
