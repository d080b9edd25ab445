"""Pure numpy RK4 stepper; same contract as the compiled kernel."""
import numpy as np


def _rhs(h, b):
    eta = (b[:, None] - b[None, :]) * h
    return eta @ h - h @ eta


def rk4_steps(h0, b0, step, nsteps):
    h = np.array(h0, dtype=np.complex128, copy=True)
    b = np.asarray(b0, dtype=np.float64)
    half = 0.5 * step
    for _ in range(nsteps):
        k1 = _rhs(h, b)
        k2 = _rhs(h + half * k1, b)
        k3 = _rhs(h + half * k2, b)
        k4 = _rhs(h + step * k3, b)
        h = h + (step / 6.0) * (k1 + 2 * k2 + 2 * k3 + k4)
    return h
