"""Fixed-step RK4 integration of the double-bracket flow dH/ds = [[b, H], H]."""
from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import kernels
from .matrixlab import MatrixModel, flow_unitary, norm

__all__ = ["FlowSample", "FlowTrajectory", "StepCollapse", "phi", "double_bracket_flow", "flow_representation_check"]

PHI_SLACK = 1e-12
MAX_HALVINGS = 10


class StepCollapse(RuntimeError):
    pass


def phi(h: np.ndarray, beta: np.ndarray) -> float:
    """``tr((H - b)^2) / 2``."""
    d = h - beta
    return 0.5 * float(np.real(np.vdot(d, d)))


@dataclass(frozen=True)
class FlowSample:
    s: float
    h: np.ndarray
    phi: float
    off_block: float  # |[b, H]|


@dataclass
class FlowTrajectory:
    samples: list[FlowSample] = field(default_factory=list)
    step: float = 1e-3
    method: str = "rk4"
    backend: str = kernels.BACKEND
    halvings: int = 0

    def at(self, s: float) -> FlowSample:
        best = min(self.samples, key=lambda p: abs(p.s - s))
        if abs(best.s - s) > 1e-9:
            raise KeyError(f"no sample at s={s}")
        return best

    @property
    def final(self) -> FlowSample:
        return self.samples[-1]

    def phi_monotone(self, slack: float = PHI_SLACK) -> bool:
        return all(b.phi <= a.phi + slack for a, b in zip(self.samples, self.samples[1:]))


def _sample(s, h, beta):
    return FlowSample(s, h, phi(h, beta), norm(beta @ h - h @ beta))


def double_bracket_flow(
    model: MatrixModel,
    s_max: float,
    step: float = 1e-3,
    sample_every: float = 0.05,
    stepper=None,
) -> FlowTrajectory:
    """Integrate from ``H(0) = model.h`` to ``s_max``; samples every ``sample_every``.

    A chunk whose Phi rises is redone with half the step, up to ten times.
    """
    stepper = stepper or kernels.rk4_steps
    beta = model.beta
    bdiag = model.beta_diag
    h = np.array(model.h, dtype=complex)
    chunks = max(1, int(round(s_max / sample_every)))
    ds = s_max / chunks
    traj = FlowTrajectory(step=step)
    traj.samples.append(_sample(0.0, h, beta))
    cur_step = step
    for i in range(1, chunks + 1):
        for attempt in range(MAX_HALVINGS + 1):
            n = max(1, int(round(ds / cur_step)))
            trial = stepper(h, bdiag, ds / n, n)
            cand = _sample(i * ds, trial, beta)
            if cand.phi <= traj.samples[-1].phi + PHI_SLACK:
                break
            cur_step /= 2
            traj.halvings += 1
        else:
            raise StepCollapse(f"Phi increased at s={i * ds:.4f} even with step {cur_step:.3e}")
        h = trial
        traj.samples.append(cand)
    return traj


def flow_representation_check(model: MatrixModel, traj: FlowTrajectory, s: float) -> dict:
    """Distance between the integrated H(s) and V^+(s) H V(s), plus |V V - Z b|."""
    from .matrixlab import exact_z

    v = flow_unitary(model, s)
    h_flow = traj.at(s).h
    rep = norm(h_flow - v.conj().T @ model.h @ v)
    vv = norm(v @ v - exact_z(model, s) @ model.beta)
    return {"s": s, "representation": rep, "vv_identity": vv}
