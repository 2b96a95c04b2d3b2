"""Dynamical verification: adiabatic Schrodinger transport and the pulse-kick scheme.

Both verifiers integrate actual time evolution under H(lambda(t)) and are
independent of the connection/holonomy code paths: the adiabatic route uses
an exponential-midpoint unitary stepper on the full (n+1)-level problem; the
kick route interleaves exact free evolution with frame kicks. The code
subspace sits at eigenvalue 0 at every chart point, so no dynamical phase
accrues on the code and the extracted transport matrix can be compared to a
loop holonomy directly.

Transport extraction is frame-based: columns are the propagated code frame
vectors of the loop's base point, overlapped against the same base frame.
For loops based at the chart origin the base frame is the identity and the
overlaps reduce to plain computational-basis amplitudes.
"""
from __future__ import annotations

import warnings
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import linalg
from .chart import HamiltonianFamily, frame_unitary, frame_unitary_batch
from .gates import GateProgram, realize_step_as_loop, split_step
from .holonomy import UnitaryMatrix, holonomy
from .loops import LoopPath, _split_coord

MAX_EPS_DT = 0.05  # stepper resolution rule: epsilon0 * dt <= this


def smoothstep(x):
    """Monotone ramp with zero endpoint velocity: 3x^2 - 2x^3 on [0, 1]."""
    x = np.clip(x, 0.0, 1.0)
    return 3.0 * x**2 - 2.0 * x**3


@dataclass(frozen=True)
class Schedule:
    """Time parametrization of one closed loop traversal."""

    loop: LoopPath
    total_time: float
    steps: int = 1000
    ramp: Callable = smoothstep

    def __post_init__(self):
        if self.total_time <= 0:
            raise ValueError("total_time must be positive")
        if self.steps < 1:
            raise ValueError("steps must be >= 1")
        s0, s1 = float(self.ramp(0.0)), float(self.ramp(1.0))
        if abs(s0) > 1e-12 or abs(s1 - 1.0) > 1e-12:
            raise ValueError("ramp must satisfy s(0)=0 and s(T)=1")


def _arclength_interpolator(loop: LoopPath):
    """Piecewise-linear lambda(s), s in [0,1] proportional to chart arclength."""
    th, ph = loop.thetas, loop.phis
    seg = np.sqrt(np.sum(np.diff(th, axis=0) ** 2, axis=1)
                  + np.sum(np.diff(ph, axis=0) ** 2, axis=1))
    keep = seg > 0
    if not np.any(keep):  # degenerate loop
        def constant(s):
            s = np.atleast_1d(s)
            return (np.broadcast_to(th[0], s.shape + th[0].shape).copy(),
                    np.broadcast_to(ph[0], s.shape + ph[0].shape).copy())
        return constant
    # drop zero-length edges so the knot vector is strictly increasing
    idx = np.concatenate([[0], np.nonzero(keep)[0] + 1])
    thk, phk = th[idx], ph[idx]
    knots = np.concatenate([[0.0], np.cumsum(seg[keep])])
    knots /= knots[-1]

    def lam(s):
        s = np.clip(np.atleast_1d(s), 0.0, 1.0)
        k = np.clip(np.searchsorted(knots, s, side="right") - 1, 0, len(knots) - 2)
        f = (s - knots[k]) / (knots[k + 1] - knots[k])
        return (thk[k] + f[:, None] * (thk[k + 1] - thk[k]),
                phk[k] + f[:, None] * (phk[k + 1] - phk[k]))

    return lam


def propagate_frames(f: HamiltonianFamily, loop: LoopPath, total_time: float,
                     steps: int, ramp: Callable = smoothstep) -> np.ndarray:
    """Full (n+1)-dim propagator for one ramped traversal of the loop.

    Exponential midpoint rule: U = prod exp(-i H(lambda(s(t_mid))) dt), later
    factors left; each factor is exactly unitary.
    """
    lam = _arclength_interpolator(loop)
    x_mid = (np.arange(steps) + 0.5) / steps
    th, ph = lam(ramp(x_mid))
    frames = frame_unitary_batch(th, ph)
    v = frames[..., :, f.n]
    h = f.epsilon0 * v[..., :, None] * v.conj()[..., None, :]
    factors = linalg.expm_hermitian_prop(h, total_time / steps)
    return linalg.fold_left(factors)


@dataclass
class TransportDiagnostics:
    leakage: np.ndarray  # per initial code vector
    raw_overlaps: np.ndarray
    unitarity_defect: float
    distance_to_holonomy: float | None
    total_time: float
    steps: int

    def to_json_dict(self) -> dict:
        return {
            "leakage": [float(x) for x in self.leakage],
            "unitarity_defect": float(self.unitarity_defect),
            "distance_to_holonomy": (None if self.distance_to_holonomy is None
                                     else float(self.distance_to_holonomy)),
            "T": float(self.total_time),
            "steps": int(self.steps),
        }


def adiabatic_transport(f: HamiltonianFamily, sched: Schedule,
                        compare_holonomy: bool = True,
                        segments_per_edge: int = 64,
                        leakage_bound: float = 1e-2
                        ) -> tuple[UnitaryMatrix, TransportDiagnostics]:
    """Schrodinger-propagate the code frame around the loop and extract the
    geometric transformation.

    Column alpha of the result is the base-frame expansion of the propagated
    alpha-th code vector; leakage per column is the weight lost to the
    excited level. Exceeding leakage_bound flags a non-adiabatic run in the
    diagnostics (reported, not fatal). The step count is raised if needed so
    epsilon0 * dt <= 0.05.
    """
    loop = sched.loop
    if f.n != loop.n:
        raise ValueError("family and loop dimensions disagree")
    steps = max(sched.steps, int(np.ceil(f.epsilon0 * sched.total_time / MAX_EPS_DT)))
    u_full = propagate_frames(f, loop, sched.total_time, steps, sched.ramp)
    code = frame_unitary(loop.base_point)[:, : f.n]
    m = code.conj().T @ u_full @ code
    leakage = 1.0 - np.sum(np.abs(m) ** 2, axis=0)
    defect = linalg.unitarity_defect(m)
    if np.any(leakage > leakage_bound):
        warnings.warn(f"leakage up to {float(np.max(leakage)):.3e} exceeds "
                      f"{leakage_bound:.0e}: run may be non-adiabatic", stacklevel=2)
    dist = None
    if compare_holonomy:
        dist = linalg.max_abs_diff(linalg.polar_project(m),
                                   holonomy(loop, segments_per_edge).matrix)
    transport = UnitaryMatrix(f.n, linalg.polar_project(m), defect)
    diag = TransportDiagnostics(leakage, m, defect, dist, sched.total_time, steps)
    return transport, diag


# ---------- kick scheme ----------

@dataclass(frozen=True)
class KickPlan:
    """Piecewise-constant frame schedule: N intervals of length delta_t.

    lambda_schedule holds N+1 points with lambda_0 = lambda_N = base point;
    interval i evolves in the frame of lambda_i.
    """

    n: int
    delta_t: float
    thetas: np.ndarray  # (N+1, n)
    phis: np.ndarray  # (N+1, n)

    def __post_init__(self):
        if self.delta_t <= 0:
            raise ValueError("delta_t must be positive")
        th = np.asarray(self.thetas, dtype=float)
        ph = np.asarray(self.phis, dtype=float)
        if th.ndim != 2 or th.shape != ph.shape or th.shape[1] != self.n or th.shape[0] < 2:
            raise ValueError("need matching (N+1, n) schedules with N >= 1")
        if (np.max(np.abs(th[0] - th[-1])) > 1e-12
                or np.max(np.abs(ph[0] - ph[-1])) > 1e-12):
            raise ValueError("kick schedule must return to its base point")
        object.__setattr__(self, "thetas", th)
        object.__setattr__(self, "phis", ph)

    @property
    def num_intervals(self) -> int:
        return self.thetas.shape[0] - 1

    @property
    def total_time(self) -> float:
        return self.num_intervals * self.delta_t

    @classmethod
    def from_loop(cls, loop: LoopPath, total_time: float, num_intervals: int,
                  ramp: Callable = smoothstep) -> "KickPlan":
        """Sample the ramped loop traversal at the kick times t_i = i dt."""
        lam = _arclength_interpolator(loop)
        s = ramp(np.arange(num_intervals + 1) / num_intervals)
        th, ph = lam(s)
        return cls(loop.n, total_time / num_intervals, th, ph)


def kick_evolution(f: HamiltonianFamily, plan: KickPlan) -> np.ndarray:
    """Ordered product of frame(lambda_i) exp(-i H0 dt) frame(lambda_i)†, later left.

    Free evolution is exact (H0 is diagonal); with all lambda_i at the base
    point every kick cancels and the product telescopes to exp(-i H0 T).
    """
    if f.n != plan.n:
        raise ValueError("family and plan dimensions disagree")
    frames = frame_unitary_batch(plan.thetas[:-1], plan.phis[:-1])
    free = np.ones(f.dim, dtype=complex)
    free[f.n] = np.exp(-1j * f.epsilon0 * plan.delta_t)
    factors = np.einsum("bij,j,bkj->bik", frames, free, frames.conj())
    return linalg.fold_left(factors)


def kick_code_block(f: HamiltonianFamily, plan: KickPlan) -> np.ndarray:
    """Code-subspace block of the kick propagator, in the base-point frame."""
    code = frame_unitary_batch(plan.thetas[0], plan.phis[0])[:, : f.n]
    u = kick_evolution(f, plan)
    return code.conj().T @ u @ code


@dataclass
class TimescaleReport:
    """Advisory check of the kick-scheme separation tau_k <= dt << 1/omega << tau_lambda."""

    tau_k: float
    delta_t: float
    omega: float
    tau_lambda: float
    margin: float
    ratios: dict = field(default_factory=dict)
    flags: dict = field(default_factory=dict)

    @property
    def ok(self) -> bool:
        return all(v == "ok" for v in self.flags.values())

    def to_json_dict(self) -> dict:
        return {"tau_k": self.tau_k, "delta_t": self.delta_t, "omega": self.omega,
                "tau_lambda": self.tau_lambda, "margin": self.margin,
                "ratios": self.ratios, "flags": self.flags, "ok": self.ok}


def timescale_check(plan: KickPlan, tau_k: float, tau_lambda: float,
                    omega: float = 1.0, margin: float = 10.0) -> TimescaleReport:
    """Evaluate the inequality chain with measured ratios; advisory only.

    'tau_k <= dt' is a plain inequality; the two 'much less than' relations
    pass when the ratio is >= margin, and exactly-at-margin is flagged
    marginal (boundary policy: strict > passes, == is marginal).
    """
    rep = TimescaleReport(tau_k, plan.delta_t, omega, tau_lambda, margin)
    rep.ratios["delta_t_over_tau_k"] = plan.delta_t / tau_k
    rep.flags["tau_k_le_delta_t"] = "ok" if plan.delta_t >= tau_k else "violated"
    for name, ratio in (("delta_t_ll_inv_omega", 1.0 / (omega * plan.delta_t)),
                        ("inv_omega_ll_tau_lambda", tau_lambda * omega)):
        rep.ratios[name] = ratio
        if ratio > margin:
            rep.flags[name] = "ok"
        elif ratio == margin:
            rep.flags[name] = "marginal"
        else:
            rep.flags[name] = "violated"
    return rep


# ---------- composite schedules for gate programs ----------

def _connector(n: int, frozen: dict[str, float], reverse: bool) -> list[tuple[np.ndarray, np.ndarray]]:
    """Origin <-> loop-base path, moving one frozen coordinate at a time.

    Every leg varies a single coordinate while all theta except (possibly)
    already-raised frozen ones stay at zero, so the connection vanishes
    identically along the way and the legs transport nothing.
    """
    th, ph = np.zeros(n), np.zeros(n)
    pts = [(th.copy(), ph.copy())]
    for name in sorted(frozen):
        kind, idx = _split_coord(name)
        th, ph = th.copy(), ph.copy()
        (th if kind == "theta" else ph)[idx - 1] = frozen[name]
        pts.append((th, ph))
    return pts[::-1] if reverse else pts


def program_schedule(program: GateProgram) -> LoopPath:
    """One closed chart loop through all program steps, based at the origin.

    Each step's rectangle is preceded/followed by zero-connection connector
    legs that set up and tear down its frozen coordinates, so the composite
    loop's holonomy (and its adiabatic transport) equals the program product.
    """
    n = program.n
    ths: list[np.ndarray] = [np.zeros(n)]
    phs: list[np.ndarray] = [np.zeros(n)]

    def push(t, p):
        if np.max(np.abs(t - ths[-1])) > 0 or np.max(np.abs(p - phs[-1])) > 0:
            ths.append(np.asarray(t, dtype=float))
            phs.append(np.asarray(p, dtype=float))

    for step in program.steps:
        for part in split_step(step):
            loop = realize_step_as_loop(part, n)
            frozen = part.frozen_coords()
            for t, p in _connector(n, frozen, reverse=False):
                push(t, p)
            for t, p in zip(loop.thetas, loop.phis):
                push(t, p)
            for t, p in _connector(n, frozen, reverse=True):
                push(t, p)
    if len(ths) < 3:  # empty program: degenerate loop at the origin
        ths, phs = [np.zeros(n)] * 3, [np.zeros(n)] * 3
    return LoopPath(n, np.stack(ths), np.stack(phs))
