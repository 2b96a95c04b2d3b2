"""The CP^n control chart, its rotated eigenframe and the isospectral Hamiltonian family.

A point of the chart is 2n angles (theta_1..theta_n, phi_1..phi_n) with
theta in [0, pi/2] and phi in [0, 2pi). Level n+1 is the non-degenerate one;
its angles are fixed to theta_{n+1} = pi/2, phi_{n+1} = 0 and never stored.

The frame U(point) is the ordered product of n two-level rotations, one per
level alpha, each mixing (alpha, n+1); the alpha = 1 rotation acts first.
Its columns are the rotated eigenstates: columns 1..n span the n-fold
degenerate eigenvalue-0 subspace (the code), column n+1 carries eigenvalue
epsilon0. Reversing the product order changes the frame and every downstream
sign, so it is fixed here once.

Functions with a trailing underscore-free "batch" variant accept arrays of
shape (..., n) and return matching batched matrices; these are the hot paths
for the loop integrator and the propagators.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

TWO_PI = 2.0 * np.pi
THETA_MAX = np.pi / 2
_ANGLE_TOL = 1e-12


@dataclass(frozen=True)
class ControlPoint:
    """A point lambda = (theta_1..theta_n, phi_1..phi_n) of the CP^n chart."""

    n: int
    theta: np.ndarray
    phi: np.ndarray

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        th = np.atleast_1d(np.asarray(self.theta, dtype=float)).copy()
        ph = np.atleast_1d(np.asarray(self.phi, dtype=float)).copy()
        if th.shape != (self.n,) or ph.shape != (self.n,):
            raise ValueError(f"theta and phi must both have length n={self.n}")
        if np.any(th < -_ANGLE_TOL) or np.any(th > THETA_MAX + _ANGLE_TOL):
            raise ValueError("theta entries must lie in [0, pi/2]")
        th = np.clip(th, 0.0, THETA_MAX)
        ph = np.mod(ph, TWO_PI)  # stored reduced modulo 2pi
        th.setflags(write=False)
        ph.setflags(write=False)
        object.__setattr__(self, "theta", th)
        object.__setattr__(self, "phi", ph)

    @classmethod
    def origin(cls, n: int) -> "ControlPoint":
        return cls(n, np.zeros(n), np.zeros(n))

    def replace(self, **coords: float) -> "ControlPoint":
        """New point with coordinates like theta1=..., phi3=... overridden (1-based)."""
        th, ph = self.theta.copy(), self.phi.copy()
        for key, val in coords.items():
            kind, idx = _parse_coord_name(key)
            (th if kind == "theta" else ph)[idx - 1] = val
        return ControlPoint(self.n, th, ph)


def _parse_coord_name(key: str) -> tuple[str, int]:
    for kind in ("theta", "phi"):
        if key.startswith(kind):
            idx = int(key[len(kind):].lstrip(":_ "))
            return kind, idx
    raise ValueError(f"unknown coordinate name {key!r}; use theta<k>/phi<k> or theta:<k>")


@dataclass(frozen=True)
class HamiltonianFamily:
    """Isospectral orbit H(lambda) = U(lambda) H0 U(lambda)†, H0 = epsilon0 |n+1><n+1|."""

    n: int
    epsilon0: float = 1.0

    def __post_init__(self):
        if self.n < 1:
            raise ValueError("n must be a positive integer")
        if self.epsilon0 <= 0:
            raise ValueError("epsilon0 must be positive")

    @property
    def dim(self) -> int:
        return self.n + 1

    def h0(self) -> np.ndarray:
        h = np.zeros((self.dim, self.dim), dtype=complex)
        h[self.n, self.n] = self.epsilon0
        return h


def frame_unitary_batch(theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Frames for a batch of points; theta/phi shape (..., n) -> (..., n+1, n+1)."""
    theta = np.asarray(theta, dtype=float)
    phi = np.asarray(phi, dtype=float)
    n = theta.shape[-1]
    batch = theta.shape[:-1]
    u = np.broadcast_to(np.eye(n + 1, dtype=complex), batch + (n + 1, n + 1)).copy()
    for a in range(n):
        r = np.broadcast_to(np.eye(n + 1, dtype=complex), batch + (n + 1, n + 1)).copy()
        c = np.cos(theta[..., a])
        s = np.sin(theta[..., a])
        e = np.exp(1j * phi[..., a])
        r[..., a, a] = c
        r[..., a, n] = e * s
        r[..., n, a] = -s / e
        r[..., n, n] = c
        u = r @ u  # alpha = 1 acts first: left-accumulate
    return u


def frame_unitary(p: ControlPoint) -> np.ndarray:
    """The (n+1)x(n+1) frame at p; column alpha is the rotated eigenstate |alpha(p)>."""
    return frame_unitary_batch(p.theta, p.phi)


def eigenstate(p: ControlPoint, alpha: int) -> np.ndarray:
    """Closed-form rotated eigenstate, 1 <= alpha <= n+1.

    Independent of frame_unitary (explicit trigonometric products rather than
    a rotation product); the two must agree columnwise, which the test suite
    enforces.
    """
    n = p.n
    if not 1 <= alpha <= n + 1:
        raise IndexError(f"alpha must be in 1..{n + 1}, got {alpha}")
    th = np.concatenate([p.theta, [THETA_MAX]])  # implicit level n+1
    ph = np.concatenate([p.phi, [0.0]])
    v = np.zeros(n + 1, dtype=complex)
    if alpha == n + 1:
        for j in range(1, n + 2):
            v[j - 1] = np.exp(1j * ph[j - 1]) * np.sin(th[j - 1]) * np.prod(np.cos(th[: j - 1]))
        return v
    a = alpha - 1
    v[a] = np.cos(th[a])
    pref = -np.exp(-1j * ph[a]) * np.sin(th[a])
    for j in range(alpha + 1, n + 2):
        amp = np.sin(th[j - 1]) * np.prod(np.cos(th[alpha: j - 1]))
        v[j - 1] = pref * np.exp(1j * ph[j - 1]) * amp
    return v


def hamiltonian_at(f: HamiltonianFamily, p: ControlPoint) -> np.ndarray:
    """H(p) = epsilon0 |v><v| with v the rotated level-(n+1) eigenstate.

    Spectrum is {0 x n, epsilon0} at every chart point. Note the restricted
    two-level form of H on a (theta_b, phi_b) plane is traceless only after
    subtracting (epsilon0/2) I; see the model tests for the explicit
    reconciliation (including the azimuth reflection phi -> pi - phi).
    """
    if f.n != p.n:
        raise ValueError(f"dimension mismatch: family n={f.n}, point n={p.n}")
    v = eigenstate(p, p.n + 1)
    return f.epsilon0 * np.outer(v, v.conj())


def hamiltonians_batch(f: HamiltonianFamily, theta: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Batched H(lambda): theta/phi (..., n) -> (..., n+1, n+1)."""
    frames = frame_unitary_batch(theta, phi)
    v = frames[..., :, f.n]
    return f.epsilon0 * v[..., :, None] * v.conj()[..., None, :]
