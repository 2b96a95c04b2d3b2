"""Small dense-linear-algebra helpers shared across the package.

All matrix exponentials of anti-hermitian generators go through an exact
eigendecomposition (the result is unitary up to eigensolver roundoff, which
is what the holonomy and propagation code relies on). Batched inputs use a
leading batch axis everywhere.
"""
from __future__ import annotations

import numpy as np


def unitarity_defect(m: np.ndarray) -> float:
    """Max-entry norm of M†M - I."""
    d = m.shape[-1]
    return float(np.max(np.abs(m.conj().T @ m - np.eye(d))))


def polar_project(m: np.ndarray) -> np.ndarray:
    """Nearest unitary in Frobenius norm, via SVD."""
    w, _, vh = np.linalg.svd(m)
    return w @ vh


def expm_antihermitian(g: np.ndarray) -> np.ndarray:
    """exp(G) for anti-hermitian G (batched on leading axes).

    iG is hermitian, so exp(G) = V diag(exp(-i w)) V† with (w, V) = eigh(iG).
    Exact and unitary by construction; accurate to ~1e-15 for the small
    dimensions used here.
    """
    w, v = np.linalg.eigh(1j * g)
    phase = np.exp(-1j * w)
    return np.einsum("...ij,...j,...kj->...ik", v, phase, v.conj())


def expm_hermitian_prop(h: np.ndarray, dt: float) -> np.ndarray:
    """exp(-i H dt) for hermitian H (batched), via eigendecomposition."""
    w, v = np.linalg.eigh(h)
    phase = np.exp(-1j * w * dt)
    return np.einsum("...ij,...j,...kj->...ik", v, phase, v.conj())


def fold_left(factors: np.ndarray) -> np.ndarray:
    """Ordered product factors[-1] @ ... @ factors[0] (later factors on the left)."""
    out = factors[0]
    for k in range(1, factors.shape[0]):
        out = factors[k] @ out
    return out


def max_abs_diff(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def dist_up_to_phase(u: np.ndarray, v: np.ndarray) -> float:
    """Max-entry distance min over a global phase: || e^{i phi} U - V ||_max.

    The phase is taken from tr(V†U), which is optimal for near-coincident
    unitaries and is the project-wide definition of "up to global phase".
    """
    tr = np.trace(v.conj().T @ u)
    if abs(tr) < 1e-300:
        return max_abs_diff(u, v)
    phase = tr / abs(tr)
    return max_abs_diff(u / phase, v)


def phase_fidelity(u: np.ndarray, v: np.ndarray) -> float:
    """|tr(V†U)| / dim, the global-phase-insensitive overlap."""
    d = u.shape[-1]
    return float(abs(np.trace(v.conj().T @ u)) / d)
