"""Gate synthesis: primitive loop holonomies, loop realization, compilers.

Primitive steps come in four families of two-coordinate loops; each family's
holonomy is a single-generator exponential whose coefficient is the signed
enclosed area (conventions in loops.py):

    C1 on (theta_b, phi_b):                exp(-i |b><b| S)
    C2 on (theta_b, phi_bb), theta_bb=pi/2: exp(+i |b><b| S)   (needs bb > b)
    C3 on (theta_b, theta_bb), phi = 0:     exp(-(|b><bb| - |bb><b|) S)
    C4 on (theta_b, theta_bb), phi_b=pi/2:  exp(-i (|b><bb| + |bb><b|) S)

C2 with bb <= b gives the identity (the two active connection legs cancel by
phase conjugation around any rectangle); such steps are accepted with a
warning. C3/C4 accept either index order: swapping (b, bb) conjugates the
generator, which the realized loop absorbs as an orientation flip.

A GateProgram is an ordered list of steps (first-executed first); evaluation
composes the step matrices with later steps multiplying on the left, either
from the closed forms (exact) or by full loop integration through the
holonomy engine. Diagonal phases on a single level b are realized as
C1(b, -gamma) [phase e^{i gamma}], which is what the compilers lean on.
"""
from __future__ import annotations

import json
import warnings
from dataclasses import dataclass

import numpy as np

from . import linalg
from .holonomy import UnitaryMatrix, holonomy
from .loops import FAMILIES, LoopPath, PlaneTag, rectangle_loop

MAX_RECT_AREA = {"C1": 1.5 * np.pi, "C2": 1.5 * np.pi, "C3": np.pi / 2, "C4": np.pi / 2}
_ZERO_AREA = 1e-14


class AreaRangeError(ValueError):
    """Requested area exceeds a single rectangle's capacity for this family."""


@dataclass(frozen=True)
class GateStep:
    """One primitive loop: family, level indices, signed target area."""

    family: str
    beta: int
    beta_bar: int | None
    area: float

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ValueError(f"unknown family {self.family!r}")
        if self.family != "C1" and self.beta_bar is None:
            raise ValueError(f"{self.family} needs a beta_bar index")
        if self.family in ("C3", "C4") and self.beta_bar == self.beta:
            raise ValueError(f"{self.family} requires beta != beta_bar")

    def validate_for(self, n: int):
        if not 1 <= self.beta <= n:
            raise ValueError(f"beta={self.beta} out of range 1..{n}")
        if self.beta_bar is not None and not 1 <= self.beta_bar <= n:
            raise ValueError(f"beta_bar={self.beta_bar} out of range 1..{n}")

    def frozen_coords(self) -> dict[str, float]:
        if self.family == "C2":
            return {f"theta:{self.beta_bar}": np.pi / 2}
        if self.family == "C4":
            return {f"phi:{self.beta}": np.pi / 2}
        return {}

    def plane(self) -> PlaneTag:
        if self.family == "C1":
            return PlaneTag((f"theta:{self.beta}", f"phi:{self.beta}"))
        if self.family == "C2":
            return PlaneTag((f"theta:{self.beta}", f"phi:{self.beta_bar}"),
                            self.frozen_coords())
        lo, hi = sorted((self.beta, self.beta_bar))
        return PlaneTag((f"theta:{lo}", f"theta:{hi}"), self.frozen_coords())

    def to_json_dict(self) -> dict:
        return {"family": self.family, "beta": self.beta,
                "beta_bar": self.beta_bar, "area": float(self.area),
                "frozen": {k: float(v) for k, v in sorted(self.frozen_coords().items())}}


def primitive_holonomy(step: GateStep, n: int) -> UnitaryMatrix:
    """Closed-form holonomy of one step on the n-dimensional code (no integration)."""
    step.validate_for(n)
    s = step.area
    g = np.zeros((n, n), dtype=complex)
    b = step.beta - 1
    if step.family == "C1":
        g[b, b] = -1j * s
    elif step.family == "C2":
        if step.beta_bar <= step.beta:
            warnings.warn(
                f"C2 with beta_bar={step.beta_bar} <= beta={step.beta} is a "
                "trivial-holonomy configuration; returning identity", stacklevel=2)
            return UnitaryMatrix.from_raw(np.eye(n, dtype=complex))
        g[b, b] = 1j * s
    else:
        bb = step.beta_bar - 1
        if step.family == "C3":
            g[b, bb] = -s
            g[bb, b] = s
        else:
            g[b, bb] = -1j * s
            g[bb, b] = -1j * s
    return UnitaryMatrix.from_raw(linalg.expm_antihermitian(g))


def realize_step_as_loop(step: GateStep, n: int) -> LoopPath:
    """Rectangle loop whose engine holonomy equals the step's closed form.

    C1/C2 rectangles span theta in [0, pi/2] with phi extent |area| (clockwise
    in (theta, phi) for positive area); C3/C4 rectangles span the lower-index
    theta in [0, pi/2] with the other theta extent |area|. For C3/C4 given
    with beta > beta_bar the realized orientation flips, absorbing the
    conjugated generator, so the loop's enclosed_area is -area in that case.
    """
    step.validate_for(n)
    cap = MAX_RECT_AREA[step.family]
    if abs(step.area) > cap + 1e-12:
        raise AreaRangeError(
            f"|area|={abs(step.area):.6g} exceeds the single-rectangle capacity "
            f"{cap:.6g} for {step.family}; split the step first")
    plane = step.plane()
    if abs(step.area) < _ZERO_AREA:
        base = rectangle_loop(n, plane, 0.0, 0.0, clockwise=False, family=step.family)
        return base
    target = step.area
    if step.family in ("C3", "C4") and step.beta > step.beta_bar:
        target = -target  # sorted-plane line integral runs the other way
    if step.family in ("C1", "C2"):
        return rectangle_loop(n, plane, np.pi / 2, abs(target),
                              clockwise=target > 0, family=step.family)
    return rectangle_loop(n, plane, np.pi / 2, abs(target),
                          clockwise=target < 0, family=step.family)


def split_step(step: GateStep) -> list[GateStep]:
    """Split an over-capacity step into equal-area steps within capacity."""
    cap = MAX_RECT_AREA[step.family]
    if abs(step.area) <= cap:
        return [step]
    parts = int(np.ceil(abs(step.area) / cap - 1e-12))
    each = step.area / parts
    return [GateStep(step.family, step.beta, step.beta_bar, each) for _ in range(parts)]


@dataclass(frozen=True)
class GateProgram:
    """Ordered loop program; steps listed first-executed first."""

    n: int
    steps: tuple[GateStep, ...]
    residual_phase: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "steps", tuple(self.steps))
        for s in self.steps:
            s.validate_for(self.n)

    def evaluate(self) -> UnitaryMatrix:
        """Closed-form product; later steps multiply on the left."""
        u = np.eye(self.n, dtype=complex)
        for s in self.steps:
            u = primitive_holonomy(s, self.n).matrix @ u
        return UnitaryMatrix.from_raw(u)

    def evaluate_integrated(self, segments_per_edge: int = 64) -> UnitaryMatrix:
        """Full loop-integration product through the holonomy engine."""
        u = np.eye(self.n, dtype=complex)
        for s in self.steps:
            for part in split_step(s):
                u = holonomy(realize_step_as_loop(part, self.n), segments_per_edge).matrix @ u
        return UnitaryMatrix.from_raw(u)

    def realized_loops(self, split: bool = True) -> list[LoopPath]:
        out = []
        for s in self.steps:
            parts = split_step(s) if split else [s]
            out.extend(realize_step_as_loop(p, self.n) for p in parts)
        return out

    def to_json_dict(self) -> dict:
        return {"n": self.n, "steps": [s.to_json_dict() for s in self.steps],
                "residual_phase": float(self.residual_phase)}

    def to_json(self, indent: int | None = 2) -> str:
        return json.dumps(self.to_json_dict(), sort_keys=True, indent=indent)

    @classmethod
    def from_json_dict(cls, d: dict) -> "GateProgram":
        steps = tuple(GateStep(s["family"], int(s["beta"]),
                               None if s.get("beta_bar") is None else int(s["beta_bar"]),
                               float(s["area"]))
                      for s in d["steps"])
        return cls(int(d["n"]), steps, float(d.get("residual_phase", 0.0)))


# ---------- single-block compiler ----------

def _wrap_angle(x: float) -> float:
    """Reduce to (-pi, pi]."""
    y = float(np.mod(x + np.pi, 2 * np.pi) - np.pi)
    return np.pi if y == -np.pi else y


def _zyz_angles(u: np.ndarray) -> tuple[float, float, float, float]:
    """(delta, a, b, c) with U = e^{i delta} Rz(a) Ry(b) Rz(c)."""
    det = np.linalg.det(u)
    delta = 0.5 * np.angle(det)
    v = u * np.exp(-1j * delta)
    b = 2.0 * np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[1, 0]) < 1e-12:  # diagonal
        return delta, -2.0 * np.angle(v[0, 0]), 0.0, 0.0
    if abs(v[0, 0]) < 1e-12:  # anti-diagonal
        return delta, 2.0 * np.angle(v[1, 0]), np.pi, 0.0
    a = -np.angle(v[0, 0]) + np.angle(v[1, 0])
    c = -np.angle(v[0, 0]) - np.angle(v[1, 0])
    return delta, a, b, c


def _diag_pair(beta: int, beta_bar: int, p: float, q: float) -> list[GateStep]:
    """Steps realizing diag(e^{ip}, e^{iq}) on the (beta, beta_bar) block exactly."""
    steps = []
    p, q = _wrap_angle(p), _wrap_angle(q)
    if abs(p) > _ZERO_AREA:
        steps.append(GateStep("C2", beta, beta_bar, p))
    if abs(q) > _ZERO_AREA:
        steps.append(GateStep("C1", beta_bar, None, -q))
    return steps


def compile_u2_block(target: np.ndarray, beta: int, beta_bar: int, n: int) -> GateProgram:
    """Compile a 2x2 unitary on levels (beta, beta_bar), beta < beta_bar <= n.

    ZYZ factorization: the two z-factors become diagonal C2/C1 pairs, the
    y-factor a single C3 step, and the global phase of the block is folded
    into the left diagonal pair, so the evaluated program reproduces the
    embedded target exactly (residual phase zero) in at most five steps.
    """
    if not 1 <= beta < beta_bar <= n:
        raise ValueError(f"need 1 <= beta < beta_bar <= n, got ({beta}, {beta_bar}, n={n})")
    target = np.asarray(target, dtype=complex)
    if target.shape != (2, 2):
        raise ValueError("target must be a 2x2 matrix")
    if linalg.unitarity_defect(target) > 1e-9:
        raise ValueError("target is not unitary to 1e-9")
    delta, a, b, c = _zyz_angles(target)
    steps: list[GateStep] = []
    steps += _diag_pair(beta, beta_bar, -c / 2, c / 2)  # right factor acts first
    if abs(b) > _ZERO_AREA:
        steps.append(GateStep("C3", beta, beta_bar, b / 2))
    steps += _diag_pair(beta, beta_bar, delta - a / 2, delta + a / 2)
    return GateProgram(n, tuple(steps), residual_phase=0.0)


def embed_two_level(u2: np.ndarray, i: int, j: int, n: int) -> np.ndarray:
    """Embed a 2x2 matrix on levels (i, j), 1-based, identity elsewhere."""
    m = np.eye(n, dtype=complex)
    ii, jj = i - 1, j - 1
    m[ii, ii], m[ii, jj] = u2[0, 0], u2[0, 1]
    m[jj, ii], m[jj, jj] = u2[1, 0], u2[1, 1]
    return m


def givens_decompose(u: np.ndarray, tol: float = 1e-12):
    """Two-level factorization U = T_1† T_2† ... T_K† D.

    Returns (factors, diag) where factors is a list of (i, j, g2) acting on
    1-based level pairs (the T_k, in elimination order) and diag the final
    diagonal phases. Elimination pairs adjacent rows (the triangular-mesh
    scheme), so tensor-product sparsity of an embedded gate fills in and the
    factor count reflects the generic quadratic-in-dimension cost of compiling
    into a single large code; used for primitive counting and full-unitary
    compilation.
    """
    u = np.asarray(u, dtype=complex)
    d = u.shape[0]
    if linalg.unitarity_defect(u) > 1e-9:
        raise ValueError("matrix is not unitary to 1e-9")
    m = u.copy()
    factors = []
    for c in range(d - 1):
        for r in range(d - 1, c, -1):
            if abs(m[r, c]) <= tol:
                continue
            x, y = m[r - 1, c], m[r, c]
            nu = np.sqrt(abs(x) ** 2 + abs(y) ** 2)
            g = np.array([[np.conj(x), np.conj(y)], [-y, x]], dtype=complex) / nu
            factors.append((r, r + 1, g))
            rows = np.array([r - 1, r])
            m[rows, :] = g @ m[rows, :]
    return factors, np.diag(m).copy()


def compile_unitary(u: np.ndarray, n: int) -> GateProgram:
    """Compile an arbitrary n x n unitary into primitive steps (exact).

    Two-level factorization followed by per-block compilation; the final
    diagonal is realized as single-level C1 phase loops. Step count grows
    with the square of the dimension for dense targets, which is what the
    monolithic-encoding cost reports measure.
    """
    factors, diag = givens_decompose(np.asarray(u, dtype=complex))
    steps: list[GateStep] = []
    for j, z in enumerate(diag):  # D acts first
        gamma = float(np.angle(z))
        if abs(gamma) > 1e-12:
            steps.append(GateStep("C1", j + 1, None, -gamma))
    for i, j, g in reversed(factors):  # then T_K†, ..., T_1†
        steps.extend(compile_u2_block(g.conj().T, i, j, n).steps)
    return GateProgram(n, tuple(steps), residual_phase=0.0)


# ---------- named two-qubit constructions (n = 4) ----------

QUBIT_BASIS = ("00", "01", "10", "11")  # |00> = level 1 ... |11> = level 4


def _uph_steps(beta: int, beta_bar: int, sigma1: float, sigma3: float) -> list[GateStep]:
    """Conjugated rotation D R D^{-1} on the (beta, beta_bar) block.

    D = diag(e^{-2i sigma1}, 1) from one C1 and one opposite-oriented C2 loop
    of equal |area|; temporal order runs the D^{-1} pair first.
    """
    return [
        GateStep("C1", beta, None, -sigma1),
        GateStep("C2", beta, beta_bar, sigma1),
        GateStep("C3", beta, beta_bar, sigma3),
        GateStep("C2", beta, beta_bar, -sigma1),
        GateStep("C1", beta, None, sigma1),
    ]


def two_qubit_gate(name: str, sigma1: float = np.pi / 4,
                   sigma3: float = np.pi / 4) -> GateProgram:
    """Loop program for a named two-qubit gate on the n=4 code.

    Each program is built from the four loop families only; diagonal
    correction loops are placed on the level they must phase (a C2 loop
    phases its lower index beta, so pi/2 phases on levels 2..4 use C2 planes
    (theta_b, phi_bb) with b the phased level, and a phase on level 4 needs
    the C1 plane (theta_4, phi_4)). sigma1/sigma3 parametrize the UPH1/PHASE
    constructions and are ignored for XOR/CROT/SWAP.
    """
    key = name.strip().upper()
    q = np.pi / 2
    if key == "CROT":
        steps = [GateStep("C1", 4, None, q), GateStep("C1", 4, None, q)]
    elif key == "XOR":
        steps = [GateStep("C4", 3, 4, q), GateStep("C2", 3, 4, q),
                 GateStep("C1", 4, None, -q)]
    elif key == "SWAP":
        steps = [GateStep("C4", 2, 3, q), GateStep("C2", 2, 3, q),
                 GateStep("C2", 3, 4, q)]
    elif key == "UPH1":
        steps = _uph_steps(1, 2, sigma1, sigma3)
    elif key == "PHASE1":
        steps = _uph_steps(1, 2, sigma1, sigma3) + _uph_steps(3, 4, sigma1, sigma3)
    elif key == "PHASE2":
        swap = two_qubit_gate("SWAP").steps
        steps = list(swap) + _uph_steps(1, 2, sigma1, sigma3) \
            + _uph_steps(3, 4, sigma1, sigma3) + list(swap)
    else:
        raise ValueError(f"unknown gate name {name!r}; "
                         "expected XOR|CROT|SWAP|PHASE1|PHASE2|UPH1")
    return GateProgram(4, tuple(steps))


def single_qubit_block(sigma1: float, sigma3: float) -> np.ndarray:
    """The 2x2 rotation produced by the UPH1 construction."""
    return np.array([
        [np.cos(sigma3), -np.sin(sigma3) * np.exp(-2j * sigma1)],
        [np.sin(sigma3) * np.exp(2j * sigma1), np.cos(sigma3)],
    ], dtype=complex)


def named_gate_matrix(name: str, sigma1: float = np.pi / 4,
                      sigma3: float = np.pi / 4) -> np.ndarray:
    """Reference 4x4 matrix for a named gate in the |00>,|01>,|10>,|11> basis."""
    key = name.strip().upper()
    if key == "CROT":
        return np.diag([1, 1, 1, -1]).astype(complex)
    if key == "XOR":
        m = np.eye(4, dtype=complex)
        m[2:, 2:] = [[0, 1], [1, 0]]
        return m
    if key == "SWAP":
        return np.eye(4, dtype=complex)[:, [0, 2, 1, 3]]
    uq = single_qubit_block(sigma1, sigma3)
    if key == "UPH1":
        m = np.eye(4, dtype=complex)
        m[:2, :2] = uq
        return m
    if key == "PHASE1":
        return np.kron(np.eye(2), uq)
    if key == "PHASE2":
        return np.kron(uq, np.eye(2))
    raise ValueError(f"unknown gate name {name!r}")
