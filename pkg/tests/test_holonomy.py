"""Holonomy engine: closed-form laws, loop algebra, convergence, shape invariance."""
import numpy as np
import pytest

from cpn_holonomy import (GateStep, LoopPath, PlaneTag, UnitarityError, UnitaryMatrix,
                          circle_loop, concatenate, enclosed_area, holonomy,
                          l_shape_loop, primitive_holonomy, realize_step_as_loop,
                          rectangle_loop, reverse)

C1_PLANE = PlaneTag(("theta:1", "phi:1"))


def random_wiggle_loop(rng, n, num_verts=6, amp=0.25):
    """Closed random polyline around an interior point, vertices over all coords."""
    center_t = rng.uniform(0.35, np.pi / 2 - 0.35, n)
    center_p = rng.uniform(1.0, 2 * np.pi - 1.0, n)
    th = center_t + rng.uniform(-amp, amp, (num_verts, n))
    ph = center_p + rng.uniform(-amp, amp, (num_verts, n))
    th = np.vstack([th, th[0]])
    ph = np.vstack([ph, ph[0]])
    return LoopPath(n, th, ph)


def test_degenerate_loop_is_identity():
    p = np.full((3, 2), 0.3)
    loop = LoopPath(2, p, p * 0.5)
    u = holonomy(loop, 16)
    assert u.distance(np.eye(2)) == 0.0


def test_c1_law_at_pi():
    step = GateStep("C1", 1, None, np.pi)
    loop = realize_step_as_loop(step, 1)
    got = holonomy(loop, 8).matrix
    assert abs(got[0, 0] - (-1.0)) < 1e-12


def test_c3_law_at_half_pi():
    step = GateStep("C3", 1, 2, np.pi / 2)
    loop = realize_step_as_loop(step, 2)
    got = holonomy(loop, 8).matrix
    assert np.max(np.abs(got - np.array([[0, -1], [1, 0]]))) < 1e-12


@pytest.mark.parametrize("area", [0.1, np.pi / 4, np.pi / 2, np.pi, 3.0])
@pytest.mark.parametrize("beta", [1, 2, 3])
def test_c1_closed_form_law(beta, area):
    n = 3
    step = GateStep("C1", beta, None, area)
    loop = realize_step_as_loop(step, n)
    expect = np.eye(n, dtype=complex)
    expect[beta - 1, beta - 1] = np.exp(-1j * area)
    assert abs(enclosed_area(loop, "C1") - area) < 1e-12
    assert holonomy(loop, 64).distance(expect) < 1e-7


@pytest.mark.parametrize("family,beta,beta_bar", [
    ("C2", 1, 2), ("C2", 1, 3), ("C2", 2, 3),
    ("C3", 1, 2), ("C3", 2, 3), ("C3", 3, 1),
    ("C4", 1, 2), ("C4", 2, 1), ("C4", 1, 3),
])
def test_c2_c3_c4_closed_form_laws(family, beta, beta_bar):
    n = 3
    for area in (0.1, np.pi / 4, 1.2, -0.8):
        step = GateStep(family, beta, beta_bar, area)
        loop = realize_step_as_loop(step, n)
        got = holonomy(loop, 64)
        assert got.distance(primitive_holonomy(step, n).matrix) < 1e-7


def test_unitarity_of_engine_output():
    rng = np.random.default_rng(71)
    for _ in range(10):
        loop = random_wiggle_loop(rng, 3)
        u = holonomy(loop, 24)
        assert u.defect < 1e-9
        m = u.matrix
        assert np.max(np.abs(m.conj().T @ m - np.eye(3))) < 1e-12


def test_concatenation_homomorphism():
    rng = np.random.default_rng(73)
    for _ in range(8):
        a = random_wiggle_loop(rng, 2)
        b = LoopPath(2,
                     np.vstack([a.thetas[:1], a.thetas[:1] + 0.1, a.thetas[:1] - 0.05, a.thetas[:1]]),
                     np.vstack([a.phis[:1], a.phis[:1] + 0.15, a.phis[:1] + 0.3, a.phis[:1]]))
        ab = concatenate(a, b)
        lhs = holonomy(ab, 32).matrix
        rhs = holonomy(b, 32).matrix @ holonomy(a, 32).matrix  # later loop on the left
        assert np.max(np.abs(lhs - rhs)) < 1e-8


def test_concatenate_with_degenerate_is_neutral():
    rng = np.random.default_rng(79)
    a = random_wiggle_loop(rng, 2)
    base_t, base_p = a.thetas[:1], a.phis[:1]
    degen = LoopPath(2, np.repeat(base_t, 3, axis=0), np.repeat(base_p, 3, axis=0))
    assert np.max(np.abs(holonomy(concatenate(a, degen), 32).matrix
                         - holonomy(a, 32).matrix)) < 1e-10


def test_loop_times_inverse_is_identity():
    rng = np.random.default_rng(83)
    for _ in range(5):
        a = random_wiggle_loop(rng, 2)
        round_trip = concatenate(a, reverse(a))
        assert holonomy(round_trip, 24).distance(np.eye(2)) < 1e-8


def test_reverse_gives_dagger():
    rng = np.random.default_rng(89)
    for _ in range(8):
        loop = random_wiggle_loop(rng, 3)
        u = holonomy(loop, 32).matrix
        v = holonomy(reverse(loop), 32).matrix
        assert np.max(np.abs(v - u.conj().T)) < 1e-8


def test_retraced_path_zero_area_identity():
    # out-and-back excursions enclose nothing and transport nothing
    rng = np.random.default_rng(97)
    for _ in range(5):
        n = 2
        base_t = rng.uniform(0.3, 1.2, n)
        base_p = rng.uniform(0.5, 2.0, n)
        out_t = base_t + rng.uniform(-0.2, 0.2, (3, n))
        out_p = base_p + rng.uniform(-0.2, 0.2, (3, n))
        th = np.vstack([base_t, out_t, out_t[::-1], base_t])
        ph = np.vstack([base_p, out_p, out_p[::-1], base_p])
        loop = LoopPath(n, th, ph)
        assert holonomy(loop, 16).distance(np.eye(n)) < 1e-12


def test_shape_invariance_equal_area():
    """Rectangle, circle and L-shape of equal C1 area give equal holonomies."""
    circle = circle_loop(1, C1_PLANE, (0.75, 1.2), 0.35, num_vertices=512,
                         clockwise=True, family="C1")
    target = enclosed_area(circle, "C1")
    assert target > 0
    # rectangle with the same area: full theta edge at Theta, solve phi span
    theta_edge = 1.1
    rect = rectangle_loop(1, C1_PLANE, theta_edge, target / np.sin(theta_edge) ** 2,
                          clockwise=True, family="C1")
    # L-shape: fix outer box and first notch edge, solve the second
    e0, e1, n0 = 1.2, 0.7, 0.5
    notch_span = (e1 * np.sin(e0) ** 2 - target) / (np.sin(e0) ** 2 - np.sin(n0) ** 2)
    assert 0 < notch_span < e1
    lshape = l_shape_loop(1, C1_PLANE, e0, e1, n0, e1 - notch_span,
                          clockwise=True, family="C1")
    for loop in (rect, lshape):
        assert abs(enclosed_area(loop, "C1") - target) < 1e-12
    h_rect = holonomy(rect, 64).matrix
    h_circ = holonomy(circle, 16).matrix  # 512 edges x 16 = 8192 segments
    h_lsh = holonomy(lshape, 64).matrix
    assert np.max(np.abs(h_rect - h_circ)) < 1e-6
    assert np.max(np.abs(h_rect - h_lsh)) < 1e-6
    assert np.max(np.abs(h_circ - h_lsh)) < 1e-6


def test_discretization_second_order_on_circle():
    # rectangles are segment-exact, so convergence is measured on a curve
    circle = circle_loop(1, C1_PLANE, (0.7, 1.0), 0.3, num_vertices=64,
                         clockwise=True, family="C1")
    area = enclosed_area(circle, "C1")
    expect = np.array([[np.exp(-1j * area)]])
    err = [np.max(np.abs(holonomy(circle, s).matrix - expect)) for s in (2, 4, 8)]
    assert 3.0 < err[0] / err[1] < 5.0
    assert 3.0 < err[1] / err[2] < 5.0


def test_open_loop_rejected():
    with pytest.raises(ValueError, match="not closed"):
        LoopPath(1, np.array([[0.0], [0.3], [0.2]]), np.zeros((3, 1)))


def test_segments_validation():
    loop = rectangle_loop(1, C1_PLANE, 0.5, 0.5, clockwise=True)
    with pytest.raises(ValueError):
        holonomy(loop, 0)


def test_unitary_matrix_certification():
    good = np.eye(2, dtype=complex)
    u = UnitaryMatrix.from_raw(good)
    assert u.defect == 0.0
    # small defect: polar-projected, raw defect recorded
    drift = good * (1 + 3e-8)
    u = UnitaryMatrix.from_raw(drift)
    assert 1e-9 < u.defect < 1e-6
    assert np.max(np.abs(u.matrix.conj().T @ u.matrix - np.eye(2))) < 1e-12
    with pytest.raises(UnitarityError):
        UnitaryMatrix.from_raw(good * 1.5)
    with pytest.raises(UnitarityError):
        UnitaryMatrix.from_raw(np.full((2, 2), np.nan))
