import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from choreobraid.choreography import (ChoreographyProblem, CollisionError, Trajectory, action,
                                      action_gradient, action_hessian, action_value, circle_path,
                                      expand, expected_crossings, omega_enforce, omega_signs,
                                      reduce_gradient, restrict, seed_path, solve, symmetry_project,
                                      validate)
from choreobraid.combinatorics import SignSequence, negate

S = SignSequence.parse


def problem(text="+-", M=32):
    return ChoreographyProblem(S(text), M)


def random_path(prob, seed, scale=0.05):
    rng = np.random.default_rng(seed)
    z = seed_path(prob)
    return z + scale * (rng.normal(size=z.size) + 1j * rng.normal(size=z.size))


def fd_gradient(f, z, eps=1e-6):
    g = np.zeros(z.size, dtype=complex)
    for i in range(z.size):
        for unit, part in ((1.0, 1.0), (1j, 1j)):
            dz = np.zeros(z.size, dtype=complex)
            dz[i] = eps * unit
            g[i] += part * (f(z + dz) - f(z - dz)) / (2 * eps)
    return g


def test_problem_checks():
    with pytest.raises(ValueError):
        ChoreographyProblem(S("+-"), 31)
    with pytest.raises(ValueError):
        ChoreographyProblem(S("+-"), 16)
    p = problem("+-+", 64)
    assert p.N == 4 and p.P == 256 and p.half_index(3) == 96
    assert p.residual_limit == pytest.approx(2000 / 64 ** 2)


@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradient_matches_finite_differences(seed):
    prob = problem("+-", 32)
    z = random_path(prob, seed)
    g = action_gradient(z, prob)
    fd = fd_gradient(lambda w: action_value(w, prob), z)
    assert np.linalg.norm(g - fd) / np.linalg.norm(g) < 1e-6


def test_reduced_gradient_matches_finite_differences():
    prob = problem("+-+", 32)
    u = restrict(symmetry_project(random_path(prob, 4)), prob)
    g = reduce_gradient(action_gradient(expand(u, prob), prob), prob)
    eps = 1e-6
    fd = np.array([(action_value(expand(u + eps * e, prob), prob)
                    - action_value(expand(u - eps * e, prob), prob)) / (2 * eps)
                   for e in np.eye(u.size)])
    assert np.linalg.norm(g - fd) / np.linalg.norm(g) < 1e-6


def test_hessian_matches_gradient_differences():
    prob = problem("+-", 32)
    z = random_path(prob, 5)
    H = action_hessian(z, prob)
    rng = np.random.default_rng(9)
    v = rng.normal(size=2 * prob.P)
    dz = v[: prob.P] + 1j * v[prob.P:]
    eps = 1e-6
    dg = (action_gradient(z + eps * dz, prob) - action_gradient(z - eps * dz, prob)) / (2 * eps)
    hv = H @ v
    assert np.allclose(hv, np.concatenate((dg.real, dg.imag)), rtol=1e-5, atol=1e-6)
    assert abs(H - H.T).max() < 1e-9


@pytest.mark.parametrize("N", [3, 4, 5])
def test_polygon_is_critical(N):
    prob = ChoreographyProblem(SignSequence((1,) * (N - 1)), 64)
    z = circle_path(N, 64)
    g = action_gradient(z, prob)
    assert np.max(np.abs(g)) < 1e-10


@settings(max_examples=20, deadline=None)
@given(st.floats(0.3, 3.0))
def test_action_scaling(c):
    # z -> c z with dt -> c^{3/2} dt scales both parts by c^{1/2}
    prob = problem("+-", 32)
    z = seed_path(prob)
    kin, pot = action(z, prob)
    kin_c, pot_c = action(c * z, prob, dt=c ** 1.5 * prob.h)
    assert kin_c == pytest.approx(c ** 0.5 * kin, rel=1e-10)
    assert pot_c == pytest.approx(c ** 0.5 * pot, rel=1e-10)


def test_symmetry_projection():
    prob = problem("+-+", 32)
    z = random_path(prob, 1)
    p = symmetry_project(z)
    assert np.allclose(symmetry_project(p), p)
    assert p[0].imag == pytest.approx(0, abs=1e-15)
    half = prob.P // 2
    assert p[half].imag == pytest.approx(0, abs=1e-15)
    assert np.allclose(expand(restrict(p, prob), prob), p)


def test_omega_enforce():
    prob = problem("+-+", 32)
    z = seed_path(prob)
    assert omega_signs(z, 3, 32) == (1, -1, 1)
    flipped = omega_enforce(z, S("+++"), 32, floor=0.1)
    assert omega_signs(flipped, 3, 32) == (1, 1, 1)
    assert np.allclose(omega_enforce(flipped, S("+++"), 32, floor=0.1), flipped)
    assert np.allclose(symmetry_project(flipped), flipped)
    assert np.allclose(omega_enforce(z, S("+-+"), 32), z)


def test_expected_crossings():
    assert expected_crossings(S("+-")) == (0, 1, 0)
    assert expected_crossings(S("+--")) == (0, 1, 0, 0)


def test_collision_raises():
    prob = problem("+-", 32)
    z = np.zeros(prob.P, dtype=complex)
    with pytest.raises(CollisionError):
        action(z, prob)


def test_small_solve_and_roundtrip(tmp_path):
    prob = problem("+-", 64)
    traj = solve(prob)
    assert traj.converged and traj.gradient_norm < 1e-8
    report = validate(traj, prob)
    assert report.passed, report.checks
    # monotone descent up to round-off
    h = np.array(traj.history)
    assert np.all(np.diff(h) <= 1e-9 * abs(h[0]))
    assert report.endpoint_speeds[0] == pytest.approx(0, abs=1e-6)
    path = tmp_path / "fig8.json"
    traj.save(path)
    back = Trajectory.load(path)
    assert back.M == traj.M and back.omega == traj.omega
    assert np.array_equal(back.samples, traj.samples)
    assert back.validation == traj.validation


def test_load_rejects_bad_files(tmp_path):
    bad = tmp_path / "bad.json"
    bad.write_text('{"format": "something"}')
    with pytest.raises(ValueError):
        Trajectory.load(bad)


def test_negated_omega_is_mirror(solve_cached):
    a = solve_cached("+-", 64)
    b = solve_cached("-+", 64)
    assert omega_signs(b.samples, 2, 64) == negate(S("+-")).signs
    assert b.action == pytest.approx(a.action, rel=1e-8)


def test_velocity_symmetry(solve_cached):
    # Re z_j'(0) = -Re z_{N-j}'(0), read off the samples of z_0 at t = j and t = N - j
    traj = solve_cached("+-+", 128)
    z, M, N = traj.samples, traj.M, traj.N
    v = (np.roll(z, -1) - np.roll(z, 1)) * M / 2
    assert abs(z[0].imag) < 1e-12
    for j in range(1, N):
        assert v[j * M].real == pytest.approx(-v[(N - j) * M].real, abs=1e-9)
