"""Simple choreographies of the equal-mass planar N-body problem by action minimization.

All bodies follow one closed curve ``z_0`` with period ``N``; body ``j`` is
``z_j(t) = z_0(t + j)``.  The curve is sampled on a uniform periodic grid of
``P = N * M`` points, ``h = 1 / M``.  Only the half ``t in [0, N/2]`` is free:
the rest follows from ``z_0(t) = conj(z_0(-t))``, which together with the
choreography relation also gives ``z_j(t) = conj(z_{N-1-j}(1 - t))``.

Discrete action (velocities are forward differences, i.e. centred at the
half-steps)::

    A = N * [ sum_i |z_{i+1} - z_i|^2 / (2h)
              + (h/2) sum_i sum_{d=1}^{N-1} 1 / |z_i - z_{i+dM}| ]

Its critical points satisfy the three-point discrete Newton equation
``(z_{i+1} - 2 z_i + z_{i-1}) / h^2 = F_i`` exactly.
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, asdict
from pathlib import Path

import numpy as np
import scipy.optimize
import scipy.sparse
import scipy.sparse.linalg

from .combinatorics import SignSequence

FORMAT_TAG = "choreography-trajectory"
FORMAT_VERSION = 1

#: Residual constant, calibrated by grid refinement on the instances in the test suite.
RESIDUAL_CONSTANT = 2000.0


class CollisionError(ValueError):
    def __init__(self, separation: float, index: int):
        super().__init__(f"bodies nearly collide: separation {separation:.3e} at grid index {index}")
        self.separation = separation
        self.index = index


class SolverError(RuntimeError):
    pass


@dataclass(frozen=True)
class ChoreographyProblem:
    """Discretization and tolerances for one ``(N, omega)`` instance."""

    omega: SignSequence
    M: int = 256
    gradient_tol: float = 1e-8
    residual_tol: float | None = None
    min_separation: float = 1e-3
    omega_floor: float = 1e-3
    max_iter: int = 20_000
    newton_iter: int = 30
    monotone_tol: float = 1e-6
    endpoint_tol: float = 1e-6

    def __post_init__(self):
        if self.M < 32 or self.M % 2:
            raise ValueError(f"M must be even and at least 32, got {self.M}")
        if self.omega.strands < 3:
            raise ValueError("need at least three bodies")

    @property
    def N(self) -> int:
        return self.omega.strands

    @property
    def P(self) -> int:
        return self.N * self.M

    @property
    def h(self) -> float:
        return 1.0 / self.M

    @property
    def residual_limit(self) -> float:
        return self.residual_tol if self.residual_tol is not None else RESIDUAL_CONSTANT / self.M ** 2

    def times(self) -> np.ndarray:
        return np.arange(self.P) / self.M

    def half_index(self, j: int) -> int:
        """Grid index of ``t = j / 2``."""
        return j * self.M // 2


# --------------------------------------------------------------------------
# action and derivatives


def _partners(z: np.ndarray, N: int, M: int):
    for d in range(1, N):
        yield d, np.roll(z, -d * M)


def min_separation(z: np.ndarray, N: int, M: int) -> tuple[float, int]:
    best, where = math.inf, -1
    for _, w in _partners(z, N, M):
        r = np.abs(z - w)
        i = int(np.argmin(r))
        if r[i] < best:
            best, where = float(r[i]), i
    return best, where


def _check_collision(z, problem: ChoreographyProblem, factor: float = 0.1):
    sep, where = min_separation(z, problem.N, problem.M)
    if sep < problem.min_separation * factor:
        raise CollisionError(sep, where)


def action(z: np.ndarray, problem: ChoreographyProblem, dt: float | None = None) -> tuple[float, float]:
    """Kinetic and potential parts of the discrete action of the sampled loop ``z``.

    ``dt`` overrides the time step (default ``1/M``); used to check the
    scaling law ``z -> c z, t -> c^{3/2} t``.
    """
    _check_collision(z, problem)
    N, M = problem.N, problem.M
    h = problem.h if dt is None else dt
    kinetic = np.sum(np.abs(np.roll(z, -1) - z) ** 2) / (2 * h)
    potential = sum(np.sum(1.0 / np.abs(z - w)) for _, w in _partners(z, N, M)) * h / 2
    return float(N * kinetic), float(N * potential)


def action_value(z: np.ndarray, problem: ChoreographyProblem, dt: float | None = None) -> float:
    kin, pot = action(z, problem, dt)
    return kin + pot


def second_difference(z: np.ndarray, h: float) -> np.ndarray:
    return (np.roll(z, -1) - 2 * z + np.roll(z, 1)) / h ** 2


def fourth_order_second_difference(z: np.ndarray, h: float) -> np.ndarray:
    """Five-point stencil for ``z''``, fourth-order accurate."""
    return (-np.roll(z, -2) + 16 * np.roll(z, -1) - 30 * z + 16 * np.roll(z, 1)
            - np.roll(z, 2)) / (12 * h ** 2)


def forces(z: np.ndarray, N: int, M: int) -> np.ndarray:
    """Newtonian acceleration of body 0 at every grid time."""
    f = np.zeros_like(z)
    for _, w in _partners(z, N, M):
        r = z - w
        f -= r / np.abs(r) ** 3
    return f


def action_gradient(z: np.ndarray, problem: ChoreographyProblem) -> np.ndarray:
    """Gradient of :func:`action_value` with respect to each sample, as ``dA/dx + i dA/dy``."""
    _check_collision(z, problem)
    N, M, h = problem.N, problem.M, problem.h
    return N * h * (-second_difference(z, h) + forces(z, N, M))


def action_hessian(z: np.ndarray, problem: ChoreographyProblem) -> scipy.sparse.csr_matrix:
    """Sparse Hessian in the real coordinates ``(x_0..x_{P-1}, y_0..y_{P-1})``."""
    N, M, h, P = problem.N, problem.M, problem.h, problem.P
    idx = np.arange(P)
    rows, cols, vals = [], [], []

    def add(r, c, v):
        rows.append(r)
        cols.append(c)
        vals.append(v)

    k = N / h
    for off in (0, P):
        add(idx + off, idx + off, np.full(P, 2 * k))
        add(idx + off, (idx + 1) % P + off, np.full(P, -k))
        add(idx + off, (idx - 1) % P + off, np.full(P, -k))
    scale = N * h / 2
    for d in range(1, N):
        j = (idx + d * M) % P
        r = z - z[j]
        rx, ry, rr = r.real, r.imag, np.abs(r)
        r5 = rr ** 5
        kxx = scale * (3 * rx * rx - rr ** 2) / r5
        kyy = scale * (3 * ry * ry - rr ** 2) / r5
        kxy = scale * 3 * rx * ry / r5
        for (a, b, s) in ((idx, idx, 1), (j, j, 1), (idx, j, -1), (j, idx, -1)):
            add(a, b, s * kxx)
            add(a + P, b + P, s * kyy)
            add(a, b + P, s * kxy)
            add(a + P, b, s * kxy)
    H = scipy.sparse.coo_matrix((np.concatenate(vals), (np.concatenate(rows), np.concatenate(cols))),
                                shape=(2 * P, 2 * P))
    return H.tocsr()


# --------------------------------------------------------------------------
# symmetric reduction


def expand(u: np.ndarray, problem: ChoreographyProblem) -> np.ndarray:
    """Full loop from the free variables ``(x_0..x_{P/2}, y_1..y_{P/2-1})``."""
    P = problem.P
    half = P // 2
    x = u[: half + 1]
    y = np.concatenate(([0.0], u[half + 1:], [0.0]))
    front = x + 1j * y
    return np.concatenate((front, np.conj(front[1:half][::-1])))


def restrict(z: np.ndarray, problem: ChoreographyProblem) -> np.ndarray:
    half = problem.P // 2
    return np.concatenate((z[: half + 1].real, z[1:half].imag))


def reduce_gradient(g: np.ndarray, problem: ChoreographyProblem) -> np.ndarray:
    """Chain rule through :func:`expand`."""
    P = problem.P
    half = P // 2
    mirror = g[(P - np.arange(half + 1)) % P]
    gx = g[: half + 1].real + mirror.real
    gx[0] = g[0].real
    gx[half] = g[half].real
    gy = g[1:half].imag - mirror[1:half].imag
    return np.concatenate((gx, gy))


def _expansion_matrix(problem: ChoreographyProblem) -> scipy.sparse.csr_matrix:
    P = problem.P
    half = P // 2
    rows, cols, vals = [], [], []
    for i in range(half + 1):
        rows.append(i); cols.append(i); vals.append(1.0)
        if 0 < i < half:
            rows.append(P - i); cols.append(i); vals.append(1.0)
    for i in range(1, half):
        c = half + i
        rows.append(P + i); cols.append(c); vals.append(1.0)
        rows.append(P + P - i); cols.append(c); vals.append(-1.0)
    return scipy.sparse.csr_matrix((vals, (rows, cols)), shape=(2 * P, P))


def symmetry_project(z: np.ndarray) -> np.ndarray:
    """Nearest loop with ``z(t) = conj(z(-t))`` on the grid.

    On choreographies this one identity also yields the reflection
    ``z_j(t) = conj(z_{N-1-j}(1 - t))``, so it is the only projection needed.
    """
    reflected = np.conj(np.roll(z[::-1], 1))
    return (z + reflected) / 2


def _bump(problem: ChoreographyProblem, j: int) -> np.ndarray:
    """Smooth bump equal to 1 at ``t = j/2`` and 0 outside ``((j-1)/2, (j+1)/2)``."""
    t = problem.times()
    s = (t - j / 2) * 2
    return np.where(np.abs(s) < 1, 0.5 * (1 + np.cos(np.pi * s)), 0.0)


def omega_enforce(z: np.ndarray, omega: SignSequence, M: int, floor: float = 1e-3) -> np.ndarray:
    """Push ``Im z(j/2)`` onto the side ``omega_j`` with magnitude at least ``floor``.

    Each violated sample is corrected by an odd pair of local bumps, so the
    loop stays symmetric and the other constrained samples are untouched.
    Compliant loops are returned unchanged.
    """
    problem = ChoreographyProblem(omega, M)
    z = np.array(z, dtype=complex)
    for j, w in enumerate(omega.signs, start=1):
        i = problem.half_index(j)
        current = z[i].imag
        target = w * max(abs(current), floor)
        if current == target:
            continue
        b = _bump(problem, j)
        b_odd = b - np.roll(b[::-1], 1)
        z = z + 1j * (target - current) * b_odd
    return z


def omega_signs(z: np.ndarray, omega_len: int, M: int) -> tuple[int, ...]:
    return tuple(int(np.sign(z[j * M // 2].imag)) for j in range(1, omega_len + 1))


# --------------------------------------------------------------------------
# seeds


def circle_radius(N: int, h: float | None = None) -> float:
    """Radius of the rotating N-gon with period N.

    With ``h`` given, the radius solving the discrete equations exactly.
    """
    s = sum(1 / math.sin(math.pi * k / N) for k in range(1, N))
    omega = 2 * math.pi / N
    if h is None:
        return (s / (4 * omega ** 2)) ** (1 / 3)
    eff = (2 - 2 * math.cos(omega * h)) / h ** 2
    return (s / (4 * eff)) ** (1 / 3)


def circle_path(N: int, M: int, discrete: bool = True) -> np.ndarray:
    """``z_0(t) = -r exp(-2 pi i t / N)``: the N-gon, which carries the all-plus omega."""
    t = np.arange(N * M) / M
    r = circle_radius(N, 1 / M if discrete else None)
    return -r * np.exp(-2j * np.pi * t / N)


def seed_path(problem: ChoreographyProblem, seed: int = 0, amplitude: float = 0.5) -> np.ndarray:
    """Initial loop inside the omega class.

    ``Re z = -R cos(2 pi t / N)`` sweeps left to right over ``[0, N/2]``; the
    imaginary part is the sine series of modes ``1..N-1`` through the points
    ``(j/2, omega_j * amplitude * R)``.  A nonzero ``seed`` adds a small
    deterministic symmetric perturbation.
    """
    N, t = problem.N, problem.times()
    R = circle_radius(N)
    k = np.arange(1, N)
    j = np.arange(1, N)
    basis = np.sin(np.pi * np.outer(j, k) / N)
    coef = np.linalg.solve(basis, amplitude * R * np.array(problem.omega.signs, dtype=float))
    im = np.sin(2 * np.pi * np.outer(t, k) / N) @ coef
    z = -R * np.cos(2 * np.pi * t / N) + 1j * im
    if seed:
        rng = np.random.default_rng(seed)
        modes = np.arange(1, 4)
        a = rng.normal(scale=0.02 * R, size=modes.size)
        b = rng.normal(scale=0.02 * R, size=modes.size)
        phase = 2 * np.pi * np.outer(t, modes) / N
        z = z + np.cos(phase) @ a + 1j * (np.sin(phase) @ b)
        z = omega_enforce(symmetry_project(z), problem.omega, problem.M, 0.25 * amplitude * R)
    return z


# --------------------------------------------------------------------------
# trajectories and validation


@dataclass
class ValidationReport:
    residual: float
    residual_tol: float
    min_separation: float
    min_separation_tol: float
    omega_signs: tuple[int, ...]
    omega_expected: tuple[int, ...]
    min_forward_speed: float
    endpoint_speeds: tuple[float, float]
    crossing_counts: tuple[int, ...]
    crossing_expected: tuple[int, ...]
    energy_spread: float
    symmetry_error: float
    monotone_tol: float = 1e-6
    endpoint_tol: float = 1e-6

    @property
    def residual_ok(self) -> bool:
        return self.residual < self.residual_tol

    @property
    def separation_ok(self) -> bool:
        return self.min_separation >= self.min_separation_tol

    @property
    def omega_ok(self) -> bool:
        return self.omega_signs == self.omega_expected

    @property
    def monotone_ok(self) -> bool:
        return self.min_forward_speed > -self.monotone_tol

    @property
    def endpoints_ok(self) -> bool:
        return max(abs(v) for v in self.endpoint_speeds) < self.endpoint_tol

    @property
    def crossings_ok(self) -> bool:
        return self.crossing_counts == self.crossing_expected

    @property
    def energy_ok(self) -> bool:
        # the energy wobble is a discretization error of the same order as the residual
        return self.energy_spread < max(self.residual_tol, 1e-9)

    @property
    def checks(self) -> dict[str, bool]:
        return {
            "residual": self.residual_ok,
            "separation": self.separation_ok,
            "omega": self.omega_ok,
            "monotone": self.monotone_ok,
            "endpoints": self.endpoints_ok,
            "crossings": self.crossings_ok,
            "energy": self.energy_ok,
        }

    @property
    def passed(self) -> bool:
        return all(self.checks.values())

    def to_json(self) -> dict:
        out = asdict(self)
        for key in ("omega_signs", "omega_expected", "endpoint_speeds", "crossing_counts",
                    "crossing_expected"):
            out[key] = list(out[key])
        out["checks"] = self.checks
        out["passed"] = self.passed
        return out


@dataclass
class Trajectory:
    """Samples of ``z_0`` on ``[0, N)`` with step ``1/M``."""

    omega: SignSequence
    M: int
    samples: np.ndarray
    action: float = float("nan")
    gradient_norm: float = float("nan")
    converged: bool = False
    history: list[float] = field(default_factory=list)
    validation: dict | None = None

    @property
    def N(self) -> int:
        return self.omega.strands

    def times(self) -> np.ndarray:
        return np.arange(self.N * self.M) / self.M

    def strand(self, i: int) -> np.ndarray:
        """Samples of ``z_i(t) = z_0(t + i)`` on the same grid."""
        return np.roll(self.samples, -i * self.M)

    def to_json(self) -> dict:
        return {
            "format": FORMAT_TAG,
            "version": FORMAT_VERSION,
            "N": self.N,
            "omega": self.omega.to_json(),
            "M": self.M,
            "samples": [[float(v.real), float(v.imag)] for v in self.samples],
            "action": self.action,
            "gradient_norm": self.gradient_norm,
            "converged": self.converged,
            "validation": self.validation,
        }

    @classmethod
    def from_json(cls, data: dict) -> "Trajectory":
        if data.get("format") != FORMAT_TAG:
            raise ValueError("not a trajectory file")
        if data.get("version") != FORMAT_VERSION:
            raise ValueError(f"unsupported trajectory version {data.get('version')}")
        omega = SignSequence.from_json(data["omega"])
        samples = np.array([complex(a, b) for a, b in data["samples"]])
        if omega.strands != data["N"] or samples.size != data["N"] * data["M"]:
            raise ValueError("inconsistent trajectory file")
        return cls(omega, int(data["M"]), samples, data.get("action", float("nan")),
                   data.get("gradient_norm", float("nan")), bool(data.get("converged", False)),
                   [], data.get("validation"))

    def save(self, path) -> None:
        Path(path).write_text(json.dumps(self.to_json(), indent=1) + "\n")

    @classmethod
    def load(cls, path) -> "Trajectory":
        return cls.from_json(json.loads(Path(path).read_text()))


def energy(z: np.ndarray, N: int, M: int) -> np.ndarray:
    """Total kinetic minus potential energy of the N bodies at each grid time."""
    h = 1.0 / M
    v = (np.roll(z, -1) - np.roll(z, 1)) / (2 * h)
    kinetic = sum(np.abs(np.roll(v, -j * M)) ** 2 for j in range(N)) / 2
    # each unordered pair appears twice when summing body j against j + d
    pot = sum(np.roll(1.0 / np.abs(z - w), -j * M) for j in range(N) for _, w in _partners(z, N, M)) / 2
    return kinetic - pot


def _arc_crossings(z: np.ndarray, problem: ChoreographyProblem) -> tuple[int, ...]:
    counts = []
    for j in range(problem.N):
        lo, hi = problem.half_index(j), problem.half_index(j + 1)
        im = z[lo: hi + 1].imag
        # endpoints t = 0 and N/2 sit on the axis by symmetry; skip them
        s = np.sign(im[1:-1]) if j in (0, problem.N - 1) else np.sign(im)
        if j == 0:
            s = np.sign(im[1:])
        elif j == problem.N - 1:
            s = np.sign(im[:-1])
        s = s[s != 0]
        counts.append(int(np.sum(s[1:] != s[:-1])))
    return tuple(counts)


def expected_crossings(omega: SignSequence) -> tuple[int, ...]:
    """Axis crossings per arc ``(j/2, (j+1)/2)``: one iff ``omega_j omega_{j+1} = -1``."""
    w = (0,) + omega.signs + (0,)
    return tuple(1 if w[j] * w[j + 1] == -1 else 0 for j in range(len(w) - 1))


def validate(traj: Trajectory, problem: ChoreographyProblem | None = None) -> ValidationReport:
    problem = problem or ChoreographyProblem(traj.omega, traj.M)
    z = traj.samples
    N, M, h = problem.N, problem.M, problem.h
    residual = float(np.max(np.abs(fourth_order_second_difference(z, h) - forces(z, N, M))))
    sep, _ = min_separation(z, N, M)
    vx = ((np.roll(z, -1) - np.roll(z, 1)) / (2 * h)).real
    half = problem.P // 2
    e = energy(z, N, M)
    sym = float(np.max(np.abs(z - symmetry_project(z))))
    return ValidationReport(
        residual=residual,
        residual_tol=problem.residual_limit,
        min_separation=sep,
        min_separation_tol=problem.min_separation,
        omega_signs=omega_signs(z, N - 1, M),
        omega_expected=problem.omega.signs,
        min_forward_speed=float(np.min(vx[1:half])),
        endpoint_speeds=(float(vx[0]), float(vx[half])),
        crossing_counts=_arc_crossings(z, problem),
        crossing_expected=expected_crossings(problem.omega),
        energy_spread=float((e.max() - e.min()) / abs(e.mean())),
        symmetry_error=sym,
        monotone_tol=problem.monotone_tol,
        endpoint_tol=problem.endpoint_tol,
    )


# --------------------------------------------------------------------------
# solver


def _bounds(problem: ChoreographyProblem) -> list[tuple[float | None, float | None]]:
    half = problem.P // 2
    bounds: list[tuple[float | None, float | None]] = [(None, None)] * problem.P
    for j, w in enumerate(problem.omega.signs, start=1):
        i = half + problem.half_index(j)  # y_i lives at offset half + i
        bounds[i] = (problem.omega_floor, None) if w > 0 else (None, -problem.omega_floor)
    return bounds


def _feasible(u: np.ndarray, problem: ChoreographyProblem) -> bool:
    z = expand(u, problem)
    if omega_signs(z, problem.N - 1, problem.M) != problem.omega.signs:
        return False
    return min_separation(z, problem.N, problem.M)[0] >= problem.min_separation


def _newton_polish(u: np.ndarray, problem: ChoreographyProblem, history: list[float]):
    J = _expansion_matrix(problem)
    keep = np.arange(1, problem.P)  # pin x_0: translation along x is a null direction
    for _ in range(problem.newton_iter):
        z = expand(u, problem)
        g = reduce_gradient(action_gradient(z, problem), problem)
        gnorm = float(np.linalg.norm(g))
        if gnorm < problem.gradient_tol * 1e-2:
            break
        H = (J.T @ action_hessian(z, problem) @ J).tocsc()
        step = np.zeros_like(u)
        step[keep] = scipy.sparse.linalg.spsolve(H[keep][:, keep], -g[keep])
        t = 1.0
        while t > 1e-4:
            trial = u + t * step
            if _feasible(trial, problem):
                zt = expand(trial, problem)
                gt = np.linalg.norm(reduce_gradient(action_gradient(zt, problem), problem))
                if gt < gnorm:
                    break
            t /= 2
        else:
            break
        u = trial
        history.append(action_value(expand(u, problem), problem))
    return u


def solve(problem: ChoreographyProblem, seed: int = 0, initial: np.ndarray | None = None) -> Trajectory:
    """Minimize the discrete action over symmetric loops obeying the omega signs.

    Quasi-Newton (L-BFGS-B, with the omega conditions as bounds on the
    constrained samples) brings the loop near a critical point; Newton steps
    with the sparse analytic Hessian then drive the gradient to round-off.
    Both stages reject steps that bring bodies closer than ``min_separation``.
    """
    z0 = seed_path(problem, seed) if initial is None else np.asarray(initial, dtype=complex)
    z0 = omega_enforce(symmetry_project(z0), problem.omega, problem.M, problem.omega_floor)
    u0 = restrict(z0, problem)
    history: list[float] = []
    big = 1e6 * abs(action_value(z0, problem))

    def fun(u):
        z = expand(u, problem)
        if min_separation(z, problem.N, problem.M)[0] < problem.min_separation:
            # step rejection: the line search backtracks from an overwhelming value
            return big, np.zeros_like(u)
        return action_value(z, problem), reduce_gradient(action_gradient(z, problem), problem)

    def record(u):
        history.append(action_value(expand(u, problem), problem))

    history.append(action_value(z0, problem))
    res = scipy.optimize.minimize(fun, u0, jac=True, method="L-BFGS-B", bounds=_bounds(problem),
                                  callback=record,
                                  options={"maxiter": problem.max_iter, "gtol": 1e-11,
                                           "ftol": 1e-15, "maxcor": 30})
    u = _newton_polish(res.x, problem, history)
    z = expand(u, problem)
    z = z - z.real.mean()  # recentre the free x translation
    g = reduce_gradient(action_gradient(z, problem), problem)
    gnorm = float(np.linalg.norm(g))
    converged = gnorm < problem.gradient_tol and _feasible(restrict(z, problem), problem)
    traj = Trajectory(problem.omega, problem.M, z, action_value(z, problem), gnorm, converged, history)
    traj.validation = validate(traj, problem).to_json()
    return traj
