"""Read the braid word of a choreography off its trajectory.

The strands ``z_i(t) = z_0(t + i)`` are projected to the x-axis over one
primitive period ``(eps, 1 + eps)``.  Each time two x-adjacent strands swap
places the diagram gets a letter ``sigma_p^{+-1}``: ``p`` is the lower of the
two positions (1-based, left to right) and the exponent is -1 when the
strand coming from the left passes above (larger Im), +1 otherwise.

Letters are written latest first, so the word reads like the diagrams drawn
bottom to top.  Crossings at the same instant on disjoint position pairs
commute; they form one layer, written in ascending position order.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.interpolate import CubicSpline
from scipy.optimize import brentq

from .braidcore import (BraidWord, alpha, concat, conjugacy_witness_eo_alpha, conjugate, e_braid,
                        format_braid, growth_rate, is_cyclic, o_braid, word_equal)
from .choreography import Trajectory
from .combinatorics import SignSequence, negate
from .spectral import PERIODIC, classify, stretch_factor_for

#: Crossings closer than this in time are treated as one layer.
SIMULTANEOUS = 1e-7
#: Crossings between SIMULTANEOUS and this apart are too close to order reliably.
SEPARATION = 1e-5
#: Minimum |Im difference| for a readable over/under.
IM_GAP = 1e-6
#: Scan samples per grid step.
REFINE = 8


class AmbiguousCrossing(ValueError):
    def __init__(self, time: float, reason: str):
        super().__init__(f"ambiguous crossing at t = {time:.10f}: {reason}")
        self.time = time


@dataclass(frozen=True)
class CrossingEvent:
    time: float
    strands: tuple[int, int]  # (left before, right before), body indices
    position: int  # 1-based lower x-rank
    sign: int

    @property
    def letter(self) -> int:
        return self.position * self.sign


def strand_interpolant(traj: Trajectory) -> CubicSpline:
    """Periodic cubic spline of ``z_0`` on ``[0, N]``."""
    t = np.append(traj.times(), traj.N)
    z = np.append(traj.samples, traj.samples[0])
    return CubicSpline(t, z, bc_type="periodic")


def _crossing_times(spline, i: int, k: int, lo: float, hi: float, steps: int) -> list[float]:
    def f(t):
        return float((spline(t + i) - spline(t + k)).real)

    grid = np.linspace(lo, hi, steps + 1)
    vals = (spline(grid + i) - spline(grid + k)).real
    roots = []
    for a, b, fa, fb in zip(grid[:-1], grid[1:], vals[:-1], vals[1:]):
        if fa == 0:
            roots.append(float(a))
        elif fa * fb < 0:
            roots.append(brentq(f, a, b, xtol=1e-12))
    return roots


def crossing_events(traj: Trajectory, epsilon: float | None = None) -> list[CrossingEvent]:
    """All x-crossings of the projected strands on ``(eps, 1 + eps)`` in time order."""
    N, M = traj.N, traj.M
    eps = 1.0 / (8 * M) if epsilon is None else epsilon
    spline = strand_interpolant(traj)
    lo, hi = eps, 1.0 + eps
    start = np.array([spline(lo + i) for i in range(N)])
    xs = np.sort(start.real)
    if np.min(np.diff(xs)) < 1e-9:
        raise AmbiguousCrossing(lo, "strands share an x-coordinate at the base time")
    raw = []
    steps = REFINE * M
    for i in range(N):
        for k in range(i + 1, N):
            for t in _crossing_times(spline, i, k, lo, hi, steps):
                raw.append((t, i, k))
    raw.sort()
    order = [int(i) for i in np.argsort(start.real)]
    events = []
    for t, i, k in raw:
        pi, pk = order.index(i), order.index(k)
        if abs(pi - pk) != 1:
            # coincident x without adjacency is not a double point of the diagram
            continue
        left, right = (i, k) if pi < pk else (k, i)
        p = min(pi, pk)
        gap = float((spline(t + left) - spline(t + right)).imag)
        if abs(gap) < IM_GAP:
            raise AmbiguousCrossing(t, f"strands {left} and {right} pass with |dIm| = {abs(gap):.2e}")
        events.append(CrossingEvent(t, (left, right), p + 1, -1 if gap > 0 else 1))
        order[p], order[p + 1] = order[p + 1], order[p]
    return events


def group_layers(events: list[CrossingEvent]) -> list[list[CrossingEvent]]:
    """Split time-ordered events into layers of simultaneous, commuting crossings."""
    layers: list[list[CrossingEvent]] = []
    for ev in events:
        if layers and ev.time - layers[-1][-1].time < SIMULTANEOUS:
            layer = layers[-1]
            if any(abs(ev.position - other.position) < 2 for other in layer):
                raise AmbiguousCrossing(ev.time, "simultaneous crossings on overlapping positions")
            layer.append(ev)
            continue
        if layers and ev.time - layers[-1][-1].time < SEPARATION:
            raise AmbiguousCrossing(ev.time, "crossings too close to order")
        layers.append([ev])
    return layers


def extract_braid(traj: Trajectory, epsilon: float | None = None) -> BraidWord:
    """Primitive braid word of a choreography trajectory."""
    layers = group_layers(crossing_events(traj, epsilon))
    letters = []
    for layer in reversed(layers):
        letters.extend(ev.letter for ev in sorted(layer, key=lambda e: e.position))
    return BraidWord(traj.N, tuple(letters))


def expected_primitive(omega: SignSequence) -> BraidWord:
    """``e_{-omega}`` followed by ``o_{-omega}``, each in ascending index order."""
    w = negate(omega)
    return concat(e_braid(w), o_braid(w, descending=False))


@dataclass
class VerificationReport:
    omega: SignSequence
    extracted: BraidWord
    expected: BraidWord
    literal_match: bool
    conjugate_match: bool
    classification: str
    growth_lambda: float
    polynomial_lambda: float
    lambda_radius: float
    lambda_match: bool
    cyclic: bool

    @property
    def full_lambda(self) -> float:
        """Stretch factor of the full-period braid, the N-th power of the primitive one."""
        return self.polynomial_lambda ** self.omega.strands

    @property
    def passed(self) -> bool:
        return self.literal_match and self.conjugate_match and self.lambda_match

    def to_json(self) -> dict:
        return {
            "omega": self.omega.to_json(),
            "extracted": format_braid(self.extracted),
            "expected": format_braid(self.expected),
            "checks": {
                "literal": self.literal_match,
                "conjugate": self.conjugate_match,
                "lambda": self.lambda_match,
            },
            "classification": self.classification,
            "growth_lambda": self.growth_lambda,
            "polynomial_lambda": self.polynomial_lambda,
            "lambda_radius": self.lambda_radius,
            "full_lambda": self.full_lambda,
            "cyclic_permutation": self.cyclic,
            "passed": self.passed,
        }


def verify_braid_type(traj: Trajectory, omega: SignSequence | None = None,
                      lambda_tol: float = 2e-2) -> VerificationReport:
    """Compare the extracted word with the predicted primitive braid three ways.

    (a) letter for letter against :func:`expected_primitive`; (b) after
    conjugating by the explicit witness, equal as braids to ``alpha_{-omega}``;
    (c) growth rate of the extracted word against the polynomial stretch
    factor, or both periodic.
    """
    omega = traj.omega if omega is None else omega
    word = extract_braid(traj)
    expected = expected_primitive(omega)
    target = negate(omega)
    literal = word.letters == expected.letters
    conj = word_equal(conjugate(word, conjugacy_witness_eo_alpha(target)), alpha(target))
    kind = classify(target)
    growth = growth_rate(word).value
    if kind == PERIODIC:
        poly, radius = 1.0, 0.0
        match = growth == 1.0
    else:
        rep = stretch_factor_for(target)
        poly, radius = rep.value, rep.radius
        match = abs(growth - poly) < lambda_tol
    return VerificationReport(omega, word, expected, literal, conj, kind, growth, poly, radius,
                              match, is_cyclic(word))
