"""Braid words in Artin generators, their permutations, and the word problem.

Letters are signed integers: ``i`` stands for ``sigma_i`` and ``-i`` for its
inverse.  Equality of braids is decided through the Artin action of ``B_n`` on
the free group ``F_n = <x_1, ..., x_n>``, which is faithful:

    sigma_i :  x_i -> x_i x_{i+1} x_i^-1,   x_{i+1} -> x_i

and the inverse substitution for ``sigma_i^-1``.  A word ``a_1 a_2 ... a_k``
acts as the composite ``phi_{a_1} o phi_{a_2} o ... o phi_{a_k}``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .combinatorics import Composition, SignSequence, theta

#: Abort the Artin action when the total image length exceeds this.
MAX_IMAGE_LENGTH = 2_000_000

FreeWord = tuple[int, ...]


class BraidError(ValueError):
    pass


class ImageTooLong(RuntimeError):
    pass


# --------------------------------------------------------------------------
# free group words


def free_reduce(letters: Iterable[int]) -> FreeWord:
    stack: list[int] = []
    for a in letters:
        if stack and stack[-1] == -a:
            stack.pop()
        else:
            stack.append(a)
    return tuple(stack)


def free_inverse(word: Sequence[int]) -> FreeWord:
    return tuple(-a for a in reversed(word))


def cyclic_reduce(word: Sequence[int]) -> FreeWord:
    """Strip matching inverse pairs from both ends of a freely reduced word."""
    word = free_reduce(word)
    i, j = 0, len(word) - 1
    while i < j and word[i] == -word[j]:
        i += 1
        j -= 1
    return tuple(word[i:j + 1])


def apply_images(images: Sequence[FreeWord], word: Iterable[int]) -> FreeWord:
    """Apply the endomorphism ``x_i -> images[i-1]`` to ``word``."""
    stack: list[int] = []
    inverses: dict[int, FreeWord] = {}
    for a in word:
        if a > 0:
            piece = images[a - 1]
        else:
            piece = inverses.get(a)
            if piece is None:
                piece = inverses[a] = free_inverse(images[-a - 1])
        for b in piece:
            if stack and stack[-1] == -b:
                stack.pop()
            else:
                stack.append(b)
    return tuple(stack)


def format_free_word(word: Sequence[int]) -> str:
    if not word:
        return "1"
    return " ".join(f"x{a}" if a > 0 else f"x{-a}^-1" for a in word)


# --------------------------------------------------------------------------
# braid words


@dataclass(frozen=True)
class BraidWord:
    strands: int
    letters: tuple[int, ...] = ()

    def __post_init__(self):
        if self.strands < 2:
            raise BraidError(f"braids need at least 2 strands, got {self.strands}")
        letters = tuple(int(a) for a in self.letters)
        for a in letters:
            if a == 0 or abs(a) > self.strands - 1:
                raise BraidError(f"generator index {a} out of range for B_{self.strands}")
        object.__setattr__(self, "letters", letters)

    def __len__(self):
        return len(self.letters)

    def __iter__(self):
        return iter(self.letters)

    def __mul__(self, other: "BraidWord") -> "BraidWord":
        return concat(self, other)

    def __pow__(self, k: int) -> "BraidWord":
        return power(self, k)

    def __str__(self):
        return format_braid(self)

    @property
    def exponent_sum(self) -> int:
        return sum(1 if a > 0 else -1 for a in self.letters)

    def to_json(self) -> dict:
        return {"strands": self.strands, "letters": list(self.letters)}

    @classmethod
    def from_json(cls, data: dict) -> "BraidWord":
        return cls(int(data["strands"]), tuple(data["letters"]))

    @classmethod
    def parse(cls, text: str, strands: int | None = None) -> "BraidWord":
        """Parse the text syntax ``s1 s2' s3``; an apostrophe marks an inverse.

        Without ``strands`` the strand count is one more than the largest index.
        """
        letters = []
        for tok in text.replace(",", " ").split():
            if tok in ("1", "e", "id"):
                continue
            inv = tok.endswith("'")
            body = tok.rstrip("'")
            if not body.startswith(("s", "S")) or not body[1:].isdigit():
                raise BraidError(f"bad braid letter {tok!r}")
            i = int(body[1:])
            letters.append(-i if inv else i)
        if strands is None:
            strands = max((abs(a) for a in letters), default=1) + 1
        return cls(strands, tuple(letters))


def format_braid(b: BraidWord) -> str:
    if not b.letters:
        return "1"
    return " ".join(f"s{a}" if a > 0 else f"s{-a}'" for a in b.letters)


def identity(n: int) -> BraidWord:
    return BraidWord(n, ())


def alpha(omega: SignSequence) -> BraidWord:
    """``sigma_1^{w_1} sigma_2^{w_2} ... sigma_{N-1}^{w_{N-1}}``."""
    return BraidWord(omega.strands, tuple(i * s for i, s in enumerate(omega.signs, start=1)))


def e_braid(omega: SignSequence) -> BraidWord:
    """Product over even indices, ascending."""
    return BraidWord(omega.strands, tuple(i * omega[i] for i in range(2, omega.strands, 2)))


def o_braid(omega: SignSequence, descending: bool = True) -> BraidWord:
    """Product over odd indices; the letters commute, stored descending by default."""
    idx = list(range(1, omega.strands, 2))
    if descending:
        idx.reverse()
    return BraidWord(omega.strands, tuple(i * omega[i] for i in idx))


def beta(m: Composition) -> BraidWord:
    return alpha(theta(m))


def _same_strands(a: BraidWord, b: BraidWord) -> None:
    if a.strands != b.strands:
        raise BraidError(f"strand mismatch: B_{a.strands} vs B_{b.strands}")


def concat(*words: BraidWord) -> BraidWord:
    if not words:
        raise BraidError("concat needs at least one word")
    for w in words[1:]:
        _same_strands(words[0], w)
    return BraidWord(words[0].strands, tuple(a for w in words for a in w.letters))


def rev(b: BraidWord) -> BraidWord:
    return BraidWord(b.strands, b.letters[::-1])


def mirror(b: BraidWord) -> BraidWord:
    return BraidWord(b.strands, tuple(-a for a in b.letters))


def inverse(b: BraidWord) -> BraidWord:
    return BraidWord(b.strands, tuple(-a for a in reversed(b.letters)))


def power(b: BraidWord, k: int) -> BraidWord:
    if k < 0:
        return power(inverse(b), -k)
    return BraidWord(b.strands, b.letters * k)


def conjugate(b: BraidWord, h: BraidWord) -> BraidWord:
    """``h^-1 b h``."""
    return concat(inverse(h), b, h)


def half_twist(n: int) -> BraidWord:
    letters: list[int] = []
    for top in range(n - 1, 0, -1):
        letters.extend(range(1, top + 1))
    return BraidWord(n, tuple(letters))


def full_twist(n: int) -> BraidWord:
    return power(half_twist(n), 2)


# --------------------------------------------------------------------------
# permutations


@dataclass(frozen=True)
class Permutation:
    """Bijection of ``{1, ..., n}``; ``images[p-1]`` is the image of ``p``.

    ``a * b`` applies ``a`` first, then ``b``.
    """

    images: tuple[int, ...]

    def __post_init__(self):
        if sorted(self.images) != list(range(1, len(self.images) + 1)):
            raise ValueError(f"not a permutation: {self.images}")

    def __call__(self, p: int) -> int:
        return self.images[p - 1]

    def __mul__(self, other: "Permutation") -> "Permutation":
        return Permutation(tuple(other(self(p)) for p in range(1, len(self.images) + 1)))

    def is_identity(self) -> bool:
        return all(q == p for p, q in enumerate(self.images, start=1))

    def cycles(self) -> list[tuple[int, ...]]:
        seen, out = set(), []
        for start in range(1, len(self.images) + 1):
            if start in seen:
                continue
            cyc, p = [], start
            while p not in seen:
                seen.add(p)
                cyc.append(p)
                p = self(p)
            out.append(tuple(cyc))
        return out

    def __str__(self):
        nontrivial = [c for c in self.cycles() if len(c) > 1]
        if not nontrivial:
            return "()"
        return "".join("(" + " ".join(map(str, c)) + ")" for c in nontrivial)


def permutation(b: BraidWord) -> Permutation:
    """Track where the strand starting at each position ends, reading letters left to right."""
    at = list(range(1, b.strands + 1))  # at[pos-1] = strand currently at pos
    for a in b.letters:
        i = abs(a)
        at[i - 1], at[i] = at[i], at[i - 1]
    images = [0] * b.strands
    for pos, strand in enumerate(at, start=1):
        images[strand - 1] = pos
    return Permutation(tuple(images))


def is_pure(b: BraidWord) -> bool:
    return permutation(b).is_identity()


def is_cyclic(b: BraidWord) -> bool:
    return len(permutation(b).cycles()) == 1


# --------------------------------------------------------------------------
# Artin action and the word problem


def _generator_images(a: int) -> dict[int, FreeWord]:
    i = abs(a)
    if a > 0:
        return {i: (i, i + 1, -i), i + 1: (i,)}
    return {i: (i + 1,), i + 1: (-(i + 1), i, i + 1)}


def artin_action(b: BraidWord, max_length: int = MAX_IMAGE_LENGTH) -> tuple[FreeWord, ...]:
    """Images of ``x_1, ..., x_n`` under the automorphism induced by ``b``."""
    images: list[FreeWord] = [(j,) for j in range(1, b.strands + 1)]
    for a in b.letters:
        # images <- images o phi_a; only x_i and x_{i+1} move under phi_a
        i = abs(a)
        subs = _generator_images(a)
        new_i = apply_images(images, subs[i])
        new_i1 = apply_images(images, subs[i + 1])
        images[i - 1], images[i] = new_i, new_i1
        if len(new_i) + len(new_i1) > max_length:
            raise ImageTooLong(f"Artin action image length exceeds {max_length}")
    return tuple(images)


def word_equal(a: BraidWord, b: BraidWord) -> bool:
    _same_strands(a, b)
    return artin_action(concat(a, inverse(b))) == tuple((j,) for j in range(1, a.strands + 1))


def is_identity(b: BraidWord) -> bool:
    return word_equal(b, identity(b.strands))


# --------------------------------------------------------------------------
# explicit conjugations


def _block(omega: SignSequence, lo: int, hi: int) -> BraidWord:
    """``sigma_lo^{w_lo} ... sigma_hi^{w_hi}``."""
    return BraidWord(omega.strands, tuple(i * omega[i] for i in range(lo, hi + 1)))


def eo_alpha_chain(omega: SignSequence) -> list[tuple[BraidWord, BraidWord]]:
    """Conjugation cascade from ``e o`` to ``alpha``.

    Returns ``[(c_0, b_0), (c_1, b_1), ...]`` with ``b_k = c_k^-1 b_{k-1} c_k``
    (``b_{-1} = e o``) and the last ``b`` equal to ``alpha`` letter for letter.
    The first conjugator is ``e`` which turns ``e o`` into ``o e``; after that
    the tail blocks ``sigma_{2k-1} ... sigma_{N-1}`` are moved to the back.
    """
    n = omega.strands
    pairs = (n - 1 + 1) // 2  # blocks sigma_{2k-1} sigma_{2k}, the last may be a single letter
    e = e_braid(omega)

    def pair(k):
        return _block(omega, 2 * k - 1, min(2 * k, n - 1))

    def stage(top):
        # T_top . P_{top-1} ... P_1 with T_top = sigma_{2 top - 1} ... sigma_{n-1}
        return concat(_block(omega, 2 * top - 1, n - 1), *(pair(k) for k in range(top - 1, 0, -1)))

    chain = [(e, concat(o_braid(omega), e))]
    for top in range(pairs, 1, -1):
        chain.append((_block(omega, 2 * top - 1, n - 1), stage(top - 1)))
    return chain


def conjugacy_witness_eo_alpha(omega: SignSequence) -> BraidWord:
    """``h`` with ``h^-1 (e o) h = alpha``."""
    chain = eo_alpha_chain(omega)
    return concat(*(c for c, _ in chain))


def conjugacy_witness_rev_alpha(omega: SignSequence) -> BraidWord:
    """``h`` with ``h^-1 rev(alpha) h = alpha``.

    Conjugates successively by ``sigma_{N-1}``, ``sigma_{N-2} sigma_{N-1}``,
    ..., ``sigma_2 ... sigma_{N-1}`` (exponents from ``omega``).
    """
    n = omega.strands
    blocks = [_block(omega, s, n - 1) for s in range(n - 1, 1, -1)]
    if not blocks:
        return identity(n)
    return concat(*blocks)


def delta_conjugate(b: BraidWord) -> BraidWord:
    """``Delta b Delta^-1``."""
    d = half_twist(b.strands)
    return concat(d, b, inverse(d))


# --------------------------------------------------------------------------
# growth-rate oracle


#
# Two routes.  "curves" iterates the braid on integer Dynnikov coordinates of
# a multicurve; the action is piecewise linear, so a step costs O(len(b))
# integer operations no matter how long the curve has become, and hundreds of
# iterations are cheap.  "words" iterates the Artin action on free-group
# words and measures cyclically reduced lengths; it is exact but the words
# grow like lambda^k, so it only resolves small dilatations to a few digits.


class GrowthRateNotConverged(RuntimeError):
    def __init__(self, estimate: float, iterations: int, reason: str):
        super().__init__(f"growth rate did not converge after {iterations} iterations "
                         f"({reason}); last estimate {estimate:.6f}")
        self.estimate = estimate
        self.iterations = iterations


@dataclass(frozen=True)
class GrowthEstimate:
    value: float
    iterations: int
    converged: bool
    method: str
    log_lengths: tuple[float, ...]


def _pos(x: int) -> int:
    return x if x > 0 else 0


def _neg(x: int) -> int:
    return x if x < 0 else 0


def dynnikov_step(a: list[int], b: list[int], i: int, sign: int) -> None:
    """Apply ``sigma_i^sign`` in place to Dynnikov coordinates ``(a, b)``.

    Coordinates describe an integral lamination of a disk with ``len(a) + 2``
    punctures.  Only interior generators, ``2 <= i <= len(a)``, are handled;
    :func:`curve_growth` embeds ``B_n`` so that no other generator occurs.
    """
    p, q = i - 2, i - 1
    ap, aq, bp, bq = a[p], a[q], b[p], b[q]
    if sign > 0:
        d = ap - aq + _pos(bq) - _neg(bp)
        a[p] = ap + _pos(bp) + _pos(_pos(bq) - d)
        b[p] = bq - _pos(d)
        a[q] = aq + _neg(bq) + _neg(_neg(bp) + d)
        b[q] = bp + _pos(d)
    else:
        c = ap - aq - _pos(bq) + _neg(bp)
        a[p] = ap - _pos(bp) - _pos(_pos(bq) + c)
        b[p] = bq + _neg(c)
        a[q] = aq - _neg(bq) - _neg(_neg(bp) - c)
        b[q] = bp - _neg(c)


def _window_estimates(logs: list[float], window: int) -> float:
    return math.exp((logs[-1] - logs[-1 - window]) / window)


SUBEXP_CHECK = 256


def curve_growth(b: BraidWord, max_iter: int = 3000, tol: float = 1e-6,
                 window: int = 16, min_iter: int = 64) -> GrowthEstimate:
    """Growth rate of a multicurve's complexity under iteration of ``b``.

    ``B_n`` acts on a disk with two extra punctures, one at each end, so that
    ``sigma_k`` becomes the interior generator ``k + 1``.  The complexity is
    the l1 norm of the coordinates of two generic curves.  The estimate is
    the geometric mean growth over the last ``window`` steps; it has
    converged once it moves by less than ``tol`` over one window.

    Periodic and reducible braids without a pseudo-Anosov piece make curves
    grow at most linearly.  Every ``SUBEXP_CHECK`` steps the complexity at
    step k is compared with step k/2; a ratio below 4 means the growth is
    sub-exponential (any dilatation above 1.011 would give more), and the
    value 1.0 is returned.
    """
    n = b.strands
    starts = [([0] * n, [1] * n), ([1] * n, [(-1) ** j for j in range(n)])]
    letters = [(abs(x) + 1, 1 if x > 0 else -1) for x in b.letters]
    logs: list[float] = []
    est = prev = float("nan")
    for it in range(1, max_iter + 1):
        norm = 0
        for a, bb in starts:
            for i, s in letters:
                dynnikov_step(a, bb, i, s)
            norm += sum(map(abs, a)) + sum(map(abs, bb))
        logs.append(math.log(norm))
        if it > window:
            est = _window_estimates(logs, window)
        if it % SUBEXP_CHECK == 0 and logs[-1] - logs[it // 2 - 1] < math.log(4.0):
            return GrowthEstimate(1.0, it, True, "curves", tuple(logs))
        if it >= max(min_iter, 2 * window + 1):
            prev = math.exp((logs[-1 - window] - logs[-1 - 2 * window]) / window)
            if abs(est - prev) < tol:
                return GrowthEstimate(est, it, True, "curves", tuple(logs))
    return GrowthEstimate(est, max_iter, False, "curves", tuple(logs))


def growth_probes(n: int) -> list[FreeWord]:
    """Curves around adjacent puncture pairs, ``x_i x_{i+1}``.

    The generators themselves are peripheral: their images are conjugates of
    generators, so their cyclic length never grows.
    """
    return [(i, i + 1) for i in range(1, n)]


def word_growth(b: BraidWord, max_iter: int = 60, tol: float = 1e-3, stable: int = 4,
                max_length: int = 400_000) -> GrowthEstimate:
    """Growth rate of cyclically reduced probe lengths under the Artin action.

    The estimate is the square root of the two-step ratio of the summed probe
    lengths, which damps the period-two wobble of complex subdominant terms.
    Converged means ``stable`` consecutive estimates within ``tol`` of each
    other.
    """
    images = artin_action(b)
    probes = [cyclic_reduce(w) for w in growth_probes(b.strands)]
    logs = [math.log(sum(len(w) for w in probes))]
    estimates: list[float] = []
    it = 0
    while it < max_iter and max(len(w) for w in probes) <= max_length:
        it += 1
        probes = [cyclic_reduce(apply_images(images, w)) for w in probes]
        logs.append(math.log(sum(len(w) for w in probes)))
        if it >= 2:
            estimates.append(math.exp((logs[-1] - logs[-3]) / 2))
            tail = estimates[-stable:]
            if len(tail) == stable and max(tail) - min(tail) < tol:
                return GrowthEstimate(estimates[-1], it, True, "words", tuple(logs))
    last = estimates[-1] if estimates else float("nan")
    return GrowthEstimate(last, it, False, "words", tuple(logs))


GROWTH_METHODS = {"curves": curve_growth, "words": word_growth}


def growth_rate(b: BraidWord, method: str = "curves", **kwargs) -> GrowthEstimate:
    """Estimate the exponential growth rate of curves under iteration of ``b``.

    For a pseudo-Anosov braid this is its dilatation; for periodic and
    reducible-with-periodic-pieces braids it tends to 1.
    """
    try:
        fn = GROWTH_METHODS[method]
    except KeyError:
        raise ValueError(f"unknown growth method {method!r}") from None
    return fn(b, **kwargs)


def growth_rate_estimate(b: BraidWord, method: str = "curves", **kwargs) -> float:
    """Like :func:`growth_rate` but returns the value and raises when not converged."""
    g = growth_rate(b, method=method, **kwargs)
    if not g.converged:
        raise GrowthRateNotConverged(g.value, g.iterations, f"{method} route")
    return g.value
