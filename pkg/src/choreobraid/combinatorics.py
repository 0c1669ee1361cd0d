"""Compositions of integers, sign sequences and the bijection between them.

A composition ``m = (m_1, ..., m_{k+1})`` of ``N - 1`` is encoded as a sign
sequence of length ``N - 1`` whose runs have lengths ``m_i`` and alternate
in sign starting from ``+1``.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterator, Sequence

#: Default cap on ``N`` for anything that enumerates all of Omega_N.
DEFAULT_STRAND_CAP = 24


@dataclass(frozen=True, order=True)
class Composition:
    """An ordered tuple of positive integers."""

    parts: tuple[int, ...]

    def __post_init__(self):
        parts = tuple(int(p) for p in self.parts)
        if not parts:
            raise ValueError("a composition needs at least one part")
        if any(p < 1 for p in parts):
            raise ValueError(f"composition parts must be positive: {parts}")
        object.__setattr__(self, "parts", parts)

    @property
    def total(self) -> int:
        return sum(self.parts)

    @property
    def k(self) -> int:
        """Number of blocks minus one."""
        return len(self.parts) - 1

    @property
    def strands(self) -> int:
        return self.total + 1

    def __len__(self):
        return len(self.parts)

    def __iter__(self):
        return iter(self.parts)

    def __str__(self):
        return "(" + ",".join(map(str, self.parts)) + ")"

    def to_json(self) -> list[int]:
        return list(self.parts)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "Composition":
        return cls(tuple(data))

    @classmethod
    def parse(cls, text: str) -> "Composition":
        """Parse ``"1,2"``, ``"(1,2)"`` or ``"1 2"``."""
        cleaned = text.strip().strip("()[]").replace(",", " ")
        try:
            return cls(tuple(int(tok) for tok in cleaned.split()))
        except ValueError as exc:
            raise ValueError(f"cannot parse composition {text!r}") from exc


@dataclass(frozen=True)
class SignSequence:
    """An element of Omega_N: a tuple of N-1 signs, each +1 or -1."""

    signs: tuple[int, ...]

    def __post_init__(self):
        signs = tuple(self.signs)
        if len(signs) < 2:
            raise ValueError("a sign sequence needs N - 1 >= 2 entries")
        for s in signs:
            if s not in (1, -1) or isinstance(s, bool):
                raise ValueError(f"sign entries must be +1 or -1, got {s!r}")
        object.__setattr__(self, "signs", tuple(int(s) for s in signs))

    @property
    def strands(self) -> int:
        return len(self.signs) + 1

    def __len__(self):
        return len(self.signs)

    def __iter__(self):
        return iter(self.signs)

    def __getitem__(self, j: int) -> int:
        """1-based access, ``omega[j] = omega_j``."""
        if not 1 <= j <= len(self.signs):
            raise IndexError(j)
        return self.signs[j - 1]

    def __neg__(self) -> "SignSequence":
        return negate(self)

    def __str__(self):
        return "".join("+" if s > 0 else "-" for s in self.signs)

    def __repr__(self):
        return f"SignSequence({str(self)!r})"

    def to_json(self) -> list[int]:
        return list(self.signs)

    @classmethod
    def from_json(cls, data: Sequence[int]) -> "SignSequence":
        return cls(tuple(int(s) for s in data))

    @classmethod
    def parse(cls, text: str) -> "SignSequence":
        """Parse ``"+-+"`` or ``"1,-1,1"``."""
        text = text.strip()
        if text and set(text) <= {"+", "-"}:
            return cls(tuple(1 if c == "+" else -1 for c in text))
        try:
            return cls(tuple(int(tok) for tok in text.strip("()[]").replace(",", " ").split()))
        except ValueError as exc:
            raise ValueError(f"cannot parse sign sequence {text!r}") from exc


def _check_strands(N: int, cap: int | None) -> None:
    if N < 3:
        raise ValueError(f"need N >= 3 strands, got {N}")
    if cap is not None and N > cap:
        raise ValueError(f"N = {N} exceeds the enumeration cap {cap}")


def iter_compositions(n: int) -> Iterator[Composition]:
    """Yield the compositions of ``n`` in lexicographic order of parts."""
    if n < 1:
        raise ValueError(f"compositions are defined for n >= 1, got {n}")

    def rec(remaining):
        if remaining == 0:
            yield ()
            return
        for first in range(1, remaining + 1):
            for rest in rec(remaining - first):
                yield (first,) + rest

    for parts in rec(n):
        yield Composition(parts)


def enumerate_compositions(n: int) -> list[Composition]:
    return list(iter_compositions(n))


def theta(m: Composition) -> SignSequence:
    """Map a composition of N-1 to the sign sequence with runs ``m_1, m_2, ...``."""
    signs: list[int] = []
    for block, length in enumerate(m.parts):
        signs.extend([(-1) ** block] * length)
    return SignSequence(tuple(signs))


def theta_inverse(omega: SignSequence) -> Composition:
    """Run-length encoding of a sign sequence starting with +1."""
    if omega.signs[0] != 1:
        raise ValueError(f"{omega} is not in Omega_N^+ (first sign must be +1)")
    return Composition(tuple(len(list(run)) for _, run in itertools.groupby(omega.signs)))


def negate(omega: SignSequence) -> SignSequence:
    return SignSequence(tuple(-s for s in omega.signs))


def reverse(omega: SignSequence) -> SignSequence:
    return SignSequence(omega.signs[::-1])


def _order_key(omega: SignSequence) -> tuple[int, ...]:
    # +1 sorts before -1
    return tuple(0 if s > 0 else 1 for s in omega.signs)


def equivalence_class(omega: SignSequence) -> frozenset[SignSequence]:
    """The set ``{omega, -omega, reversed, -reversed}`` with duplicates removed."""
    rev = reverse(omega)
    return frozenset({omega, negate(omega), rev, negate(rev)})


def canonical_representative(omega: SignSequence) -> SignSequence:
    """Lexicographically smallest class member under the order +1 < -1."""
    return min(equivalence_class(omega), key=_order_key)


def all_sign_sequences(N: int, cap: int | None = DEFAULT_STRAND_CAP) -> Iterator[SignSequence]:
    _check_strands(N, cap)
    for signs in itertools.product((1, -1), repeat=N - 1):
        yield SignSequence(signs)


def class_representatives(N: int, cap: int | None = DEFAULT_STRAND_CAP) -> list[SignSequence]:
    """Canonical representatives of all classes of Omega_N, sorted."""
    reps = {canonical_representative(w) for w in all_sign_sequences(N, cap)}
    return sorted(reps, key=_order_key)


def count_classes(N: int, cap: int | None = DEFAULT_STRAND_CAP) -> int:
    """Number of equivalence classes of Omega_N, by exhaustive enumeration."""
    seen: set[SignSequence] = set()
    count = 0
    for omega in all_sign_sequences(N, cap):
        if omega in seen:
            continue
        seen |= equivalence_class(omega)
        count += 1
    return count


def class_count_formula(N: int) -> int:
    return 2 ** (N - 3) + 2 ** ((N - 3) // 2)


def omega_max(N: int) -> SignSequence:
    _check_strands(N, None)
    return SignSequence(tuple((-1) ** i for i in range(N - 1)))


def omega_min(N: int) -> SignSequence:
    _check_strands(N, None)
    half = N // 2
    return SignSequence(tuple(1 if i <= half else -1 for i in range(1, N)))


def loop_count(omega: SignSequence) -> int:
    """``1 + #{j : omega_j * omega_{j+1} = -1}``."""
    s = omega.signs
    return 1 + sum(1 for a, b in zip(s, s[1:]) if a * b == -1)


def is_constant(omega: SignSequence) -> bool:
    return len(set(omega.signs)) == 1
