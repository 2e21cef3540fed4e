"""Congruence subgroups: membership, coset tables, cusps, widths, scaling matrices.

Coset representatives are produced by a breadth-first walk over the letters
T, T^-1, S, S^-1 starting at the identity.  The resulting transversal is
prefix-closed (a Schreier transversal), which the multiplier module relies on
to rewrite words and presentations.  Cosets are keyed by exact congruence
invariants, so the table is deterministic and duplicate-free:

  * Gamma0(N): the projective class of the bottom row (c : d) over Z/N,
  * Gamma1(N): the bottom row (c, d) mod N,
  * Gamma(N):  the full matrix mod N.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .modgroup import (
    BoundaryPoint,
    GroupElement,
    IDENTITY,
    INFINITY,
    NEG_IDENTITY,
    S,
    T,
    apply_moebius_boundary,
)

__all__ = [
    "CongruenceSubgroup",
    "CosetTable",
    "CuspData",
    "coset_reps",
    "coset_index_of",
    "cusps",
    "scaling_matrix",
    "cusp_equivalence_witness",
    "index_formula",
]

_LETTERS = {"T": T, "t": T.inv(), "S": S, "s": S.inv()}
_LETTER_ORDER = ("T", "t", "S", "s")
_INVERSE = {"T": "t", "t": "T", "S": "s", "s": "S"}


@dataclass(frozen=True)
class CongruenceSubgroup:
    """One of Gamma0(N), Gamma1(N), Gamma(N), selected by ``kind``."""

    kind: str  # "gamma0" | "gamma1" | "gamma"
    level: int

    def __post_init__(self):
        if self.kind not in ("gamma0", "gamma1", "gamma"):
            raise ValueError(f"unknown subgroup kind {self.kind!r}")
        if self.level < 1:
            raise ValueError("level must be a positive integer")

    def contains(self, g: GroupElement) -> bool:
        n = self.level
        if n == 1:
            return True
        if self.kind == "gamma0":
            return g.c % n == 0
        if self.kind == "gamma1":
            return g.c % n == 0 and g.a % n == 1 and g.d % n == 1
        return (
            g.c % n == 0
            and g.b % n == 0
            and g.a % n == 1
            and g.d % n == 1
        )

    def coset_key(self, g: GroupElement):
        """Exact invariant of the right coset (self)*g."""
        n = self.level
        if n == 1:
            return 0
        if self.kind == "gamma0":
            return _p1_reduce(g.c % n, g.d % n, n)
        if self.kind == "gamma1":
            return (g.c % n, g.d % n)
        return (g.a % n, g.b % n, g.c % n, g.d % n)

    @property
    def index(self) -> int:
        return coset_reps(self).index

    def translation_step(self) -> int:
        """Smallest m >= 1 with T^m in the group."""
        return self.level if self.kind == "gamma" else 1

    def __repr__(self) -> str:
        return f"{self.kind}({self.level})"


@lru_cache(maxsize=None)
def _units(n: int) -> tuple[int, ...]:
    return tuple(u for u in range(1, n) if math.gcd(u, n) == 1)


@lru_cache(maxsize=None)
def _p1_reduce_table(n: int):
    table = {}
    for c in range(n):
        for d in range(n):
            if math.gcd(math.gcd(c, d), n) != 1:
                continue
            table[(c, d)] = min(((u * c) % n, (u * d) % n) for u in _units(n))
    return table


def _p1_reduce(c: int, d: int, n: int):
    return _p1_reduce_table(n)[(c, d)]


@dataclass(frozen=True)
class CosetTable:
    """Right-coset data for a congruence subgroup inside the full modular group.

    ``reps[0]`` is the identity, so the first representative lies in the
    subgroup.  ``words`` holds the generator words producing each rep (a
    prefix-closed set), ``trans`` the coset transitions under each letter and
    ``schreier`` the Schreier generator g_j * X * g_{j.X}^{-1} for the
    positive letters X in {S, T}.
    """

    group: CongruenceSubgroup
    reps: tuple[GroupElement, ...]
    words: tuple[tuple[str, ...], ...]
    key_index: dict
    trans: dict
    schreier: dict

    @property
    def index(self) -> int:
        return len(self.reps)

    def coset_of(self, g: GroupElement) -> int:
        return self.key_index[self.group.coset_key(g)]

    def decompose(self, g: GroupElement) -> tuple[int, GroupElement]:
        """Return (j, gamma) with g = gamma * reps[j] and gamma in the subgroup."""
        j = self.coset_of(g)
        witness = g * self.reps[j].inv()
        if not self.group.contains(witness):
            raise RuntimeError("coset table invariant violated")
        return j, witness


@lru_cache(maxsize=None)
def coset_reps(group: CongruenceSubgroup) -> CosetTable:
    """Breadth-first Schreier transversal over the letters T, T^-1, S, S^-1."""
    reps = [IDENTITY]
    words = [()]
    key_index = {group.coset_key(IDENTITY): 0}
    frontier = 0
    while frontier < len(reps):
        g = reps[frontier]
        w = words[frontier]
        for sym in _LETTER_ORDER:
            g2 = g * _LETTERS[sym]
            key = group.coset_key(g2)
            if key not in key_index:
                key_index[key] = len(reps)
                reps.append(g2)
                words.append(w + (sym,))
        frontier += 1

    trans = {}
    for j, g in enumerate(reps):
        for sym in _LETTER_ORDER:
            trans[(j, sym)] = key_index[group.coset_key(g * _LETTERS[sym])]

    schreier = {}
    for j, g in enumerate(reps):
        for sym in ("S", "T"):
            j2 = trans[(j, sym)]
            sg = g * _LETTERS[sym] * reps[j2].inv()
            if not group.contains(sg):
                raise RuntimeError("Schreier generator fell outside the subgroup")
            schreier[(j, sym)] = sg

    return CosetTable(
        group=group,
        reps=tuple(reps),
        words=tuple(words),
        key_index=key_index,
        trans=trans,
        schreier=schreier,
    )


def coset_index_of(table: CosetTable, group: CongruenceSubgroup, g: GroupElement):
    """The unique j with g * reps[j]^-1 in the group, plus that witness."""
    if group != table.group:
        raise ValueError("table was built for a different subgroup")
    return table.decompose(g)


def index_formula(group: CongruenceSubgroup) -> int:
    """Classical index of the subgroup in the full modular group."""
    n = group.level
    if n == 1:
        return 1
    primes = {p for p in range(2, n + 1) if n % p == 0 and _is_prime(p)}
    if group.kind == "gamma0":
        val = Fraction(n)
        for p in primes:
            val *= 1 + Fraction(1, p)
    elif group.kind == "gamma1":
        val = Fraction(n * n)
        for p in primes:
            val *= 1 - Fraction(1, p * p)
    else:
        val = Fraction(n ** 3)
        for p in primes:
            val *= 1 - Fraction(1, p * p)
    assert val.denominator == 1
    return int(val)


def _is_prime(p: int) -> bool:
    if p < 2:
        return False
    for q in range(2, int(p ** 0.5) + 1):
        if p % q == 0:
            return False
    return True


@dataclass(frozen=True)
class CuspData:
    """A cusp class representative with width, scaling matrix and stabilizer.

    The scaling matrix sends oo to the cusp and conjugates the stabilizer
    generator to T^width exactly.
    """

    q: BoundaryPoint
    width: int
    scaling: GroupElement
    stabilizer: GroupElement


def scaling_matrix(q: BoundaryPoint) -> GroupElement:
    """An integer matrix g with g(oo) = q; the identity for oo itself."""
    if q.is_infinity:
        return IDENTITY
    p, den = q.numerator, q.denominator
    # solve p*s - r*den = 1 via the extended Euclidean algorithm
    x, y = _extended_gcd(p, den)
    return GroupElement(p, -y, den, x)


def _extended_gcd(a: int, b: int) -> tuple[int, int]:
    """Return (x, y) with a*x + b*y = gcd(a, b) = 1 for coprime inputs."""
    old_r, r = a, b
    old_x, x = 1, 0
    old_y, y = 0, 1
    while r:
        q = old_r // r
        old_r, r = r, old_r - q * r
        old_x, x = x, old_x - q * x
        old_y, y = y, old_y - q * y
    if old_r == -1:
        old_x, old_y = -old_x, -old_y
        old_r = 1
    if old_r != 1:
        raise ValueError("inputs are not coprime")
    return old_x, old_y


def cusp_equivalence_witness(
    group: CongruenceSubgroup, q1: BoundaryPoint, q2: BoundaryPoint
) -> GroupElement | None:
    """An element of the subgroup mapping q1 to q2, or None.

    Candidates have the shape h2 * (+-T^n) * h1^-1 with h_i scaling matrices;
    membership of such an element depends only on n mod level, so the scan
    over n in [0, level) with both signs is exhaustive.
    """
    h1 = scaling_matrix(q1)
    h2 = scaling_matrix(q2)
    h1_inv = h1.inv()
    for n in range(group.level):
        base = h2 * (T ** n) * h1_inv
        for candidate in (base, NEG_IDENTITY * base):
            if group.contains(candidate):
                return candidate
    return None


def _normalize_cusp(group: CongruenceSubgroup, q: BoundaryPoint) -> BoundaryPoint:
    """Translate by powers of T lying in the group so the value lands in [0, step*den)."""
    if q.is_infinity:
        return q
    step = group.translation_step()
    den = q.denominator
    num = q.numerator % (step * den)
    return BoundaryPoint(Fraction(num, den))


@lru_cache(maxsize=None)
def cusps(group: CongruenceSubgroup) -> tuple[CuspData, ...]:
    """One entry per equivalence class of boundary points, oo first.

    Class representatives are the smallest members seen under the ordering
    (denominator, numerator) after translation into the fundamental strip,
    which makes the output reproducible.
    """
    table = coset_reps(group)
    candidates = {_normalize_cusp(group, apply_moebius_boundary(g, INFINITY)) for g in table.reps}
    ordered = sorted(candidates, key=BoundaryPoint.sort_key)

    class_reps: list[BoundaryPoint] = []
    for q in ordered:
        if not any(cusp_equivalence_witness(group, q, r) is not None for r in class_reps):
            class_reps.append(q)

    out = []
    for q in class_reps:
        g_q = scaling_matrix(q)
        width = None
        for n in range(1, table.index + 1):
            if group.contains(g_q * (T ** n) * g_q.inv()):
                width = n
                break
        if width is None:
            raise RuntimeError(f"no width found for cusp {q}")
        stab = g_q * (T ** width) * g_q.inv()
        out.append(CuspData(q=q, width=width, scaling=g_q, stabilizer=stab))
    return tuple(out)
