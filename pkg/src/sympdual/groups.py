"""Finite abelian p-groups: elements, homomorphisms, duals, automorphisms.

A group is a direct sum of cyclic p-power factors with non-increasing
exponents; elements are coordinate tuples reduced into canonical range.
Characters are identified with elements through the pairing
chi_a(x) = sum_i a_i x_i / p^{mu_i} (an exact rational mod 1), which makes
every group canonically self-dual and lets homomorphisms into the dual be
stored as plain integer matrices.
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from fractions import Fraction
from math import gcd
from typing import Iterator, Optional, Sequence

from . import smith
from .errors import (DimensionMismatch, EnumerationGuard, InvariantViolation,
                     SympdualError)
from .prng import SplitMix64

Element = tuple[int, ...]

DEFAULT_ORDER_GUARD = 3 ** 10

# Witnesses making Miller-Rabin deterministic below 3.3 * 10^24.
_MR_WITNESSES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_BOUND = 3_317_044_064_679_887_385_961_981


def order_guard() -> int:
    """Cap on exhaustive element enumerations (env MAX_ORDER_GUARD)."""
    raw = os.environ.get("MAX_ORDER_GUARD")
    return int(raw) if raw else DEFAULT_ORDER_GUARD


def is_prime(n: int) -> bool:
    """Deterministic Miller-Rabin (valid for n below ~3.3e24)."""
    if n < 2:
        return False
    for small in (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37):
        if n % small == 0:
            return n == small
    if n >= _MR_BOUND:
        raise SympdualError("is_prime: deterministic witness set only covers n < 3.3e24")
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    for a in _MR_WITNESSES:
        x = pow(a, d, n)
        if x in (1, n - 1):
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def mod1(x: Fraction) -> Fraction:
    """Reduce an exact rational into [0, 1)."""
    return x - (x.numerator // x.denominator)


@dataclass(frozen=True)
class ExponentProfile:
    """A prime p with a non-increasing tuple of positive exponents."""

    p: int
    lambdas: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "lambdas", tuple(int(x) for x in self.lambdas))
        if not is_prime(self.p):
            raise InvariantViolation("prime", f"p = {self.p} is not prime")
        lam = self.lambdas
        if any(x < 1 for x in lam):
            raise InvariantViolation("positive-exponents", f"lambda = {lam}")
        if any(lam[i] < lam[i + 1] for i in range(len(lam) - 1)):
            raise InvariantViolation("non-increasing", f"lambda = {lam}")
        object.__setattr__(self, "_moduli", tuple(self.p ** x for x in lam))

    @property
    def rank(self) -> int:
        return len(self.lambdas)

    @property
    def moduli(self) -> tuple[int, ...]:
        return self._moduli  # type: ignore[attr-defined]

    @property
    def order(self) -> int:
        return self.p ** sum(self.lambdas)

    def restricted(self, indices: Sequence[int]) -> "ExponentProfile":
        """Profile on a subset of coordinates (ascending index order keeps
        the exponents non-increasing)."""
        idx = sorted(indices)
        return ExponentProfile(self.p, tuple(self.lambdas[i] for i in idx))


@dataclass(frozen=True)
class FinAbGroup:
    """The group ⊕_i Z/p^{mu_i} for a profile with exponents mu."""

    profile: ExponentProfile

    @classmethod
    def from_exponents(cls, p: int, mus: Sequence[int]) -> "FinAbGroup":
        return cls(ExponentProfile(p, tuple(mus)))

    @property
    def p(self) -> int:
        return self.profile.p

    @property
    def rank(self) -> int:
        return self.profile.rank

    @property
    def moduli(self) -> tuple[int, ...]:
        return self.profile.moduli

    @property
    def order(self) -> int:
        return self.profile.order

    def element(self, coords: Sequence[int]) -> Element:
        if len(coords) != self.rank:
            raise DimensionMismatch(
                f"element has {len(coords)} coordinates, group rank is {self.rank}")
        return tuple(int(c) % m for c, m in zip(coords, self.moduli))

    def zero(self) -> Element:
        return (0,) * self.rank

    def basis_element(self, i: int) -> Element:
        return tuple(1 if j == i else 0 for j in range(self.rank))

    def element_order(self, x: Element) -> int:
        n = 1
        for c, m in zip(x, self.moduli):
            n = max(n, m // gcd(c, m))
        return n

    def element_at(self, n: int) -> Element:
        """The n-th element in enumeration order (first coordinate fastest)."""
        coords = []
        for m in self.moduli:
            coords.append(n % m)
            n //= m
        return tuple(coords)

    def index_of(self, x: Element) -> int:
        n = 0
        scale = 1
        for c, m in zip(x, self.moduli):
            n += c * scale
            scale *= m
        return n

    def elements(self) -> Iterator[Element]:
        """All elements, first coordinate varying fastest (colex order)."""
        guard = order_guard()
        if self.order > guard:
            raise EnumerationGuard(
                f"group order {self.order} exceeds MAX_ORDER_GUARD={guard}")
        coords = [0] * self.rank
        while True:
            yield tuple(coords)
            i = 0
            while i < self.rank:
                coords[i] += 1
                if coords[i] < self.moduli[i]:
                    break
                coords[i] = 0
                i += 1
            else:
                return


def element_add(group: FinAbGroup, x: Element, y: Element) -> Element:
    if len(x) != group.rank or len(y) != group.rank:
        raise DimensionMismatch("element_add: coordinate count mismatch")
    return tuple((a + b) % m for a, b, m in zip(x, y, group.moduli))


def element_neg(group: FinAbGroup, x: Element) -> Element:
    return tuple((-a) % m for a, m in zip(x, group.moduli))


def element_scale(group: FinAbGroup, k: int, x: Element) -> Element:
    return tuple((k * a) % m for a, m in zip(x, group.moduli))


def dual_pairing(group: FinAbGroup, chi: Element, x: Element) -> Fraction:
    """chi paired with x: sum_i chi_i x_i / p^{mu_i}, reduced into [0, 1)."""
    if len(chi) != group.rank or len(x) != group.rank:
        raise DimensionMismatch("dual_pairing: coordinate count mismatch")
    total = Fraction(0)
    for a, b, m in zip(chi, x, group.moduli):
        total += Fraction(a * b, m)
    return mod1(total)


@dataclass(frozen=True)
class HomMatrix:
    """Homomorphism source -> target as the matrix of multipliers s[i][j]
    of the coordinate maps Z/p^{mu_j(src)} -> Z/p^{mu_i(tgt)}.

    Well-definedness requires p^{max(0, mu_i(tgt) - mu_j(src))} | s[i][j];
    entries are kept in canonical range [0, p^{mu_i(tgt)}).
    """

    source: FinAbGroup
    target: FinAbGroup
    entries: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "entries", tuple(tuple(int(v) for v in row) for row in self.entries))
        if self.source.p != self.target.p:
            raise InvariantViolation("same-prime", "source and target primes differ")
        tm, sm = self.target.moduli, self.source.moduli
        if len(self.entries) != self.target.rank or any(
                len(row) != self.source.rank for row in self.entries):
            raise DimensionMismatch("HomMatrix: entry matrix shape mismatch")
        p = self.source.p
        tl, sl = self.target.profile.lambdas, self.source.profile.lambdas
        for i, row in enumerate(self.entries):
            for j, v in enumerate(row):
                if not 0 <= v < tm[i]:
                    raise InvariantViolation(
                        "canonical-range",
                        f"entry ({i},{j}) = {v} not in [0, {tm[i]})")
                need = tl[i] - sl[j]
                if need > 0 and v % p ** need:
                    raise InvariantViolation(
                        "homomorphism-well-definedness",
                        f"entry ({i},{j}) = {v} not divisible by {p}^{need}")

    @classmethod
    def make(cls, source: FinAbGroup, target: FinAbGroup,
             entries: Sequence[Sequence[int]]) -> "HomMatrix":
        """Build with entries reduced into canonical range first."""
        tm = target.moduli
        rows = tuple(tuple(int(v) % tm[i] for v in row)
                     for i, row in enumerate(entries))
        return cls(source, target, rows)

    @classmethod
    def identity(cls, group: FinAbGroup) -> "HomMatrix":
        n = group.rank
        return cls(group, group,
                   tuple(tuple(1 if i == j else 0 for j in range(n)) for i in range(n)))

    @classmethod
    def from_columns(cls, source: FinAbGroup, target: FinAbGroup,
                     columns: Sequence[Element]) -> "HomMatrix":
        """Hom sending the j-th source generator to columns[j]."""
        if len(columns) != source.rank:
            raise DimensionMismatch("from_columns: need one column per generator")
        entries = tuple(tuple(columns[j][i] for j in range(source.rank))
                        for i in range(target.rank))
        return cls.make(source, target, entries)

    def column(self, j: int) -> Element:
        return tuple(row[j] for row in self.entries)

    def apply(self, x: Element) -> Element:
        if len(x) != self.source.rank:
            raise DimensionMismatch("apply: element not in the source group")
        tm = self.target.moduli
        return tuple(sum(row[j] * x[j] for j in range(self.source.rank)) % tm[i]
                     for i, row in enumerate(self.entries))

    def compose(self, inner: "HomMatrix") -> "HomMatrix":
        """self ∘ inner."""
        if inner.target != self.source:
            raise DimensionMismatch("compose: inner target differs from outer source")
        prod = smith.matmul(self.entries, inner.entries)
        return HomMatrix.make(inner.source, self.target, prod)

    def adjoint(self) -> "HomMatrix":
        """Pontryagin adjoint under the canonical self-dual identifications:
        dual_pairing(target, chi, h(x)) == dual_pairing(source, ĥ(chi), x)."""
        p = self.source.p
        sl, tl = self.source.profile.lambdas, self.target.profile.lambdas
        ent = []
        for j in range(self.source.rank):
            row = []
            for i in range(self.target.rank):
                shift = sl[j] - tl[i]
                v = self.entries[i][j]
                if shift >= 0:
                    row.append(v * p ** shift)
                else:
                    row.append(v // p ** (-shift))
            ent.append(row)
        return HomMatrix.make(self.target, self.source, ent)

    def add(self, other: "HomMatrix") -> "HomMatrix":
        _same_homspace(self, other)
        return HomMatrix.make(self.source, self.target, [
            [a + b for a, b in zip(ra, rb)]
            for ra, rb in zip(self.entries, other.entries)])

    def sub(self, other: "HomMatrix") -> "HomMatrix":
        _same_homspace(self, other)
        return HomMatrix.make(self.source, self.target, [
            [a - b for a, b in zip(ra, rb)]
            for ra, rb in zip(self.entries, other.entries)])


def _same_homspace(a: HomMatrix, b: HomMatrix):
    if a.source != b.source or a.target != b.target:
        raise DimensionMismatch("hom arithmetic needs matching source and target")


def apply_hom(h: HomMatrix, x: Element) -> Element:
    return h.apply(x)


def adjoint_hom(h: HomMatrix) -> HomMatrix:
    return h.adjoint()


def is_automorphism(h: HomMatrix) -> Optional[HomMatrix]:
    """Return the two-sided inverse of h when it is an automorphism, else None.

    The candidate inverse is found by solving h∘g = id column by column as a
    congruence system, then checked on both sides; no determinant criterion
    is involved.
    """
    if h.source != h.target:
        raise DimensionMismatch("is_automorphism: source and target differ")
    g = h.source
    n = g.rank
    rhs = [[1 if i == j else 0 for j in range(n)] for i in range(n)]
    sols = smith.solve_congruence_many(h.entries, rhs, g.moduli)
    cols = []
    for s in sols:
        if s is None:
            return None
        cols.append(g.element(s))
    try:
        inv = HomMatrix.from_columns(g, g, cols)
    except InvariantViolation:
        return None
    ident = HomMatrix.identity(g)
    if h.compose(inv) != ident or inv.compose(h) != ident:
        return None
    return inv


@dataclass(frozen=True)
class ProductGroup:
    """Direct sum of two groups with its coordinates merged into a single
    non-increasing profile; records where each factor's coordinates land."""

    group: FinAbGroup
    left: FinAbGroup
    right: FinAbGroup
    left_positions: tuple[int, ...]
    right_positions: tuple[int, ...]

    def embed_left(self, x: Element) -> Element:
        out = [0] * self.group.rank
        for i, pos in enumerate(self.left_positions):
            out[pos] = x[i]
        return tuple(out)

    def embed_right(self, x: Element) -> Element:
        out = [0] * self.group.rank
        for i, pos in enumerate(self.right_positions):
            out[pos] = x[i]
        return tuple(out)

    def project_left(self, x: Element) -> Element:
        return tuple(x[pos] for pos in self.left_positions)

    def project_right(self, x: Element) -> Element:
        return tuple(x[pos] for pos in self.right_positions)


def direct_sum(left: FinAbGroup, right: FinAbGroup) -> ProductGroup:
    if left.p != right.p:
        raise InvariantViolation("same-prime", "direct_sum of different primes")
    tagged = [(lam, 0, i) for i, lam in enumerate(left.profile.lambdas)]
    tagged += [(lam, 1, i) for i, lam in enumerate(right.profile.lambdas)]
    tagged.sort(key=lambda t: (-t[0], t[1], t[2]))
    lpos = [0] * left.rank
    rpos = [0] * right.rank
    for pos, (_, side, i) in enumerate(tagged):
        if side == 0:
            lpos[i] = pos
        else:
            rpos[i] = pos
    merged = FinAbGroup.from_exponents(left.p, [t[0] for t in tagged])
    return ProductGroup(merged, left, right, tuple(lpos), tuple(rpos))


@dataclass(frozen=True)
class AutomorphismStep:
    """One generator of the automorphism group used by seeded walks:

    - kind "beta": scale row/column i by a unit a;
    - kind "pi": swap coordinates i and j (requires equal exponents);
    - kind "theta": shear adding a times coordinate j to coordinate i,
      admissible when p^{max(0, lambda_i - lambda_j)} divides a.
    """

    kind: str
    i: int
    j: int
    a: int

    def hom(self, group: FinAbGroup) -> HomMatrix:
        n = group.rank
        ent = [[1 if r == c else 0 for c in range(n)] for r in range(n)]
        if self.kind == "beta":
            ent[self.i][self.i] = self.a
        elif self.kind == "pi":
            ent[self.i][self.i] = ent[self.j][self.j] = 0
            ent[self.i][self.j] = ent[self.j][self.i] = 1
        elif self.kind == "theta":
            ent[self.i][self.j] = self.a
        else:
            raise SympdualError(f"unknown step kind {self.kind!r}")
        return HomMatrix.make(group, group, ent)

    def to_json(self) -> dict:
        d = {"kind": self.kind, "i": self.i, "j": self.j}
        if self.kind != "pi":
            d["a"] = self.a
        return d


def sample_automorphism_step(profile: ExponentProfile, rng: SplitMix64) -> AutomorphismStep:
    """Draw one admissible generator, uniformly over kind then parameters."""
    lam = profile.lambdas
    p = profile.p
    n = len(lam)
    swap_pairs = [(i, j) for i in range(n) for j in range(i + 1, n)
                  if lam[i] == lam[j]]
    while True:
        kind = rng.below(3)
        if kind == 0:
            i = rng.below(n)
            a = rng.unit_below(p ** lam[i], p)
            return AutomorphismStep("beta", i, i, a)
        if kind == 1:
            if not swap_pairs:
                continue
            i, j = swap_pairs[rng.below(len(swap_pairs))]
            return AutomorphismStep("pi", i, j, 0)
        if n < 2:
            continue
        i = rng.below(n)
        j = rng.below(n - 1)
        if j >= i:
            j += 1
        shift = max(0, lam[i] - lam[j])
        a = p ** shift * rng.below(p ** (lam[i] - shift))
        return AutomorphismStep("theta", i, j, a)


def random_automorphism(profile: ExponentProfile, seed: int, steps: int) -> HomMatrix:
    """Compose `steps` seeded generator operations; steps = 0 gives the
    identity. Deterministic for a fixed seed (splitmix64 stream)."""
    if steps < 0:
        raise SympdualError("random_automorphism: steps must be >= 0")
    group = FinAbGroup(profile)
    rng = SplitMix64(seed)
    sigma = HomMatrix.identity(group)
    for _ in range(steps):
        step = sample_automorphism_step(profile, rng)
        sigma = step.hom(group).compose(sigma)
    if is_automorphism(sigma) is None:
        raise SympdualError("random_automorphism: composed map failed inversion check")
    return sigma
