"""Symplectic self-dualities on finite abelian p-groups.

A form is stored as a numerator matrix n with pairing
nabla(x)(y) = sum_{i,j} n[i][j] x_i y_j / p^{min(mu_i, mu_j)} mod 1.
Alternation is the exact condition n[i][i] = 0, n[j][i] = -n[i][j]
(mod the positional modulus); nondegeneracy is decided on the socle:
a nontrivial kernel would contain an element of order p, and whether a
socle vector pairs to zero with everything is a linear condition mod p.

Subgroups are kept as canonical lower-triangular lattice bases (between
the full lattice Z^n and p^mu Z^n), so subgroup equality is syntactic.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

from . import smith
from .errors import (DimensionMismatch, InvariantViolation, SympdualError,
                     UnsupportedStructure)
from .groups import (Element, FinAbGroup, HomMatrix, ProductGroup, direct_sum,
                     dual_pairing, element_add, is_automorphism, mod1)


def rank_mod_p(rows: Sequence[Sequence[int]], p: int) -> int:
    """Rank of an integer matrix over the prime field F_p."""
    m = [[x % p for x in row] for row in rows]
    rank = 0
    ncols = len(m[0]) if m else 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        rank += 1
    return rank


@dataclass(frozen=True)
class SymplecticForm:
    group: FinAbGroup
    numerators: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "numerators",
            tuple(tuple(int(v) for v in row) for row in self.numerators))
        g = self.group
        n = self.numerators
        if len(n) != g.rank or any(len(row) != g.rank for row in n):
            raise DimensionMismatch("SymplecticForm: numerator matrix shape mismatch")
        mods = _position_moduli(g)
        for i in range(g.rank):
            if n[i][i] != 0:
                raise InvariantViolation("alternating", f"diagonal entry ({i},{i}) nonzero")
            for j in range(g.rank):
                if not 0 <= n[i][j] < mods[i][j]:
                    raise InvariantViolation(
                        "canonical-range", f"numerator ({i},{j}) out of range")
                if (n[i][j] + n[j][i]) % mods[i][j]:
                    raise InvariantViolation(
                        "alternating", f"entries ({i},{j}) and ({j},{i}) not opposite")
        if _socle_kernel_vector(g, n) is not None:
            raise InvariantViolation(
                "nondegenerate", "a socle element pairs to zero with everything")

    def evaluate(self, x: Element, y: Element) -> Fraction:
        g = self.group
        if len(x) != g.rank or len(y) != g.rank:
            raise DimensionMismatch("evaluate: element dimension mismatch")
        mods = _position_moduli(g)
        total = Fraction(0)
        for i in range(g.rank):
            xi = x[i]
            if not xi:
                continue
            row = self.numerators[i]
            for j in range(g.rank):
                if row[j] and y[j]:
                    total += Fraction(row[j] * xi * y[j], mods[i][j])
        return mod1(total)


def _position_moduli(group: FinAbGroup) -> list[list[int]]:
    m = group.moduli
    return [[min(a, b) for b in m] for a in m]


def _socle_kernel_vector(group: FinAbGroup, numerators) -> Optional[Element]:
    """A nonzero socle element in the radical, or None (the nondegeneracy
    test).  Socle vectors x_i = c_i p^{mu_i - 1} pair to an integer with e_j
    except through the residues n[i][j] mod p at positions with
    mu_i <= mu_j, so the condition is an F_p kernel computation.
    """
    r = group.rank
    if r == 0:
        return None
    p = group.p
    lam = group.profile.lambdas
    rows = [[numerators[i][j] % p if lam[i] <= lam[j] else 0 for i in range(r)]
            for j in range(r)]
    vec = _kernel_vector_mod_p(rows, p)
    if vec is None:
        return None
    return tuple(c * (m // p) for c, m in zip(vec, group.moduli))


def _kernel_vector_mod_p(rows, p) -> Optional[list[int]]:
    m = [[x % p for x in row] for row in rows]
    ncols = len(m[0]) if m else 0
    pivots = []
    rank = 0
    for col in range(ncols):
        piv = next((r for r in range(rank, len(m)) if m[r][col]), None)
        if piv is None:
            continue
        m[rank], m[piv] = m[piv], m[rank]
        inv = pow(m[rank][col], -1, p)
        m[rank] = [(v * inv) % p for v in m[rank]]
        for r in range(len(m)):
            if r != rank and m[r][col]:
                f = m[r][col]
                m[r] = [(a - f * b) % p for a, b in zip(m[r], m[rank])]
        pivots.append(col)
        rank += 1
    free = [c for c in range(ncols) if c not in pivots]
    if not free:
        return None
    f0 = free[0]
    vec = [0] * ncols
    vec[f0] = 1
    for r, col in enumerate(pivots):
        vec[col] = (-m[r][f0]) % p
    return vec


def is_nondegenerate(group: FinAbGroup, numerators) -> bool:
    """Socle test for an alternating numerator matrix without constructing
    a form (used for the commutator-form flag)."""
    return _socle_kernel_vector(group, numerators) is None


@dataclass(frozen=True)
class SymplecticPair:
    group: FinAbGroup
    form: SymplecticForm
    provenance: Optional[dict] = field(default=None, compare=False)

    def __post_init__(self):
        if self.form.group != self.group:
            raise DimensionMismatch("SymplecticPair: form lives on a different group")


def evaluate(form: SymplecticForm, x: Element, y: Element) -> Fraction:
    return form.evaluate(x, y)


@dataclass(frozen=True)
class Subgroup:
    """Subgroup of an ambient group, as the canonical column-lattice basis
    H (lower triangular, unique), with p^mu Z^n <= H Z^n <= Z^n."""

    ambient: FinAbGroup
    basis: tuple[tuple[int, ...], ...]

    @classmethod
    def from_generators(cls, ambient: FinAbGroup,
                        generators: Sequence[Element]) -> "Subgroup":
        cols = [list(ambient.element(g)) for g in generators]
        cols += _modulus_columns(ambient)
        return cls(ambient, smith.hnf_columns(cols, ambient.rank))

    @classmethod
    def zero(cls, ambient: FinAbGroup) -> "Subgroup":
        return cls.from_generators(ambient, [])

    @classmethod
    def full(cls, ambient: FinAbGroup) -> "Subgroup":
        return cls.from_generators(ambient, [ambient.basis_element(i)
                                             for i in range(ambient.rank)])

    @property
    def order(self) -> int:
        covol = 1
        for i in range(self.ambient.rank):
            covol *= self.basis[i][i]
        return self.ambient.order // covol

    @property
    def generators(self) -> tuple[Element, ...]:
        n = self.ambient.rank
        cols = []
        for j in range(n):
            col = self.ambient.element(tuple(self.basis[i][j] for i in range(n)))
            if any(col):
                cols.append(col)
        return tuple(cols)

    def contains(self, x: Element) -> bool:
        return smith.solve_triangular_columns(self.basis, self.ambient.element(x)) is not None

    def coefficients(self, x: Element) -> list[int]:
        c = smith.solve_triangular_columns(self.basis, self.ambient.element(x))
        if c is None:
            raise SympdualError("element is not in the subgroup")
        return c

    def is_subgroup_of(self, other: "Subgroup") -> bool:
        return all(other.contains(g) for g in self.generators)

    def add(self, other: "Subgroup") -> "Subgroup":
        self._same_ambient(other)
        n = self.ambient.rank
        cols = [[self.basis[i][j] for i in range(n)] for j in range(n)]
        cols += [[other.basis[i][j] for i in range(n)] for j in range(n)]
        return Subgroup(self.ambient, smith.hnf_columns(cols, n))

    def intersection(self, other: "Subgroup") -> "Subgroup":
        self._same_ambient(other)
        n = self.ambient.rank
        stacked = [[self.basis[i][j] for j in range(n)]
                   + [-other.basis[i][j] for j in range(n)] for i in range(n)]
        kernel = smith.kernel_lattice(stacked)
        cols = [[sum(self.basis[i][j] * k[j] for j in range(n)) for i in range(n)]
                for k in kernel]
        cols += _modulus_columns(self.ambient)
        return Subgroup(self.ambient, smith.hnf_columns(cols, n))

    def is_isotropic(self, form: SymplecticForm) -> bool:
        gens = self.generators
        return all(form.evaluate(a, b) == 0 for a in gens for b in gens)

    def elements(self):
        """Members in ambient colex order (exhaustive; guarded)."""
        for x in self.ambient.elements():
            if self.contains(x):
                yield x

    def _same_ambient(self, other: "Subgroup"):
        if self.ambient != other.ambient:
            raise DimensionMismatch("subgroups live in different ambient groups")


def _modulus_columns(group: FinAbGroup) -> list[list[int]]:
    n = group.rank
    return [[group.moduli[i] if i == j else 0 for i in range(n)] for j in range(n)]


def _solution_subgroup(ambient: FinAbGroup, rows: Sequence[Sequence[int]],
                       modulus: int) -> Subgroup:
    """Subgroup {x : rows·x ≡ 0 mod modulus} of the ambient group."""
    if not rows:
        return Subgroup.full(ambient)
    n = ambient.rank
    k = len(rows)
    stacked = [list(rows[i]) + [-modulus if i == j else 0 for j in range(k)]
               for i in range(k)]
    kernel = smith.kernel_lattice(stacked)
    cols = [vec[:n] for vec in kernel]
    cols += _modulus_columns(ambient)
    return Subgroup(ambient, smith.hnf_columns(cols, n))


def _pairing_rows(pair: SymplecticPair, elements: Sequence[Element]) -> list[list[int]]:
    """Integer rows w with w·x ≡ 0 mod p^{mu_1} expressing B(a, x) = 0."""
    g = pair.group
    big = g.moduli[0] if g.rank else 1
    mods = _position_moduli(g)
    rows = []
    for a in elements:
        row = []
        for j in range(g.rank):
            acc = 0
            for i in range(g.rank):
                if a[i] and pair.form.numerators[i][j]:
                    acc += pair.form.numerators[i][j] * a[i] * (big // mods[i][j])
            row.append(acc % big)
        rows.append(row)
    return rows


def orthogonal_complement(pair: SymplecticPair, sub: Subgroup) -> Subgroup:
    """All x with nabla(a)(x) = 0 for every a in the subgroup; contains the
    subgroup itself exactly when the subgroup is isotropic."""
    if sub.ambient != pair.group:
        raise DimensionMismatch("orthogonal_complement: ambient mismatch")
    gens = sub.generators
    if not gens:
        return Subgroup.full(pair.group)
    big = pair.group.moduli[0]
    return _solution_subgroup(pair.group, _pairing_rows(pair, gens), big)


def grow_maximal_isotropic(pair: SymplecticPair, seed: Subgroup) -> Subgroup:
    """Grow an isotropic subgroup to a maximal one by repeatedly adjoining
    the enumeration-least element of its perp-preimage outside it."""
    if not seed.is_isotropic(pair.form):
        raise InvariantViolation("isotropic", "seed subgroup is not isotropic")
    current = seed
    while True:
        comp = orthogonal_complement(pair, current)
        if comp == current:
            return current
        adjoin = None
        for x in pair.group.elements():
            if comp.contains(x) and not current.contains(x):
                adjoin = x
                break
        if adjoin is None:
            raise SympdualError("grow_maximal_isotropic: internal enumeration failure")
        current = current.add(Subgroup.from_generators(pair.group, [adjoin]))


class SubquotientPresentation:
    """Invariant-factor presentation of top/bottom for subgroups
    bottom <= top of an ambient group (bottom defaults to the trivial
    subgroup, giving a presentation of top itself).

    Exposes a standalone group, ambient representatives of its basis, and
    the reduction map ambient-element -> standalone coordinates.
    """

    def __init__(self, top: Subgroup, bottom: Optional[Subgroup] = None):
        ambient = top.ambient
        if bottom is None:
            bottom = Subgroup.zero(ambient)
        if bottom.ambient != ambient:
            raise DimensionMismatch("presentation: ambient mismatch")
        n = ambient.rank
        self.ambient = ambient
        self.top = top
        self.bottom = bottom
        relation_cols = []
        for j in range(n):
            col = [bottom.basis[i][j] for i in range(n)]
            sol = smith.solve_triangular_columns(top.basis, col)
            if sol is None:
                raise InvariantViolation("nested-subgroups",
                                         "bottom subgroup is not inside top")
            relation_cols.append(sol)
        relation = [[relation_cols[j][i] for j in range(n)] for i in range(n)]
        dec = smith.smith(relation)
        diag = dec.diagonal
        p = ambient.p
        kept = []
        for t in range(n - 1, -1, -1):
            d = diag[t]
            if d == 1:
                continue
            e = 0
            while d % p == 0:
                d //= p
                e += 1
            if d != 1:
                raise SympdualError("presentation: invariant factor is not a p-power")
            kept.append((t, e))
        self.group = FinAbGroup.from_exponents(p, [e for _, e in kept])
        self._kept = kept
        self._umat = dec.U
        uinv = smith.invert_unimodular(list(map(list, dec.U)))
        reps = []
        for t, _ in kept:
            coeff = [uinv[i][t] for i in range(n)]
            reps.append(self._from_coefficients(coeff))
        self.basis_reps: tuple[Element, ...] = tuple(reps)

    def _from_coefficients(self, coeff: Sequence[int]) -> Element:
        n = self.ambient.rank
        vec = [sum(self.top.basis[i][j] * coeff[j] for j in range(n)) for i in range(n)]
        return self.ambient.element(vec)

    def reduce(self, x: Element) -> Element:
        coeff = smith.solve_triangular_columns(self.top.basis, self.ambient.element(x))
        if coeff is None:
            raise SympdualError("reduce: element is not in the presented subgroup")
        w = smith.matvec(self._umat, coeff)
        return self.group.element([w[t] for t, _ in self._kept])

    def lift(self, coords: Element) -> Element:
        """An ambient representative of the standalone element."""
        acc = self.ambient.zero()
        for c, rep in zip(coords, self.basis_reps):
            acc = element_add(self.ambient, acc,
                              tuple((c * r) % m for r, m in zip(rep, self.ambient.moduli)))
        return acc

    def embedding_hom(self) -> HomMatrix:
        return HomMatrix.from_columns(self.group, self.ambient, self.basis_reps)


def _induced_form(pair: SymplecticPair, pres: SubquotientPresentation) -> SymplecticForm:
    g = pres.group
    mods = _position_moduli(g)
    nums = []
    for a in range(g.rank):
        row = []
        for b in range(g.rank):
            val = pair.form.evaluate(pres.basis_reps[a], pres.basis_reps[b])
            scaled = val * mods[a][b]
            if scaled.denominator != 1:
                raise InvariantViolation(
                    "descent", "form does not descend to the presentation")
            row.append(int(scaled) % mods[a][b])
        nums.append(tuple(row))
    return SymplecticForm(g, tuple(nums))


def restrict_pair(pair: SymplecticPair, sub: Subgroup) -> tuple[SymplecticPair, SubquotientPresentation]:
    """The pair on a subgroup on which the form stays nondegenerate."""
    pres = SubquotientPresentation(sub)
    return SymplecticPair(pres.group, _induced_form(pair, pres)), pres


def subquotient(pair: SymplecticPair, sub: Subgroup) -> SymplecticPair:
    """The descended pair on perp-preimage(sub)/sub for an isotropic sub."""
    if not sub.is_isotropic(pair.form):
        raise InvariantViolation("isotropic", "subquotient needs an isotropic subgroup")
    comp = orthogonal_complement(pair, sub)
    if not sub.is_subgroup_of(comp):
        raise SympdualError("subquotient: internal containment failure")
    pres = SubquotientPresentation(comp, sub)
    return SymplecticPair(pres.group, _induced_form(pair, pres))


@dataclass(frozen=True)
class PeelDecomposition:
    """L split as (A x dual-of-A) ⊥ residual, with bookkeeping."""

    hyperbolic: SymplecticPair
    hyperbolic_isotropic: Subgroup
    hyperbolic_complement: Subgroup
    residual: SymplecticPair
    product: ProductGroup
    recombine: HomMatrix


def peel(pair: SymplecticPair, isotropic: Subgroup,
         complement: Subgroup) -> PeelDecomposition:
    """Split off an isotropic direct summand A together with a copy of its
    dual, leaving the orthogonal residual pair.

    Follows the decomposition L = A x perp-preimage(complement-perp) x
    (perp-preimage(A-perp) ∩ complement); the recombination isomorphism is
    verified to transport the orthogonal-sum form exactly.
    """
    group = pair.group
    if isotropic.ambient != group or complement.ambient != group:
        raise DimensionMismatch("peel: ambient mismatch")
    if not isotropic.is_isotropic(pair.form):
        raise InvariantViolation("isotropic", "peel needs an isotropic summand")
    if isotropic.intersection(complement).order != 1 or \
            isotropic.order * complement.order != group.order:
        raise InvariantViolation("direct-summand",
                                 "subgroup and complement do not decompose the group")
    f2 = orthogonal_complement(pair, complement)
    f3 = orthogonal_complement(pair, isotropic).intersection(complement)
    if isotropic.order * f2.order * f3.order != group.order:
        raise SympdualError("peel: three-factor orders do not multiply up")
    for left in (isotropic, f2):
        for a in left.generators:
            for b in f3.generators:
                if pair.form.evaluate(a, b) != 0:
                    raise SympdualError("peel: factors are not orthogonal")
    spanning = isotropic.add(f2)
    hyp_pair, hyp_pres = restrict_pair(pair, spanning)
    hyp_a = Subgroup.from_generators(
        hyp_pair.group, [hyp_pres.reduce(g) for g in isotropic.generators])
    hyp_c = Subgroup.from_generators(
        hyp_pair.group, [hyp_pres.reduce(g) for g in f2.generators])
    res_pair, res_pres = restrict_pair(pair, f3)
    product = direct_sum(hyp_pair.group, res_pair.group)
    cols = []
    for pos in range(product.group.rank):
        if pos in product.left_positions:
            cols.append(hyp_pres.basis_reps[product.left_positions.index(pos)])
        else:
            cols.append(res_pres.basis_reps[product.right_positions.index(pos)])
    recombine = HomMatrix.from_columns(product.group, group, cols)
    if is_automorphism(recombine) is None:
        raise SympdualError("peel: recombination map is not invertible")
    _check_orthogonal_sum(pair, product, hyp_pair, res_pair, recombine)
    return PeelDecomposition(hyp_pair, hyp_a, hyp_c, res_pair, product, recombine)


def _check_orthogonal_sum(pair, product, left_pair, right_pair, recombine):
    lmods = _position_moduli(left_pair.group)
    rmods = _position_moduli(right_pair.group)
    for u in range(product.group.rank):
        for v in range(product.group.rank):
            got = pair.form.evaluate(recombine.column(u), recombine.column(v))
            lu = product.left_positions.index(u) if u in product.left_positions else None
            lv = product.left_positions.index(v) if v in product.left_positions else None
            if lu is not None and lv is not None:
                want = Fraction(left_pair.form.numerators[lu][lv], lmods[lu][lv])
            elif lu is None and lv is None:
                ru = product.right_positions.index(u)
                rv = product.right_positions.index(v)
                want = Fraction(right_pair.form.numerators[ru][rv], rmods[ru][rv])
            else:
                want = Fraction(0)
            if got != mod1(want):
                raise SympdualError("peel: orthogonal-sum transport failed")


def split_skew_hom(nabla22: HomMatrix, mode: str) -> HomMatrix:
    """Write a skew self-pairing as phi - adjoint(phi).

    Odd mode halves the matrix (phi = nabla22 / 2, using the inverse of 2
    at each modulus); exponent-two mode keeps the strictly lower triangle
    in the coordinate order and zeroes the rest.
    """
    if nabla22.source != nabla22.target:
        raise DimensionMismatch("split_skew_hom: needs a square hom")
    g = nabla22.source
    neg = HomMatrix.make(g, g, [[-v for v in row] for row in nabla22.entries])
    if nabla22.adjoint() != neg:
        raise InvariantViolation("skew", "input is not skew under the adjoint")
    if any(nabla22.entries[i][i] for i in range(g.rank)):
        raise InvariantViolation("zero-diagonal", "diagonal entries must vanish")
    if mode == "odd-order":
        if g.p == 2:
            raise UnsupportedStructure("2 is not invertible in odd-order mode")
        ent = []
        for i in range(g.rank):
            inv2 = pow(2, -1, g.moduli[i])
            ent.append([(inv2 * v) % g.moduli[i] for v in nabla22.entries[i]])
        phi = HomMatrix.make(g, g, ent)
        if phi.add(phi) != nabla22:
            raise SympdualError("split_skew_hom: halving failed")
    elif mode == "exponent-two":
        if g.p != 2 or any(m != 2 for m in g.moduli):
            raise UnsupportedStructure("exponent-two mode needs an exponent-2 group")
        ent = [[nabla22.entries[i][j] if i > j else 0 for j in range(g.rank)]
               for i in range(g.rank)]
        phi = HomMatrix.make(g, g, ent)
    else:
        raise SympdualError(f"split_skew_hom: unknown mode {mode!r}")
    if phi.sub(phi.adjoint()) != nabla22:
        raise SympdualError("split_skew_hom: phi - adjoint(phi) mismatch")
    return phi


def _splitting_mode(group: FinAbGroup) -> str:
    if group.p != 2:
        return "odd-order"
    if all(m == 2 for m in group.moduli):
        return "exponent-two"
    raise UnsupportedStructure(
        "mixed 2-power orders are not supported by the constructive path")


def isotropic_complement(pair: SymplecticPair, max_isotropic: Subgroup,
                         complement: Subgroup) -> Subgroup:
    """Replace a complement of a maximal isotropic subgroup by an isotropic
    one, by shearing it back into the isotropic part."""
    group = pair.group
    mode = _splitting_mode(group)
    if orthogonal_complement(pair, max_isotropic) != max_isotropic:
        raise InvariantViolation("maximal-isotropic",
                                 "first subgroup is not maximal isotropic")
    if max_isotropic.intersection(complement).order != 1 or \
            max_isotropic.order * complement.order != group.order:
        raise InvariantViolation("direct-summand", "not a complement")
    pres2 = SubquotientPresentation(complement)
    w = pres2.group
    wmods = w.moduli
    ent = []
    for i in range(w.rank):
        row = []
        for j in range(w.rank):
            val = pair.form.evaluate(pres2.basis_reps[j], pres2.basis_reps[i])
            scaled = val * wmods[i]
            if scaled.denominator != 1:
                raise SympdualError("isotropic_complement: pairing not integral")
            row.append(int(scaled) % wmods[i])
        ent.append(row)
    nabla22 = HomMatrix.make(w, w, ent)
    phi = split_skew_hom(nabla22, mode)
    pres1 = SubquotientPresentation(max_isotropic)
    sheared = _shear_complement(pair, pres1, pres2, phi)
    new_sub = Subgroup.from_generators(group, sheared)
    if not new_sub.is_isotropic(pair.form):
        raise SympdualError("isotropic_complement: sheared complement not isotropic")
    if max_isotropic.intersection(new_sub).order != 1 or \
            max_isotropic.order * new_sub.order != group.order or \
            max_isotropic.add(new_sub) != Subgroup.full(group):
        raise SympdualError("isotropic_complement: sheared complement not complementary")
    return new_sub


def _shear_complement(pair, pres1, pres2, phi) -> list[Element]:
    """New generators w_j + x_j with x_j in the isotropic part solving
    B(w_r, x_j) = phi[r][j] / p^{nu_r} for all r."""
    group = pair.group
    big = group.moduli[0]
    w, v = pres2.group, pres1.group
    coeff = []
    for r in range(w.rank):
        row = []
        for k in range(v.rank):
            val = pair.form.evaluate(pres2.basis_reps[r], pres1.basis_reps[k])
            row.append(int(val * big) % big)
        coeff.append(row)
    rhs = [[phi.entries[r][j] * (big // w.moduli[r]) for j in range(w.rank)]
           for r in range(w.rank)]
    sols = smith.solve_congruence_many(coeff, rhs, [big] * w.rank)
    out = []
    for j in range(w.rank):
        t = sols[j]
        if t is None:
            raise SympdualError("isotropic_complement: shear system unsolvable")
        x = pres1.lift(v.element(t))
        out.append(element_add(group, pres2.basis_reps[j], x))
    return out


def standard_form_on(product: ProductGroup) -> SymplecticForm:
    """The pairing ((x, chi), (y, lam)) -> chi(y) - lam(x) on A x A-dual."""
    if product.left.profile != product.right.profile:
        raise DimensionMismatch("standard form needs matching factor profiles")
    n = product.group.rank
    nums = [[0] * n for _ in range(n)]
    for i, lam in enumerate(product.left.profile.lambdas):
        m = product.left.p ** lam
        xpos = product.left_positions[i]
        cpos = product.right_positions[i]
        nums[cpos][xpos] = 1
        nums[xpos][cpos] = m - 1
    return SymplecticForm(product.group, tuple(tuple(r) for r in nums))


def standard_pair(a: FinAbGroup, b: Optional[Subgroup] = None
                  ) -> tuple[SymplecticPair, Subgroup]:
    """The standard pair on A x A-dual with the maximal isotropic subgroup
    B x B-perp (B defaults to all of A)."""
    product = direct_sum(a, a)
    pair = SymplecticPair(product.group, standard_form_on(product),
                          provenance={"construction": "standard-pair"})
    if b is None:
        b = Subgroup.full(a)
    if b.ambient != a:
        raise DimensionMismatch("standard_pair: B is not a subgroup of A")
    big = a.moduli[0] if a.rank else 1
    rows = []
    for gen in b.generators:
        rows.append([gen[j] * (big // a.moduli[j]) % big for j in range(a.rank)])
    bperp = _solution_subgroup(a, rows, big) if rows else Subgroup.full(a)
    gens = [product.embed_left(g) for g in b.generators]
    gens += [product.embed_right(c) for c in bperp.generators]
    m0 = Subgroup.from_generators(product.group, gens)
    if orthogonal_complement(pair, m0) != m0:
        raise SympdualError("standard_pair: B x B-perp failed maximality check")
    return pair, m0


@dataclass(frozen=True)
class Standardization:
    """Certificate that a pair is isomorphic to a standard one: `iso` maps
    base x base-dual onto the group, and `evaluations` tabulates the exact
    transport check on every generator pair."""

    base: FinAbGroup
    product: ProductGroup
    iso: HomMatrix
    evaluations: tuple[tuple[int, int, Fraction], ...]


def standardize_pair(pair: SymplecticPair) -> Standardization:
    """Constructively exhibit a pair as standard.

    Peels a maximal-order cyclic summand together with a dual copy,
    polarizes the peeled hyperbolic block, recurses on the residual, and
    reassembles; every step and the final transport identity are verified
    exactly.
    """
    group = pair.group
    if group.p == 2 and any(m != 2 for m in group.moduli):
        raise UnsupportedStructure(
            "mixed 2-power orders are outside the constructive standardizer")
    base, product, iso = _standardize_rec(pair)
    form0 = standard_form_on(product)
    mods = _position_moduli(product.group)
    table = []
    for u in range(product.group.rank):
        for v in range(product.group.rank):
            got = pair.form.evaluate(iso.column(u), iso.column(v))
            want = mod1(Fraction(form0.numerators[u][v], mods[u][v]))
            if got != want:
                raise SympdualError("standardize_pair: transport certificate failed")
            table.append((u, v, got))
    if pair.group.rank and is_automorphism(iso) is None:
        raise SympdualError("standardize_pair: assembled map is not invertible")
    return Standardization(base, product, iso, tuple(table))


def _standardize_rec(pair: SymplecticPair):
    group = pair.group
    if group.rank == 0:
        base = FinAbGroup.from_exponents(group.p, [])
        product = direct_sum(base, base)
        iso = HomMatrix.from_columns(product.group, group, [])
        return base, product, iso
    if group.rank == 1:
        raise InvariantViolation("nondegenerate",
                                 "rank-1 groups carry no symplectic self-duality")
    cyc = Subgroup.from_generators(group, [group.basis_element(0)])
    comp = Subgroup.from_generators(
        group, [group.basis_element(i) for i in range(1, group.rank)])
    dec = peel(pair, cyc, comp)
    a1, prod1, iso1 = _polarize(dec.hyperbolic, dec.hyperbolic_isotropic,
                                dec.hyperbolic_complement)
    a2, prod2, iso2 = _standardize_rec(dec.residual)
    emb_hyp = HomMatrix.from_columns(
        dec.hyperbolic.group, group,
        [dec.recombine.column(dec.product.left_positions[k])
         for k in range(dec.hyperbolic.group.rank)])
    emb_res = HomMatrix.from_columns(
        dec.residual.group, group,
        [dec.recombine.column(dec.product.right_positions[k])
         for k in range(dec.residual.group.rank)])
    merged = direct_sum(a1, a2)
    base = merged.group
    product = direct_sum(base, base)
    cols = []
    for pos in range(product.group.rank):
        if pos in product.left_positions:
            side_positions, inner = product.left_positions, "point"
        else:
            side_positions, inner = product.right_positions, "char"
        m = side_positions.index(pos)
        if m in merged.left_positions:
            local = merged.left_positions.index(m)
            src_pos = prod1.left_positions[local] if inner == "point" \
                else prod1.right_positions[local]
            cols.append(emb_hyp.apply(iso1.column(src_pos)))
        else:
            local = merged.right_positions.index(m)
            src_pos = prod2.left_positions[local] if inner == "point" \
                else prod2.right_positions[local]
            cols.append(emb_res.apply(iso2.column(src_pos)))
    iso = HomMatrix.from_columns(product.group, group, cols)
    return base, product, iso


def _polarize(pair: SymplecticPair, max_isotropic: Subgroup, complement: Subgroup):
    """Standardize a pair in which `max_isotropic` has a complement: shear
    the complement isotropic, then send (x, chi) to (x, y_chi) where y_chi
    is the unique element of the sheared complement pairing as chi does."""
    sheared = isotropic_complement(pair, max_isotropic, complement)
    pres_a = SubquotientPresentation(max_isotropic)
    pres_w = SubquotientPresentation(sheared)
    a = pres_a.group
    if pres_w.group.profile != a.profile:
        raise SympdualError("polarize: complement profile mismatch")
    group = pair.group
    big = group.moduli[0]
    coeff = []
    for i in range(a.rank):
        row = []
        for k in range(a.rank):
            val = pair.form.evaluate(pres_w.basis_reps[k], pres_a.basis_reps[i])
            row.append(int(val * big) % big)
        coeff.append(row)
    rhs = [[(big // a.moduli[i]) if i == j else 0 for j in range(a.rank)]
           for i in range(a.rank)]
    sols = smith.solve_congruence_many(coeff, rhs, [big] * a.rank)
    product = direct_sum(a, a)
    cols: list[Element] = [group.zero()] * product.group.rank
    for i in range(a.rank):
        cols[product.left_positions[i]] = pres_a.basis_reps[i]
    for j in range(a.rank):
        t = sols[j]
        if t is None:
            raise SympdualError("polarize: dual generator has no preimage")
        acc = group.zero()
        for k, tk in enumerate(t):
            acc = element_add(group, acc,
                              tuple((tk * r) % m for r, m in
                                    zip(pres_w.basis_reps[k], group.moduli)))
        cols[product.right_positions[j]] = acc
    iso = HomMatrix.from_columns(product.group, group, cols)
    return a, product, iso
