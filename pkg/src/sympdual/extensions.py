"""Extensions of a finite abelian p-group dual pair as integer matrices.

An l x l integer matrix alpha, taken modulo p^{min(lambda_i, lambda_j)}
entrywise, classifies the extensions of the discrete dual of
G = ⊕ Z/p^{lambda_i} with kernel G.  The underlying group of the extension
is the cokernel of the 2l x 2l block matrix [[p^lambda, -alpha], [0,
p^lambda]]; duality is transposition; a change of the identifying
isomorphism by sigma acts as alpha -> sigma·alpha·sigma^T.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Iterator, Optional, Sequence

from . import smith
from .errors import (DimensionMismatch, InvariantViolation, SympdualError,
                     UnsupportedStructure)
from .groups import (Element, ExponentProfile, FinAbGroup, HomMatrix,
                     element_scale, is_automorphism, mod1)
from .prng import SplitMix64
from .symplectic import (Subgroup, SymplecticForm, SymplecticPair,
                         orthogonal_complement, rank_mod_p)


def position_moduli(profile: ExponentProfile) -> list[list[int]]:
    """p^{min(lambda_i, lambda_j)} at each matrix position."""
    m = profile.moduli
    return [[min(a, b) for b in m] for a in m]


@dataclass(frozen=True)
class ExtensionMatrix:
    profile: ExponentProfile
    alpha: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        object.__setattr__(
            self, "alpha", tuple(tuple(int(v) for v in row) for row in self.alpha))
        l = self.profile.rank
        if len(self.alpha) != l or any(len(row) != l for row in self.alpha):
            raise DimensionMismatch("ExtensionMatrix: alpha must be l x l")
        mods = position_moduli(self.profile)
        for i in range(l):
            for j in range(l):
                if not 0 <= self.alpha[i][j] < mods[i][j]:
                    raise InvariantViolation(
                        "canonical-range",
                        f"alpha[{i}][{j}] not in [0, p^min(lambda_i, lambda_j))")

    @property
    def rank(self) -> int:
        return self.profile.rank


def canonicalize(alpha: Sequence[Sequence[int]],
                 profile: ExponentProfile) -> ExtensionMatrix:
    """Reduce an integer matrix into canonical range for the profile."""
    l = profile.rank
    if len(alpha) != l or any(len(row) != l for row in alpha):
        raise DimensionMismatch("canonicalize: alpha must be l x l")
    mods = position_moduli(profile)
    return ExtensionMatrix(profile, tuple(
        tuple(int(alpha[i][j]) % mods[i][j] for j in range(l)) for i in range(l)))


def extension_block_matrix(xi: ExtensionMatrix) -> list[list[int]]:
    l = xi.rank
    mods = xi.profile.moduli
    out = [[0] * (2 * l) for _ in range(2 * l)]
    for i in range(l):
        out[i][i] = mods[i]
        out[l + i][l + i] = mods[i]
        for j in range(l):
            out[i][l + j] = -xi.alpha[i][j]
    return out


def extension_group(xi: ExtensionMatrix) -> FinAbGroup:
    """Invariant-factor group of the extension: the quotient of Z^{2l} by
    the column space of [[p^lambda, -alpha], [0, p^lambda]]."""
    factors = smith.cokernel_structure(extension_block_matrix(xi))
    p = xi.profile.p
    exps = []
    for d in factors:
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if d != 1:
            raise SympdualError("extension_group: non-p-power invariant factor")
        exps.append(e)
    exps.sort(reverse=True)
    return FinAbGroup.from_exponents(p, exps)


def rank_check(xi: ExtensionMatrix) -> int:
    """2l minus the F_p-rank of alpha, which is the number of nontrivial
    invariant factors of the extension group."""
    return 2 * xi.rank - rank_mod_p(xi.alpha, xi.profile.p)


def dual_extension(xi: ExtensionMatrix) -> ExtensionMatrix:
    """The dual extension: transpose (an involution)."""
    l = xi.rank
    return canonicalize([[xi.alpha[j][i] for j in range(l)] for i in range(l)],
                        xi.profile)


def add(xi1: ExtensionMatrix, xi2: ExtensionMatrix) -> ExtensionMatrix:
    """Entrywise sum of extension classes."""
    if xi1.profile != xi2.profile:
        raise DimensionMismatch("add: profiles differ")
    l = xi1.rank
    return canonicalize([[xi1.alpha[i][j] + xi2.alpha[i][j] for j in range(l)]
                         for i in range(l)], xi1.profile)


def is_autodual(xi: ExtensionMatrix) -> bool:
    mods = position_moduli(xi.profile)
    l = xi.rank
    return all((xi.alpha[j][i] - xi.alpha[i][j]) % mods[i][j] == 0
               for i in range(l) for j in range(i, l))


def is_antidual(xi: ExtensionMatrix) -> bool:
    mods = position_moduli(xi.profile)
    l = xi.rank
    return all((xi.alpha[j][i] + xi.alpha[i][j]) % mods[i][j] == 0
               for i in range(l) for j in range(i, l))


def transform(xi: ExtensionMatrix, sigma: HomMatrix, *,
              check: bool = True) -> ExtensionMatrix:
    """The class under a change of identification: sigma·alpha·sigma^T."""
    group = FinAbGroup(xi.profile)
    if sigma.source != group or sigma.target != group:
        raise DimensionMismatch("transform: sigma does not act on the right group")
    if check and is_automorphism(sigma) is None:
        raise InvariantViolation("automorphism", "sigma is not an automorphism")
    s = [list(r) for r in sigma.entries]
    prod = smith.matmul(smith.matmul(s, [list(r) for r in xi.alpha]),
                        smith.transpose(s))
    return canonicalize(prod, xi.profile)


@dataclass(frozen=True)
class ExtensionBlock:
    """A positional block of an extension matrix, canonical for the row and
    column sub-profiles."""

    row_profile: ExponentProfile
    col_profile: ExponentProfile
    entries: tuple[tuple[int, ...], ...]
    row_indices: tuple[int, ...]
    col_indices: tuple[int, ...]

    def transpose(self) -> "ExtensionBlock":
        ent = tuple(tuple(self.entries[i][j] for i in range(len(self.row_indices)))
                    for j in range(len(self.col_indices)))
        return ExtensionBlock(self.col_profile, self.row_profile, ent,
                              self.col_indices, self.row_indices)

    def to_extension(self) -> ExtensionMatrix:
        if self.row_indices != self.col_indices:
            raise DimensionMismatch("to_extension: only diagonal blocks are classes")
        return ExtensionMatrix(self.row_profile, self.entries)


@dataclass(frozen=True)
class BlockDecomposition:
    ss: ExtensionBlock
    st: ExtensionBlock
    ts: ExtensionBlock
    tt: ExtensionBlock


def block_decompose(xi: ExtensionMatrix, s_indices: Sequence[int],
                    t_indices: Sequence[int]) -> BlockDecomposition:
    """The four index-blocks of alpha for a partition {S, T} of the
    coordinates (both parts nonempty, disjoint, covering)."""
    l = xi.rank
    s = tuple(sorted(int(i) for i in s_indices))
    t = tuple(sorted(int(i) for i in t_indices))
    if not s or not t or set(s) & set(t) or set(s) | set(t) != set(range(l)):
        raise InvariantViolation("partition", "S, T must partition the indices")

    def block(rows, cols):
        ent = tuple(tuple(xi.alpha[i][j] for j in cols) for i in rows)
        return ExtensionBlock(xi.profile.restricted(rows),
                              xi.profile.restricted(cols), ent, rows, cols)

    return BlockDecomposition(block(s, s), block(s, t), block(t, s), block(t, t))


def skew_lift(xi: ExtensionMatrix) -> list[list[int]]:
    """An exactly skew-symmetric integer lift of an antidual class: keep the
    canonical entries above the diagonal, negate them below, zero diagonal."""
    if not is_antidual(xi):
        raise InvariantViolation("antidual", "skew lift needs an antidual class")
    l = xi.rank
    out = [[0] * l for _ in range(l)]
    for i in range(l):
        for j in range(i + 1, l):
            out[i][j] = xi.alpha[i][j]
            out[j][i] = -xi.alpha[i][j]
    return out


def enumerate_antidual(profile: ExponentProfile) -> Iterator[ExtensionMatrix]:
    """All canonical antidual matrices for an odd-p profile, in odometer
    order over the strictly-lower-triangle entries."""
    if profile.p == 2:
        raise UnsupportedStructure("enumerate_antidual: p = 2 diagonal is ambiguous")
    l = profile.rank
    mods = position_moduli(profile)
    positions = [(i, j) for i in range(l) for j in range(i)]
    counters = [0] * len(positions)
    while True:
        alpha = [[0] * l for _ in range(l)]
        for (i, j), v in zip(positions, counters):
            alpha[i][j] = v
            alpha[j][i] = (-v) % mods[i][j]
        yield ExtensionMatrix(profile, tuple(tuple(r) for r in alpha))
        k = 0
        while k < len(positions):
            counters[k] += 1
            if counters[k] < mods[positions[k][0]][positions[k][1]]:
                break
            counters[k] = 0
            k += 1
        else:
            return


def random_extension(profile: ExponentProfile, rng: SplitMix64) -> ExtensionMatrix:
    l = profile.rank
    mods = position_moduli(profile)
    return ExtensionMatrix(profile, tuple(
        tuple(rng.below(mods[i][j]) for j in range(l)) for i in range(l)))


def random_antidual(profile: ExponentProfile, rng: SplitMix64) -> ExtensionMatrix:
    if profile.p == 2:
        raise UnsupportedStructure("random_antidual: odd p only")
    l = profile.rank
    mods = position_moduli(profile)
    alpha = [[0] * l for _ in range(l)]
    for i in range(l):
        for j in range(i):
            v = rng.below(mods[i][j])
            alpha[i][j] = v
            alpha[j][i] = (-v) % mods[i][j]
    return ExtensionMatrix(profile, tuple(tuple(r) for r in alpha))


@dataclass(frozen=True)
class SymplecticRealization:
    """A symplectic pair realizing an antidual class, with its maximal
    isotropic kernel subgroup and the canonical kernel basis (the data
    that `extension_from_triple` consumes)."""

    pair: SymplecticPair
    isotropic: Subgroup
    kernel_basis: tuple[Element, ...]
    lifts: tuple[Element, ...]
    profile: ExponentProfile


def symplectic_from_antidual(xi: ExtensionMatrix) -> SymplecticRealization:
    """Build the symplectic self-duality attached to an antidual class.

    The extension group is presented by generators g_1..g_l (the kernel) and
    h_1..h_l with relations p^{lambda_i} h_i = sum_k a_ik g_k, where a is the
    exact skew lift of alpha.  The pairing

        B(g_i, g_j) = 0,  B(g_i, h_j) = delta_ij / p^{lambda_i},
        B(h_i, h_j) = a_ij / p^{lambda_i + lambda_j}

    kills every relation exactly because a is skew with zero diagonal (this
    needs p odd).  Well-definedness, nondegeneracy and maximal isotropy of
    the kernel are all verified, not assumed.
    """
    profile = xi.profile
    p = profile.p
    if p == 2:
        raise UnsupportedStructure("symplectic_from_antidual: p must be odd")
    if not is_antidual(xi):
        raise InvariantViolation("antidual", "class is not antidual")
    l = profile.rank
    mods = profile.moduli
    tilde = skew_lift(xi)
    relations = [[0] * (2 * l) for _ in range(2 * l)]
    for i in range(l):
        relations[i][i] = mods[i]
        relations[l + i][l + i] = mods[i]
        for k in range(l):
            relations[k][l + i] = -tilde[i][k]
    dec = smith.smith(relations)
    diag = dec.diagonal
    kept = []
    for t in range(2 * l - 1, -1, -1):
        d = diag[t]
        if d == 1:
            continue
        e = 0
        while d % p == 0:
            d //= p
            e += 1
        if d != 1:
            raise SympdualError("symplectic_from_antidual: non-p-power factor")
        kept.append((t, e))
    group = FinAbGroup.from_exponents(p, [e for _, e in kept])
    if group != extension_group(xi):
        raise SympdualError("symplectic_from_antidual: presentation group mismatch")
    umat = dec.U

    def to_group(coeff: Sequence[int]) -> Element:
        w = smith.matvec(umat, coeff)
        return group.element([w[t] for t, _ in kept])

    uinv = smith.invert_unimodular([list(r) for r in umat])
    reps = [[uinv[i][t] for i in range(2 * l)] for t, _ in kept]

    def pairing_on_generators(c1: Sequence[int], c2: Sequence[int]) -> Fraction:
        total = Fraction(0)
        for i in range(l):
            total += Fraction(c1[i] * c2[l + i] - c1[l + i] * c2[i], mods[i])
            for j in range(l):
                if tilde[i][j]:
                    total += Fraction(c1[l + i] * c2[l + j] * tilde[i][j],
                                      mods[i] * mods[j])
        return mod1(total)

    gmods = group.moduli
    nums = []
    for a in range(group.rank):
        row = []
        for b in range(group.rank):
            val = pairing_on_generators(reps[a], reps[b])
            scaled = val * min(gmods[a], gmods[b])
            if scaled.denominator != 1:
                raise SympdualError("symplectic_from_antidual: pairing not well-defined")
            row.append(int(scaled) % min(gmods[a], gmods[b]))
        nums.append(tuple(row))
    form = SymplecticForm(group, tuple(nums))
    pair = SymplecticPair(group, form, provenance={"construction": "antidual-class"})
    basis = tuple(to_group([1 if k == i else 0 for k in range(2 * l)])
                  for i in range(l))
    lifts = tuple(to_group([1 if k == l + i else 0 for k in range(2 * l)])
                  for i in range(l))
    sub = Subgroup.from_generators(group, basis)
    if sub.order != profile.order:
        raise SympdualError("symplectic_from_antidual: kernel subgroup order mismatch")
    if orthogonal_complement(pair, sub) != sub:
        raise SympdualError("symplectic_from_antidual: kernel not maximal isotropic")
    return SymplecticRealization(pair, sub, basis, lifts, profile)


def extension_from_triple(pair: SymplecticPair, isotropic: Subgroup,
                          kernel_basis: Sequence[Element],
                          profile: ExponentProfile) -> ExtensionMatrix:
    """Read off the classifying matrix of the extension attached to a
    maximal isotropic subgroup with an identified basis.

    `kernel_basis[i]` is the element mapped to the i-th standard generator;
    the quotient map sends x to (B(u_1, x), ..., B(u_l, x)), lifts of the
    dual generators are found by congruence solving, and row i of alpha is
    the coordinate vector of p^{lambda_i} times the i-th lift.
    """
    group = pair.group
    if isotropic.ambient != group:
        raise DimensionMismatch("extension_from_triple: ambient mismatch")
    if profile.p != group.p:
        raise InvariantViolation("same-prime", "profile prime differs from the group")
    l = profile.rank
    if len(kernel_basis) != l:
        raise DimensionMismatch("extension_from_triple: need one basis element per factor")
    basis = [group.element(u) for u in kernel_basis]
    mods = profile.moduli
    for i, u in enumerate(basis):
        if group.element_order(u) > mods[i]:
            raise InvariantViolation(
                "isomorphism", f"basis element {i} has order exceeding p^lambda_{i}")
    if Subgroup.from_generators(group, basis) != isotropic:
        raise InvariantViolation("isomorphism", "basis does not generate the subgroup")
    if isotropic.order != profile.order:
        raise InvariantViolation("isomorphism", "subgroup order differs from the profile")
    if orthogonal_complement(pair, isotropic) != isotropic:
        raise InvariantViolation("maximal-isotropic",
                                 "subgroup is not maximal isotropic")
    big = group.moduli[0]
    gmods = group.moduli
    pos_mods = [[min(a, b) for b in gmods] for a in gmods]
    coeff = []
    for i in range(l):
        row = []
        for b in range(group.rank):
            acc = 0
            for a in range(group.rank):
                na = pair.form.numerators[a][b]
                if na and basis[i][a]:
                    acc += na * basis[i][a] * (big // pos_mods[a][b])
            row.append(acc % big)
        coeff.append(row)
    rhs = [[(big // mods[j]) if i == j else 0 for j in range(l)] for i in range(l)]
    lift_sols = smith.solve_congruence_many(coeff, rhs, [big] * l)
    lifts = []
    for j in range(l):
        sol = lift_sols[j]
        if sol is None:
            raise InvariantViolation("maximal-isotropic",
                                     "dual generator has no lift (quotient map not onto)")
        lifts.append(group.element(sol))
    basis_cols = [[basis[k][i] for k in range(l)] for i in range(group.rank)]
    targets = [[element_scale(group, mods[i], lifts[i])[r] for i in range(l)]
               for r in range(group.rank)]
    coord_sols = smith.solve_congruence_many(basis_cols, targets, list(gmods))
    alpha = []
    for i in range(l):
        sol = coord_sols[i]
        if sol is None:
            raise SympdualError("extension_from_triple: kernel coordinates unsolvable")
        alpha.append(sol)
    return canonicalize(alpha, profile)
