"""Duality for finite abelian groups.

The dual of ``G = ⊕ Z_{m_i}`` is identified with ``G`` itself through the
pairing ``<x, a> = sum_i (E / m_i) x_i a_i  (mod E)``, ``E`` the exponent.
The pairing is symmetric, so annihilators in ``G^`` and in ``G`` are the
same computation: the kernel of ``a -> (<g, a>)_g`` over generators ``g``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from itertools import combinations_with_replacement
from typing import Sequence

from . import kernels
from .endo import Endomorphism, MatrixEndo
from .errors import NonCompactDual, SpecMismatch
from .groups import Element, GroupSpec
from .subgroup import FiniteSubgroup, intersect, image, preimage


def _check_finite(spec: GroupSpec):
    if not spec.is_finite or spec.has_free_part:
        raise NonCompactDual("duality is computed for finite groups only")


def dual_group(spec: GroupSpec) -> GroupSpec:
    """The character group, identified with ``spec`` via the pairing."""
    _check_finite(spec)
    return spec


@dataclass(frozen=True)
class PairingValue:
    residue: int
    exponent: int

    def __bool__(self):
        return self.residue != 0

    def __int__(self):
        return self.residue


def pairing(x: Element, a: Element) -> PairingValue:
    spec = x.spec
    if a.spec != spec:
        raise SpecMismatch("element and character belong to different groups")
    _check_finite(spec)
    E = spec.exponent
    av = a.as_dict()
    total = sum((E // spec.moduli[k]) * v * av[k] for k, v in x.coords if k in av)
    return PairingValue(total % E, E)


def _orthogonal(mods: list[int], gens: list[list[int]]) -> list[list[int]]:
    """Rows generating ``{a : sum_i (E/m_i) g_i a_i = 0 mod E for every g}``."""
    s = len(mods)
    r = len(gens)
    if r == 0:
        return [[int(i == j) for j in range(s)] for i in range(s)]
    E = 1
    for m in mods:
        E = E * m // _gcd(E, m)
    rows = []
    for i in range(s):
        w = E // mods[i]
        rows.append([(w * g[i]) % E for g in gens] + [int(i == j) for j in range(s)])
    basis = kernels.hnf_mod(rows, [E] * r + list(mods))
    return [row[r:] for row in basis[r:]]


def _gcd(a, b):
    while b:
        a, b = b, a % b
    return a


def annihilator_on(h: FiniteSubgroup, support) -> FiniteSubgroup:
    """Annihilator of ``h`` inside the finite group on ``support`` (a local finite spec)."""
    support = tuple(support)
    mods = [h.spec.modulus_at(k) for k in support]
    local = GroupSpec.finite(mods)
    rows = _orthogonal(mods, h.rows_on(support))
    return FiniteSubgroup.from_rows(local, tuple(range(len(mods))), rows)


def coannihilator_on(K: FiniteSubgroup, spec: GroupSpec, support) -> FiniteSubgroup:
    """Subgroup of ``spec`` on ``support`` orthogonal to ``K`` (given on the local spec)."""
    support = tuple(support)
    mods = [spec.modulus_at(k) for k in support]
    rows = _orthogonal(mods, K.rows_on(tuple(range(len(mods)))))
    return FiniteSubgroup.from_rows(spec, support, rows)


def annihilator(h: FiniteSubgroup) -> FiniteSubgroup:
    """``H^⊥ = {a : <h, a> = 0 for all h in H}``."""
    spec = h.spec
    _check_finite(spec)
    full = tuple(range(len(spec.moduli)))
    return FiniteSubgroup.from_rows(spec, full, _orthogonal(list(spec.moduli), h.rows_on(full)))


def coannihilator(K: FiniteSubgroup) -> FiniteSubgroup:
    """``K^⊥ = {x : <x, a> = 0 for all a in K}`` (same formula by symmetry)."""
    return annihilator(K)


def annihilator_enumerated(h: FiniteSubgroup) -> FiniteSubgroup:
    """Brute-force annihilator over all characters (oracle route)."""
    from .subgroup import enumerate_group
    gens = h.generators()
    return FiniteSubgroup.from_generators(
        h.spec, [a for a in enumerate_group(h.spec) if not any(pairing(g, a) for g in gens)])


def dual_endo(phi: Endomorphism) -> MatrixEndo:
    """``phi^(a) = a o phi``: matrix ``B_ji = m_j A_ij / m_i``."""
    spec = phi.domain
    _check_finite(spec)
    A = phi.matrix
    m = spec.moduli
    s = len(m)
    B = [[(m[j] * A[i][j]) // m[i] for i in range(s)] for j in range(s)]
    return MatrixEndo(spec, B)


# -- identity checks -------------------------------------------------------------

@dataclass(frozen=True)
class Violation:
    identity: str
    case: tuple

    def to_json(self):
        return {"identity": self.identity, "case": list(self.case)}


@dataclass(frozen=True)
class IdentityReport:
    checked: int
    violations: tuple = ()

    @property
    def holds(self) -> bool:
        return not self.violations

    def to_json(self):
        return {"checked": self.checked, "violations": [v.to_json() for v in self.violations]}


def verify_identities(spec: GroupSpec, phi: Endomorphism | None, subgroups: Sequence[FiniteSubgroup],
                      dual_subgroups: Sequence[FiniteSubgroup] | None = None,
                      pairs=None) -> IdentityReport:
    """Check the annihilator calculus on the given subgroups.

    Per ``H``: ``(phi H)^⊥ = phi^^{-1}(H^⊥)``, ``H^⊥⊥ = H`` and
    ``|H| |H^⊥| = |G|``. Per pair: ``(H1 + H2)^⊥ = H1^⊥ ∩ H2^⊥`` and
    ``(K1 ∩ K2)^⊥ = K1^⊥ + K2^⊥``. ``pairs`` defaults to all index pairs
    ``i <= j``.
    """
    _check_finite(spec)
    G_order = spec.order
    dual_subgroups = subgroups if dual_subgroups is None else dual_subgroups
    psi = dual_endo(phi) if phi is not None else None
    bad = []
    checked = 0
    ann = [annihilator(h) for h in subgroups]
    for i, h in enumerate(subgroups):
        checked += 1
        if h.order * ann[i].order != G_order:
            bad.append(Violation("order", (i,)))
        if coannihilator(ann[i]) != h:
            bad.append(Violation("double", (i,)))
        if psi is not None and annihilator(image(h, phi)) != preimage(ann[i], psi):
            bad.append(Violation("image", (i,)))
    index_pairs = pairs if pairs is not None else combinations_with_replacement(range(len(subgroups)), 2)
    co = {}
    for i, j in index_pairs:
        checked += 1
        if annihilator(subgroups[i] + subgroups[j]) != intersect(ann[i], ann[j]):
            bad.append(Violation("sum", (i, j)))
        if i < len(dual_subgroups) and j < len(dual_subgroups):
            for t in (i, j):
                if t not in co:
                    co[t] = coannihilator(dual_subgroups[t])
            lhs = coannihilator(intersect(dual_subgroups[i], dual_subgroups[j]))
            if lhs != co[i] + co[j]:
                bad.append(Violation("intersection", (i, j)))
    return IdentityReport(checked, tuple(bad))


# -- expansivity through the dual chain ------------------------------------------------

@dataclass(frozen=True)
class DualityReport:
    """Ascending ``T_n`` versus descending ``D_n = ∩_{k<=n} phi^^{-k}(S^⊥)``."""

    side: str
    T_full: bool
    D_trivial: bool
    steps: int
    chain_mismatches: tuple = ()
    D_orders: tuple = field(default=())
    T_orders: tuple = field(default=())

    @property
    def equivalence(self) -> bool:
        return self.T_full == self.D_trivial

    @property
    def holds(self) -> bool:
        return self.equivalence and not self.chain_mismatches

    def to_json(self):
        return {"side": self.side, "T_full": self.T_full, "D_trivial": self.D_trivial,
                "steps": self.steps, "T_orders": list(self.T_orders),
                "D_orders": list(self.D_orders), "chain_mismatches": list(self.chain_mismatches),
                "holds": self.holds}


def duality_expansivity_check(phi: Endomorphism, S: FiniteSubgroup, side: str = "forward") -> DualityReport:
    """Compare the trajectory of ``S`` with the dual chain of ``S^⊥``.

    Checks ``D_n = (T_{n+1})^⊥`` at every step and that ``T`` reaches ``G``
    exactly when ``D`` shrinks to ``{0}``.
    """
    from .dynamics import TWO_SIDED, trajectory_table, _chain_bound

    spec = phi.domain
    _check_finite(spec)
    psi = dual_endo(phi)
    psi_inv = psi.inverse() if side == TWO_SIDED else None
    table = trajectory_table(phi, S, _chain_bound(spec) + 2, side, stop=True, extra=1)
    table.check_invariants()
    U = annihilator(S)
    D = [U]
    while True:
        prev = D[-1]
        if psi_inv is None:
            nxt = intersect(U, preimage(prev, psi))
        else:
            nxt = intersect(intersect(prev, preimage(prev, psi)), preimage(prev, psi_inv))
        D.append(nxt)
        if nxt == prev:
            break
    steps = max(len(D), len(table))
    mismatches = []
    for n in range(steps):
        Dn = D[min(n, len(D) - 1)]
        Tn = table.subgroup(min(n + 1, len(table)))
        if Dn != annihilator(Tn):
            mismatches.append(n)
    return DualityReport(side, table.final.order == spec.order, D[-1].is_trivial(), steps,
                         tuple(mismatches), tuple(d.order for d in D), table.orders)
