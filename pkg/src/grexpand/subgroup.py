"""Finite subgroups as integer lattices over their support.

A finite subgroup ``H`` supported on torsion coordinates ``k_1 < ... < k_s``
is stored as the row Hermite normal form of the lattice

    L = Z-span(lifted generators) + Z-span(m_i e_i),

so ``H = L / R`` and ``|H| = prod(m_i) / prod(pivots)``. The support is the
union of the generators' supports, which is exactly the set of coordinates
on which ``H`` projects non-trivially; together with the unique HNF this
makes equality structural.
"""

from __future__ import annotations

import itertools
import math
import os
from typing import Iterable

from . import kernels
from .errors import CapExceeded, GrexpandError, NonTorsionGenerator, SpecMismatch
from .groups import Element, GroupSpec

DEFAULT_CAP = 10**6


def enumeration_cap() -> int:
    """Element cap for enumeration routes; ``GREXPAND_CAP`` overrides it."""
    raw = os.environ.get("GREXPAND_CAP")
    return int(raw) if raw else DEFAULT_CAP


def _mods(spec: GroupSpec, support) -> list[int]:
    return [spec.modulus_at(k) for k in support]


def _vector(x: Element, support, position=None):
    """Dense coordinates of ``x`` over ``support``; None if x leaves it."""
    if position is None:
        position = {k: i for i, k in enumerate(support)}
    v = [0] * len(support)
    for k, val in x.coords:
        i = position.get(k)
        if i is None:
            return None
        v[i] = val
    return v


class FiniteSubgroup:
    __slots__ = ("spec", "support", "basis", "order", "_moduli", "_hash", "_gens", "_rows")

    def __init__(self, spec: GroupSpec, support: tuple, basis: tuple):
        self.spec = spec
        self.support = support
        self.basis = basis
        self._moduli = _mods(spec, support)
        self.order = kernels.pivots_order(basis, self._moduli)
        self._hash = None
        self._gens = None
        self._rows = None

    @classmethod
    def from_generators(cls, spec: GroupSpec, gens: Iterable[Element]) -> "FiniteSubgroup":
        gens = list(gens)
        support = set()
        for g in gens:
            if g.spec is not spec and g.spec != spec:
                raise SpecMismatch(f"generator {g} does not belong to {spec}")
            for k, _ in g.coords:
                if spec.modulus_at(k) == 0:
                    raise NonTorsionGenerator(
                        f"generator {g} has a non-zero Z coordinate at index {k}")
                support.add(k)
        support = tuple(sorted(support))
        position = {k: i for i, k in enumerate(support)}
        rows = [_vector(g, support, position) for g in gens if g]
        basis = kernels.hnf_mod(rows, _mods(spec, support))
        return cls(spec, support, tuple(tuple(r) for r in basis))

    @classmethod
    def from_rows(cls, spec: GroupSpec, support, rows) -> "FiniteSubgroup":
        """Subgroup generated by dense rows over ``support`` (canonicalized)."""
        gens = [Element._raw(spec, tuple((support[i], v) for i, v in enumerate(r) if v))
                for r in _reduce_rows(rows, _mods(spec, support))]
        return cls.from_generators(spec, gens)

    @classmethod
    def trivial(cls, spec: GroupSpec) -> "FiniteSubgroup":
        return cls(spec, (), ())

    # -- queries --------------------------------------------------------
    @property
    def moduli(self) -> list[int]:
        return list(self._moduli)

    def generators(self) -> list[Element]:
        """Non-zero basis rows as elements (a generating set)."""
        if self._gens is None:
            out = []
            for row in self.basis:
                coords = tuple((self.support[i], v) for i, v in enumerate(row) if v)
                if coords:
                    out.append(Element._raw(self.spec, coords))
            self._gens = out
        return list(self._gens)

    def is_trivial(self) -> bool:
        return self.order == 1

    def member(self, x: Element) -> bool:
        if x.spec is not self.spec and x.spec != self.spec:
            raise SpecMismatch(f"{x} does not belong to {self.spec}")
        v = _vector(x, self.support)
        if v is None:
            return False
        return kernels.is_member(self.basis, self._moduli, v)

    __contains__ = member

    def leq(self, other: "FiniteSubgroup") -> bool:
        _same(self, other)
        if self.order > other.order or other.order % self.order:
            return False
        return all(other.member(g) for g in self.generators())

    def __le__(self, other):
        return self.leq(other)

    def __add__(self, other: "FiniteSubgroup") -> "FiniteSubgroup":
        return sum_subgroups(self, other)

    def __eq__(self, other):
        if not isinstance(other, FiniteSubgroup):
            return NotImplemented
        return (self.support == other.support and self.basis == other.basis
                and (self.spec is other.spec or self.spec == other.spec))

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.support, self.basis))
        return self._hash

    def __repr__(self):
        return f"FiniteSubgroup(order={self.order}, gens={self.generators()})"

    def rows_on(self, support) -> list[list[int]]:
        """Basis rows padded onto a superset of the support."""
        support = tuple(support)
        if self._rows is not None and self._rows[0] == support:
            return [list(r) for r in self._rows[1]]
        position = {k: i for i, k in enumerate(support)}
        out = []
        for row in self.basis:
            v = [0] * len(support)
            for i, val in enumerate(row):
                if val:
                    v[position[self.support[i]]] = val
            out.append(v)
        self._rows = (support, out)
        return [list(r) for r in out]

    def elements(self, cap: int | None = None) -> list[Element]:
        return enumerate_subgroup(self, cap)

    def to_json(self) -> dict:
        return {"order": self.order, "generators": [g.to_json() for g in self.generators()]}


def _reduce_rows(rows, moduli):
    return [[v % m for v, m in zip(r, moduli)] for r in rows]


def _same(h1: FiniteSubgroup, h2: FiniteSubgroup):
    if h1.spec is not h2.spec and h1.spec != h2.spec:
        raise SpecMismatch(f"{h1.spec} vs {h2.spec}")


# -- operations -------------------------------------------------------------

def subgroup_from_generators(spec: GroupSpec, gens: Iterable[Element]) -> FiniteSubgroup:
    return FiniteSubgroup.from_generators(spec, gens)


def member(h: FiniteSubgroup, x: Element) -> bool:
    return h.member(x)


def sum_subgroups(*groups: FiniteSubgroup) -> FiniteSubgroup:
    first = groups[0]
    gens = []
    for h in groups:
        _same(first, h)
        gens.extend(h.generators())
    return FiniteSubgroup.from_generators(first.spec, gens)


def leq(h1: FiniteSubgroup, h2: FiniteSubgroup) -> bool:
    return h1.leq(h2)


def equal(h1: FiniteSubgroup, h2: FiniteSubgroup) -> bool:
    return h1 == h2


def enumerate_subgroup(h: FiniteSubgroup, cap: int | None = None) -> list[Element]:
    """All elements of ``h``; combinations ``sum c_i b_i`` with ``0 <= c_i < m_i/p_i``."""
    cap = enumeration_cap() if cap is None else cap
    if h.order > cap:
        raise CapExceeded(f"subgroup of order {h.order} exceeds cap {cap}")
    mods = h._moduli
    s = len(mods)
    ranges = [range(mods[i] // h.basis[i][i]) for i in range(s)]
    out = []
    for coeffs in itertools.product(*ranges):
        v = [0] * s
        for i, c in enumerate(coeffs):
            if c:
                row = h.basis[i]
                for k in range(i, s):
                    v[k] += c * row[k]
        coords = tuple((h.support[k], v[k] % mods[k]) for k in range(s) if v[k] % mods[k])
        out.append(Element._raw(h.spec, coords))
    return out


def enumerate_group(spec: GroupSpec, cap: int | None = None) -> list[Element]:
    """All elements of a finite torsion spec in mixed-radix order."""
    cap = enumeration_cap() if cap is None else cap
    if not spec.is_finite or spec.has_free_part:
        raise GrexpandError("only finite torsion specs can be enumerated")
    if spec.order > cap:
        raise CapExceeded(f"group of order {spec.order} exceeds cap {cap}")
    return [spec.vector(v) for v in itertools.product(*(range(m) for m in spec.moduli))]


def full_subgroup(spec: GroupSpec, lo: int | None = None, hi: int | None = None) -> FiniteSubgroup:
    """All torsion coordinates (of a finite spec, or of a window of a family)."""
    if not spec.is_finite and (lo is None or hi is None):
        raise GrexpandError("a window is needed for family specs")
    return FiniteSubgroup.from_generators(
        spec, [spec.basis_vector(k) for k in spec.torsion_indices(lo, hi)])


def coordinate_subgroup(spec: GroupSpec, k: int) -> FiniteSubgroup:
    return FiniteSubgroup.from_generators(spec, [spec.basis_vector(k)])


def intersect(h1: FiniteSubgroup, h2: FiniteSubgroup, method: str = "lattice",
              cap: int | None = None) -> FiniteSubgroup:
    """``h1 ∩ h2`` via the Zassenhaus lattice, enumeration, or annihilators."""
    _same(h1, h2)
    if method == "auto":
        method = "lattice"
    if method == "lattice":
        support = tuple(sorted(set(h1.support) | set(h2.support)))
        s = len(support)
        if s == 0:
            return FiniteSubgroup.trivial(h1.spec)
        mods = _mods(h1.spec, support)
        rows = [r + r for r in h1.rows_on(support)] + [r + [0] * s for r in h2.rows_on(support)]
        basis = kernels.hnf_mod(rows, mods + mods)
        return FiniteSubgroup.from_rows(h1.spec, support, [row[s:] for row in basis[s:]])
    if method == "enumerate":
        cap = enumeration_cap() if cap is None else cap
        small, big = (h1, h2) if h1.order <= h2.order else (h2, h1)
        if small.order > cap:
            raise CapExceeded(f"both subgroups exceed cap {cap}")
        return FiniteSubgroup.from_generators(
            h1.spec, [x for x in enumerate_subgroup(small, cap) if big.member(x)])
    if method == "duality":
        from .duality import annihilator_on, coannihilator_on
        support = tuple(sorted(set(h1.support) | set(h2.support)))
        return coannihilator_on(annihilator_on(h1, support) + annihilator_on(h2, support),
                                h1.spec, support)
    raise GrexpandError(f"unknown intersection method {method!r}")


def image(h: FiniteSubgroup, phi) -> FiniteSubgroup:
    """``phi(h)`` for any homomorphism whose domain is ``h.spec``."""
    if phi.domain is not h.spec and phi.domain != h.spec:
        raise SpecMismatch(f"map domain {phi.domain} vs subgroup spec {h.spec}")
    return FiniteSubgroup.from_generators(phi.codomain, [phi.apply(g) for g in h.generators()])


def preimage(h: FiniteSubgroup, phi, method: str = "lattice", cap: int | None = None) -> FiniteSubgroup:
    """``{x : phi(x) in h}`` for a matrix endomorphism of a finite torsion spec."""
    spec = h.spec
    if not spec.is_finite or spec.has_free_part:
        raise GrexpandError("preimage needs a finite torsion spec")
    if phi.domain != spec:
        raise SpecMismatch("endomorphism and subgroup live in different groups")
    if method == "enumerate":
        return FiniteSubgroup.from_generators(
            spec, [x for x in enumerate_group(spec, cap) if h.member(phi.apply(x))])
    if method not in ("lattice", "auto"):
        raise GrexpandError(f"unknown preimage method {method!r}")
    s = len(spec.moduli)
    if s == 0:
        return FiniteSubgroup.trivial(spec)
    mods = list(spec.moduli)
    support = tuple(range(s))
    rows = []
    for j in range(s):
        col = phi.apply(spec.basis_vector(j)).dense()
        unit = [0] * s
        unit[j] = 1
        rows.append(col + unit)
    rows.extend(r + [0] * s for r in h.rows_on(support))
    basis = kernels.hnf_mod(rows, mods + mods)
    return FiniteSubgroup.from_rows(spec, support, [row[s:] for row in basis[s:]])


def cyclic_subgroups(spec: GroupSpec, cap: int | None = None) -> list[FiniteSubgroup]:
    seen = {}
    for x in enumerate_group(spec, cap):
        h = FiniteSubgroup.from_generators(spec, [x])
        seen.setdefault(h, None)
    return sorted(seen, key=_sort_key)


def all_subgroups(spec: GroupSpec, cap: int | None = None) -> list[FiniteSubgroup]:
    """Every subgroup of a finite torsion group, as sums of cyclic subgroups."""
    cyclic = cyclic_subgroups(spec, cap)
    found = set(cyclic)
    frontier = list(cyclic)
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyclic:
                if c.leq(h):
                    continue
                k = h + c
                if k not in found:
                    found.add(k)
                    nxt.append(k)
        frontier = nxt
    return sorted(found, key=_sort_key)


def _sort_key(h: FiniteSubgroup):
    return (h.order, h.support, h.basis)


def order_formula_check(h: FiniteSubgroup) -> bool:
    """``|H|`` divides the product of the support moduli."""
    return math.prod(h._moduli) % h.order == 0
