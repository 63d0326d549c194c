"""Abelian groups presented as direct sums of cyclic groups.

A :class:`GroupSpec` is either a finite list of moduli or an indexed family
whose modulus function is eventually periodic on both sides. Modulus ``0``
stands for ``Z``; modulus ``1`` is rejected. :class:`Element` values are
finitely supported and always stored with reduced residues, so equality is
structural.
"""

from __future__ import annotations

import math
from bisect import bisect_left
from dataclasses import dataclass
from typing import Callable, Iterable, Mapping

from .errors import GrexpandError, OutsideDomain, SpecMismatch

NATURALS = "naturals"
INTEGERS = "integers"
INFINITE = math.inf


def _lcm_all(values: Iterable[int]) -> int:
    out = 1
    for v in values:
        out = math.lcm(out, v)
    return out


@dataclass(frozen=True, eq=False)
class PeriodicPattern:
    """Eventually periodic integer function on ``N`` or ``Z``.

    Values on ``lo .. lo+len(core)-1`` are explicit. Beyond the core the
    ``right`` pattern repeats; below it (integers only) ``left`` repeats
    outward, so ``left[0]`` sits at ``lo - 1``.
    """

    index: str
    lo: int
    core: tuple
    right: tuple
    left: tuple = ()

    def __post_init__(self):
        object.__setattr__(self, "core", tuple(int(v) for v in self.core))
        object.__setattr__(self, "right", tuple(int(v) for v in self.right))
        object.__setattr__(self, "left", tuple(int(v) for v in self.left))
        if self.index not in (NATURALS, INTEGERS):
            raise GrexpandError(f"unknown index domain {self.index!r}")
        if not self.right:
            raise GrexpandError("right period must be non-empty")
        if self.index == NATURALS:
            if self.lo != 0:
                raise GrexpandError("a naturals-indexed pattern starts at 0")
            if self.left:
                raise GrexpandError("a naturals-indexed pattern has no left period")
        elif not self.left:
            raise GrexpandError("an integers-indexed pattern needs a left period")

    @property
    def hi(self) -> int:
        return self.lo + len(self.core) - 1

    def in_domain(self, k: int) -> bool:
        return self.index == INTEGERS or k >= 0

    def __call__(self, k: int) -> int:
        if k > self.hi:
            return self.right[(k - self.hi - 1) % len(self.right)]
        if k >= self.lo:
            return self.core[k - self.lo]
        if self.index == NATURALS:
            raise OutsideDomain(f"index {k} is negative in a naturals-indexed family")
        return self.left[(self.lo - 1 - k) % len(self.left)]

    def window(self) -> tuple[int, int]:
        """Core plus one full period on each side."""
        a = self.lo - len(self.left) if self.index == INTEGERS else 0
        return a, self.hi + len(self.right)

    def __eq__(self, other):
        if not isinstance(other, PeriodicPattern):
            return NotImplemented
        if self.index != other.index:
            return False
        a = min(self.lo, other.lo) - math.lcm(len(self.left) or 1, len(other.left) or 1)
        b = max(self.hi, other.hi) + math.lcm(len(self.right), len(other.right))
        if self.index == NATURALS:
            a = 0
        return all(self(k) == other(k) for k in range(a, b + 1))

    def __hash__(self):
        return hash((self.index, frozenset(self.right), frozenset(self.left)))

    @classmethod
    def constant(cls, value: int, index: str = INTEGERS) -> "PeriodicPattern":
        return cls(index, 0, (), (value,), (value,) if index == INTEGERS else ())

    @classmethod
    def from_function(cls, f: Callable[[int], int], index: str, lo: int, hi: int,
                      right_len: int, left_len: int = 0) -> "PeriodicPattern":
        """Sample ``f`` on the core and one period on each side."""
        core = tuple(f(k) for k in range(lo, hi + 1))
        right = tuple(f(hi + 1 + t) for t in range(right_len))
        left = tuple(f(lo - 1 - t) for t in range(left_len)) if index == INTEGERS else ()
        return cls(index, lo, core, right, left)

    def to_dict(self) -> dict:
        d = {"index": self.index, "lo": self.lo, "core": list(self.core),
             "right": list(self.right)}
        if self.index == INTEGERS:
            d["left"] = list(self.left)
        return d


class GroupSpec:
    """Finite description of a direct sum of cyclic groups."""

    __slots__ = ("kind", "moduli", "pattern", "_hash")

    def __init__(self, moduli=None, pattern: PeriodicPattern | None = None):
        if (moduli is None) == (pattern is None):
            raise GrexpandError("give exactly one of moduli or pattern")
        if moduli is not None:
            self.kind = "finite"
            self.moduli = tuple(int(m) for m in moduli)
            self.pattern = None
            values = self.moduli
        else:
            self.kind = "family"
            self.moduli = None
            self.pattern = pattern
            values = pattern.core + pattern.right + pattern.left
        for m in values:
            if m < 0 or m == 1:
                raise GrexpandError(f"modulus {m} is not allowed (use 0 for Z, >= 2 otherwise)")
        self._hash = hash((self.kind, self.moduli, self.pattern))

    @classmethod
    def finite(cls, moduli: Iterable[int]) -> "GroupSpec":
        return cls(moduli=tuple(moduli))

    @classmethod
    def family(cls, index: str, core=(), right=(2,), left=None, lo: int = 0) -> "GroupSpec":
        if left is None:
            left = right if index == INTEGERS else ()
        return cls(pattern=PeriodicPattern(index, lo, tuple(core), tuple(right), tuple(left)))

    @property
    def is_finite(self) -> bool:
        return self.kind == "finite"

    @property
    def index_kind(self) -> str:
        return "finite" if self.is_finite else self.pattern.index

    def __len__(self):
        if not self.is_finite:
            raise TypeError("an indexed family has infinitely many coordinates")
        return len(self.moduli)

    def modulus_at(self, k: int) -> int:
        if self.is_finite:
            if not 0 <= k < len(self.moduli):
                raise OutsideDomain(f"index {k} outside 0..{len(self.moduli) - 1}")
            return self.moduli[k]
        return self.pattern(k)

    def in_domain(self, k: int) -> bool:
        if self.is_finite:
            return 0 <= k < len(self.moduli)
        return self.pattern.in_domain(k)

    def window(self) -> tuple[int, int]:
        if self.is_finite:
            return 0, len(self.moduli) - 1
        return self.pattern.window()

    def indices(self, lo: int | None = None, hi: int | None = None) -> range:
        """Indices of the domain inside ``[lo, hi]`` (whole domain if finite)."""
        if self.is_finite:
            lo = 0 if lo is None else max(lo, 0)
            hi = len(self.moduli) - 1 if hi is None else min(hi, len(self.moduli) - 1)
        elif self.pattern.index == NATURALS:
            lo = 0 if lo is None else max(lo, 0)
        return range(lo, hi + 1)

    def torsion_indices(self, lo: int | None = None, hi: int | None = None) -> list[int]:
        return [k for k in self.indices(lo, hi) if self.modulus_at(k) != 0]

    @property
    def has_free_part(self) -> bool:
        """True when some coordinate is a copy of ``Z``."""
        if self.is_finite:
            return 0 in self.moduli
        p = self.pattern
        return 0 in p.core or 0 in p.right or 0 in p.left

    @property
    def order(self):
        if self.is_finite and 0 not in self.moduli:
            return math.prod(self.moduli)
        return INFINITE

    @property
    def exponent(self) -> int:
        if not self.is_finite or 0 in self.moduli:
            raise GrexpandError("exponent is only defined for finite torsion specs")
        return _lcm_all(self.moduli)

    def __eq__(self, other):
        if not isinstance(other, GroupSpec):
            return NotImplemented
        if self is other:
            return True
        return self.kind == other.kind and self.moduli == other.moduli and self.pattern == other.pattern

    def __hash__(self):
        return self._hash

    def __repr__(self):
        if self.is_finite:
            return f"GroupSpec.finite({list(self.moduli)})"
        p = self.pattern
        return (f"GroupSpec.family({p.index!r}, lo={p.lo}, core={list(p.core)}, "
                f"right={list(p.right)}, left={list(p.left)})")

    def to_dict(self) -> dict:
        if self.is_finite:
            return {"kind": "finite", "moduli": list(self.moduli)}
        return {"kind": "family", **self.pattern.to_dict()}

    # convenience constructors for elements
    def element(self, coords: Mapping[int, int] | Iterable[tuple[int, int]] = ()) -> "Element":
        return Element(self, coords)

    def vector(self, values: Iterable[int]) -> "Element":
        """Element of a finite spec from its dense coordinate list."""
        values = list(values)
        if not self.is_finite or len(values) != len(self.moduli):
            raise SpecMismatch(f"{values} is not a dense vector for {self}")
        return Element(self, enumerate(values))

    def basis_vector(self, k: int, value: int = 1) -> "Element":
        return Element(self, {k: value})

    def zero(self) -> "Element":
        return Element(self, ())


def _reduce(spec: GroupSpec, k: int, v: int) -> int:
    m = spec.modulus_at(k)
    return v % m if m else v


class Element:
    """Finitely supported element with canonical residues."""

    __slots__ = ("spec", "coords", "_hash")

    def __init__(self, spec: GroupSpec, coords=()):
        items = coords.items() if isinstance(coords, Mapping) else coords
        acc: dict[int, int] = {}
        for k, v in items:
            k = int(k)
            if not spec.in_domain(k):
                raise OutsideDomain(f"index {k} outside the domain of {spec}")
            acc[k] = acc.get(k, 0) + int(v)
        clean = []
        for k in sorted(acc):
            r = _reduce(spec, k, acc[k])
            if r:
                clean.append((k, r))
        self.spec = spec
        self.coords = tuple(clean)
        self._hash = None

    @classmethod
    def _raw(cls, spec, coords):
        e = cls.__new__(cls)
        e.spec = spec
        e.coords = coords
        e._hash = None
        return e

    @property
    def support(self) -> tuple[int, ...]:
        return tuple(k for k, _ in self.coords)

    def value(self, k: int) -> int:
        for j, v in self.coords:
            if j == k:
                return v
        return 0

    def as_dict(self) -> dict[int, int]:
        return dict(self.coords)

    def dense(self) -> list[int]:
        if not self.spec.is_finite:
            raise TypeError("dense() needs a finite spec")
        out = [0] * len(self.spec.moduli)
        for k, v in self.coords:
            out[k] = v
        return out

    def __bool__(self):
        return bool(self.coords)

    def _check(self, other: "Element"):
        if not isinstance(other, Element):
            raise TypeError(f"cannot combine Element with {type(other).__name__}")
        if other.spec is not self.spec and other.spec != self.spec:
            raise SpecMismatch(f"{self.spec} vs {other.spec}")

    def __add__(self, other: "Element") -> "Element":
        self._check(other)
        acc = dict(self.coords)
        for k, v in other.coords:
            acc[k] = acc.get(k, 0) + v
        return Element(self.spec, acc)

    def __neg__(self) -> "Element":
        return Element(self.spec, [(k, -v) for k, v in self.coords])

    def __sub__(self, other: "Element") -> "Element":
        return self + (-other)

    def __mul__(self, c: int) -> "Element":
        if not isinstance(c, int):
            return NotImplemented
        return Element(self.spec, [(k, c * v) for k, v in self.coords])

    __rmul__ = __mul__

    def __eq__(self, other):
        if not isinstance(other, Element):
            return NotImplemented
        return self.coords == other.coords and (self.spec is other.spec or self.spec == other.spec)

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.spec, self.coords))
        return self._hash

    def order(self):
        out = 1
        for k, v in self.coords:
            m = self.spec.modulus_at(k)
            if m == 0:
                return INFINITE
            out = math.lcm(out, m // math.gcd(v, m))
        return out

    def is_torsion(self) -> bool:
        return all(self.spec.modulus_at(k) != 0 for k, _ in self.coords)

    def __repr__(self):
        if self.spec.is_finite:
            return f"Element({self.dense()})"
        return f"Element({dict(self.coords)})"

    def to_json(self):
        if self.spec.is_finite:
            return self.dense()
        return {str(k): v for k, v in self.coords}


def modulus_at(spec: GroupSpec, index: int) -> int:
    return spec.modulus_at(index)


def element_arith(op: str, x: Element, y: Element | None = None, c: int | None = None) -> Element:
    """``op`` is one of ``add``, ``negate``, ``scale`` (the latter needs ``c``)."""
    if op == "add":
        return x + y
    if op == "negate":
        return -x
    if op == "scale":
        return c * x
    raise GrexpandError(f"unknown element operation {op!r}")


def element_order(x: Element):
    return x.order()


def is_torsion(x: Element) -> bool:
    return x.is_torsion()


# ---------------------------------------------------------------------------
# order-preserving reindexing of eventually periodic index subsets


class IndexSubset:
    """Order-preserving bijection between a kept index set and a new domain.

    ``keep`` must be eventually periodic with the periods of ``spec``'s
    pattern. The new domain is finite, naturals or integers depending on
    which tails contain kept indices.
    """

    def __init__(self, spec: GroupSpec, keep: Callable[[int], bool],
                 core: tuple[int, int] | None = None, periods: tuple[int, int] | None = None):
        self.spec = spec
        if spec.is_finite:
            self.kept = [k for k in range(len(spec.moduli)) if keep(k)]
            self.kind = "finite"
            self.reversed = False
            return
        p = spec.pattern
        # ``core`` and ``periods`` may enlarge the spec's own ones when ``keep``
        # has a longer transient or period
        self.lo, self.hi = core if core is not None else (p.lo, p.hi)
        self.pr, self.pl = periods if periods is not None else (len(p.right), len(p.left))
        if p.index == NATURALS:
            self.lo = 0
        self.core_kept = [k for k in range(self.lo, self.hi + 1) if keep(k)]
        self.right_res = [t for t in range(self.pr) if keep(self.hi + 1 + t)]
        self.left_res = ([t for t in range(self.pl) if keep(self.lo - 1 - t)]
                         if p.index == INTEGERS else [])
        cr, cl = len(self.right_res), len(self.left_res)
        self.reversed = False
        if cr and cl:
            self.kind = INTEGERS
        elif cr:
            self.kind = NATURALS
        elif cl:
            self.kind = NATURALS
            self.reversed = True
        else:
            self.kind = "finite"
            self.kept = list(self.core_kept)

    def _rank(self, k: int) -> int:
        nc = len(self.core_kept)
        if k > self.hi:
            q, r = divmod(k - self.hi - 1, self.pr)
            return nc + q * len(self.right_res) + bisect_left(self.right_res, r)
        if k >= self.lo:
            return bisect_left(self.core_kept, k)
        q, r = divmod(self.lo - 1 - k, self.pl)
        return -(q * len(self.left_res) + bisect_left(self.left_res, r)) - 1

    def _unrank(self, j: int) -> int:
        nc = len(self.core_kept)
        if 0 <= j < nc:
            return self.core_kept[j]
        if j >= nc:
            q, r = divmod(j - nc, len(self.right_res))
            return self.hi + 1 + q * self.pr + self.right_res[r]
        q, r = divmod(-j - 1, len(self.left_res))
        return self.lo - 1 - (q * self.pl + self.left_res[r])

    def to_sub(self, k: int) -> int:
        if self.kind == "finite":
            return self.kept.index(k)
        if self.reversed:
            return len(self.core_kept) - self._rank(k) - 1
        return self._rank(k)

    def from_sub(self, j: int) -> int:
        if self.kind == "finite":
            return self.kept[j]
        if self.reversed:
            return self._unrank(len(self.core_kept) - j - 1)
        return self._unrank(j)

    def sub_spec(self, value: Callable[[int], int]) -> GroupSpec:
        """Spec on the new domain with modulus ``value(from_sub(j))``."""
        if self.kind == "finite":
            return GroupSpec.finite([value(k) for k in self.kept])
        f = lambda j: value(self.from_sub(j))
        nc = len(self.core_kept)
        if self.kind == NATURALS:
            period = len(self.left_res) if self.reversed else len(self.right_res)
            return GroupSpec(pattern=PeriodicPattern.from_function(f, NATURALS, 0, nc - 1, period))
        return GroupSpec(pattern=PeriodicPattern.from_function(
            f, INTEGERS, 0, nc - 1, len(self.right_res), len(self.left_res)))


@dataclass(frozen=True)
class TorsionPart:
    spec: GroupSpec
    ambient: GroupSpec
    reindex: IndexSubset

    def predicate(self, k: int) -> bool:
        return self.ambient.modulus_at(k) != 0

    def contains(self, x: Element) -> bool:
        return x.is_torsion()

    def to_sub(self, x: Element) -> Element:
        return Element(self.spec, [(self.reindex.to_sub(k), v) for k, v in x.coords])

    def from_sub(self, y: Element) -> Element:
        return Element(self.ambient, [(self.reindex.from_sub(j), v) for j, v in y.coords])


def torsion_part(spec: GroupSpec) -> TorsionPart:
    """Sub-spec of all torsion coordinates, with the identifying predicate."""
    sub = IndexSubset(spec, lambda k: spec.modulus_at(k) != 0)
    return TorsionPart(sub.sub_spec(spec.modulus_at), spec, sub)
