"""Homomorphisms and endomorphisms of direct sums of cyclic groups.

Concrete carriers: integer matrices on finite specs, (twisted) shifts on
indexed families, and the usual combinators (direct sum, composition,
powers, inverses, quotients, restrictions to divisor-pattern subgroups).
All values are immutable once built.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass
from functools import cached_property

from . import lattice
from .errors import (GrexpandError, IllDefined, IllDefinedTwist, NotAutomorphism,
                     NotInvariant, ReindexClash, SpecMismatch)
from .groups import INTEGERS, NATURALS, Element, GroupSpec, IndexSubset, PeriodicPattern
from .subgroup import FiniteSubgroup, enumerate_group, image, preimage


class Hom:
    """Additive map ``domain -> codomain``."""

    domain: GroupSpec
    codomain: GroupSpec

    def apply(self, x: Element) -> Element:
        raise NotImplementedError

    def __call__(self, x: Element) -> Element:
        return self.apply(x)

    def _check_arg(self, x: Element):
        if x.spec is not self.domain and x.spec != self.domain:
            raise SpecMismatch(f"{x} is not in the domain {self.domain}")


class MapHom(Hom):
    """Homomorphism given by a Python callable (used for projections and the like)."""

    def __init__(self, domain, codomain, fn, name="map"):
        self.domain = domain
        self.codomain = codomain
        self._fn = fn
        self.name = name

    def apply(self, x):
        self._check_arg(x)
        return self._fn(x)


class Endomorphism(Hom):
    name = "endomorphism"

    @property
    def codomain(self):
        return self.domain

    @property
    def is_automorphism(self) -> bool:
        return False

    def apply_inverse(self, x: Element) -> Element:
        raise NotAutomorphism(f"{self.name} is not an automorphism")

    def inverse(self) -> "Endomorphism":
        if not self.is_automorphism:
            raise NotAutomorphism(f"{self.name} is not an automorphism")
        return InverseEndo(self)

    def periodic_window(self) -> tuple[int, int]:
        """Index window on which the map's periodic structure is fully visible."""
        return self.domain.window()

    @cached_property
    def matrix(self) -> tuple:
        if not self.domain.is_finite:
            raise GrexpandError("only endomorphisms of finite specs have a matrix")
        return tuple(tuple(r) for r in lattice.matrix_of(self))

    def describe(self) -> dict:
        return {"kind": self.name}

    def __repr__(self):
        return f"<{type(self).__name__} {self.describe()}>"


class IdentityEndo(Endomorphism):
    name = "identity"

    def __init__(self, spec: GroupSpec):
        self.domain = spec

    @property
    def is_automorphism(self):
        return True

    def apply(self, x):
        self._check_arg(x)
        return x

    def apply_inverse(self, x):
        return self.apply(x)


class ZeroEndo(Endomorphism):
    name = "zero"

    def __init__(self, spec: GroupSpec):
        self.domain = spec

    @property
    def is_automorphism(self):
        # only the trivial group
        return self.domain.is_finite and not self.domain.moduli

    def apply(self, x):
        self._check_arg(x)
        return self.domain.zero()

    def apply_inverse(self, x):
        if not self.is_automorphism:
            raise NotAutomorphism("zero map")
        return x


def _check_matrix(moduli, A):
    s = len(moduli)
    if len(A) != s or any(len(r) != s for r in A):
        raise GrexpandError(f"matrix must be {s}x{s}")
    for i, mi in enumerate(moduli):
        for j, mj in enumerate(moduli):
            a = int(A[i][j])
            if mj == 0:
                continue
            if mi == 0:
                if a != 0:
                    raise IllDefined(i, j, f"A[{i}][{j}] == 0 (torsion column into a Z row), got {a}")
            elif (mj * a) % mi:
                raise IllDefined(i, j, f"m_i | m_j*A_ij: {mi} | {mj}*{a} fails")


class MatrixEndo(Endomorphism):
    """``x -> A x`` with ``A`` well defined modulo the relations."""

    name = "matrix"

    def __init__(self, spec: GroupSpec, A, inverse=None):
        if not spec.is_finite:
            raise GrexpandError("matrix endomorphisms need a finite spec")
        _check_matrix(spec.moduli, A)
        self.domain = spec
        self.A = tuple(tuple((int(a) % m) if m else int(a) for a in row)
                       for row, m in zip(A, spec.moduli))
        self._given_inverse = inverse

    @property
    def matrix(self):
        return self.A

    def apply(self, x):
        self._check_arg(x)
        s = len(self.A)
        xs = x.coords
        out = []
        for i in range(s):
            row = self.A[i]
            acc = 0
            for j, v in xs:
                acc += row[j] * v
            if acc:
                out.append((i, acc))
        return Element(self.domain, out)

    @cached_property
    def inverse_matrix(self):
        """Matrix of the inverse map, or None when the map is not bijective."""
        spec = self.domain
        if self._given_inverse is not None:
            inv = MatrixEndo(spec, self._given_inverse)
            for j in range(len(spec.moduli)):
                e = spec.basis_vector(j)
                if inv.apply(self.apply(e)) != e or self.apply(inv.apply(e)) != e:
                    raise NotAutomorphism("supplied inverse does not invert the matrix")
            return inv.A
        if spec.has_free_part:
            return None
        if not preimage(FiniteSubgroup.trivial(spec), self).is_trivial():
            return None
        mods = list(spec.moduli)
        cols = []
        for j in range(len(mods)):
            unit = [0] * len(mods)
            unit[j] = 1
            x = lattice.solve(self.A, mods, unit)
            if x is None:
                return None
            cols.append(x)
        return tuple(tuple(cols[j][i] for j in range(len(mods))) for i in range(len(mods)))

    @property
    def is_automorphism(self):
        return self.inverse_matrix is not None

    def apply_inverse(self, x):
        if not self.is_automorphism:
            raise NotAutomorphism("matrix is not invertible on the group")
        return self.inverse().apply(x)

    def inverse(self):
        if not self.is_automorphism:
            raise NotAutomorphism("matrix is not invertible on the group")
        return MatrixEndo(self.domain, self.inverse_matrix, inverse=self.A)

    def describe(self):
        return {"kind": "matrix", "matrix": [list(r) for r in self.A]}


def matrix_endo(spec: GroupSpec, A) -> MatrixEndo:
    return MatrixEndo(spec, A)


class ShiftEndo(Endomorphism):
    """Forward shift ``value at k -> twist_k * value at k + offset``."""

    name = "shift"

    def __init__(self, spec: GroupSpec, twists: PeriodicPattern | None = None, offset: int = 1):
        if spec.is_finite:
            raise GrexpandError("shifts act on indexed families")
        if offset < 1:
            raise GrexpandError("shift offset must be positive")
        index = spec.pattern.index
        if twists is None:
            twists = PeriodicPattern.constant(1, index)
        if twists.index != index:
            raise GrexpandError("twist pattern and family use different index domains")
        self.domain = spec
        self.twists = twists
        self.offset = offset
        self._validate()

    def periodic_window(self):
        p, t = self.domain.pattern, self.twists
        left = math.lcm(len(p.left) or 1, len(t.left) or 1)
        right = math.lcm(len(p.right), len(t.right))
        a = min(p.lo, t.lo) - left - self.offset
        b = max(p.hi, t.hi) + right + self.offset
        if p.index == NATURALS:
            a = 0
        return a, b

    def _validate(self):
        spec = self.domain
        a, b = self.periodic_window()
        for k in range(a, b + 1):
            mk = spec.modulus_at(k)
            if mk == 0:
                continue
            c = self.twists(k)
            mt = spec.modulus_at(k + self.offset)
            if mt == 0:
                if c != 0:
                    raise IllDefinedTwist(k, f"c_k*m_k == 0 for a Z target: {c}*{mk} != 0")
            elif (c * mk) % mt:
                raise IllDefinedTwist(k, f"m_(k+{self.offset}) | c_k*m_k: {mt} | {c}*{mk} fails")

    def apply(self, x):
        self._check_arg(x)
        o = self.offset
        return Element(self.domain, [(k + o, self.twists(k) * v) for k, v in x.coords])

    @cached_property
    def is_automorphism(self):
        spec = self.domain
        if spec.pattern.index != INTEGERS:
            return False
        a, b = self.periodic_window()
        for k in range(a, b + 1):
            m, mt, c = spec.modulus_at(k), spec.modulus_at(k + self.offset), self.twists(k)
            if m != mt:
                return False
            if m == 0 and c not in (1, -1):
                return False
            if m and math.gcd(c, m) != 1:
                return False
        return True

    def _inverse_twist(self, k):
        m, c = self.domain.modulus_at(k), self.twists(k)
        return c if m == 0 else pow(c, -1, m)

    def apply_inverse(self, x):
        if not self.is_automorphism:
            raise NotAutomorphism("this shift is not bijective")
        self._check_arg(x)
        o = self.offset
        return Element(self.domain, [(k - o, self._inverse_twist(k - o) * v) for k, v in x.coords])

    def describe(self):
        return {"kind": "shift", "offset": self.offset, "twists": self.twists.to_dict()}


def shift_endo(spec: GroupSpec, twists: PeriodicPattern | None = None, offset: int = 1) -> ShiftEndo:
    return ShiftEndo(spec, twists, offset)


def bernoulli_shift(moduli, index: str) -> ShiftEndo:
    """Shift on the direct sum of copies of ``⊕ Z_{moduli}`` indexed by ``index``."""
    moduli = tuple(moduli)
    left = tuple(reversed(moduli)) if index == INTEGERS else ()
    spec = GroupSpec(pattern=PeriodicPattern(index, 0, (), moduli, left))
    return ShiftEndo(spec, offset=len(moduli))


def integer_tail_shift() -> ShiftEndo:
    """Shift on ``⊕_n G_n`` with ``G_n = Z`` for ``n < 0`` and ``Z_2`` otherwise.

    Coordinate ``-1`` crosses into ``Z_2`` through reduction mod 2.
    """
    spec = GroupSpec(pattern=PeriodicPattern(INTEGERS, 0, (), (2,), (0,)))
    return ShiftEndo(spec)


def copy_subgroup(shift: ShiftEndo, position: int = 0) -> FiniteSubgroup:
    """The copy of the alphabet sitting at ``position`` of a Bernoulli family."""
    spec, r = shift.domain, shift.offset
    return FiniteSubgroup.from_generators(
        spec, [spec.basis_vector(position * r + t) for t in range(r)
               if spec.modulus_at(position * r + t) != 0])


class InverseEndo(Endomorphism):
    name = "inverse"

    def __init__(self, f: Endomorphism):
        if not f.is_automorphism:
            raise NotAutomorphism(f"{f.name} is not an automorphism")
        self.domain = f.domain
        self.f = f

    @property
    def is_automorphism(self):
        return True

    def apply(self, x):
        return self.f.apply_inverse(x)

    def apply_inverse(self, x):
        return self.f.apply(x)

    def inverse(self):
        return self.f

    def periodic_window(self):
        return self.f.periodic_window()

    def describe(self):
        return {"kind": "inverse", "of": self.f.describe()}


class ComposeEndo(Endomorphism):
    """``f ∘ g``."""

    name = "compose"

    def __init__(self, f: Endomorphism, g: Endomorphism):
        if f.domain != g.domain:
            raise SpecMismatch("cannot compose endomorphisms of different groups")
        self.domain = f.domain
        self.f, self.g = f, g

    @property
    def is_automorphism(self):
        return self.f.is_automorphism and self.g.is_automorphism

    def apply(self, x):
        return self.f.apply(self.g.apply(x))

    def apply_inverse(self, x):
        return self.g.apply_inverse(self.f.apply_inverse(x))

    def periodic_window(self):
        a1, b1 = self.f.periodic_window()
        a2, b2 = self.g.periodic_window()
        return min(a1, a2), max(b1, b2)

    def describe(self):
        return {"kind": "compose", "outer": self.f.describe(), "inner": self.g.describe()}


def compose(f: Endomorphism, g: Endomorphism) -> Endomorphism:
    return ComposeEndo(f, g)


class PowerEndo(Endomorphism):
    name = "power"

    def __init__(self, f: Endomorphism, n: int):
        if n < 0:
            raise GrexpandError("use inverse() for negative powers")
        self.domain = f.domain
        self.f, self.n = f, n

    @property
    def is_automorphism(self):
        return self.n == 0 or self.f.is_automorphism

    def apply(self, x):
        self._check_arg(x)
        for _ in range(self.n):
            x = self.f.apply(x)
        return x

    def apply_inverse(self, x):
        for _ in range(self.n):
            x = self.f.apply_inverse(x)
        return x

    def periodic_window(self):
        a, b = self.f.periodic_window()
        return a, b

    def describe(self):
        return {"kind": "power", "n": self.n, "of": self.f.describe()}


def power(f: Endomorphism, n: int) -> Endomorphism:
    if n == 0:
        return IdentityEndo(f.domain)
    if n == 1:
        return f
    return PowerEndo(f, n)


# -- direct sums --------------------------------------------------------------

def _interleave_spec(s1: GroupSpec, s2: GroupSpec) -> GroupSpec:
    p1, p2 = s1.pattern, s2.pattern
    f = lambda k: p1(k // 2) if k % 2 == 0 else p2(k // 2)
    lo = 2 * min(p1.lo, p2.lo)
    hi = 2 * max(p1.hi, p2.hi) + 1
    right = 2 * math.lcm(len(p1.right), len(p2.right))
    left = 2 * math.lcm(len(p1.left) or 1, len(p2.left) or 1) if p1.index == INTEGERS else 0
    return GroupSpec(pattern=PeriodicPattern.from_function(f, p1.index, lo, hi, right, left))


class DirectSumEndo(Endomorphism):
    """``(f ⊕ g)(x, y) = (f x, g y)`` on a reindexed spec.

    finite ⊕ finite concatenates blocks; family ⊕ family interleaves even
    (left) and odd (right) indices; a finite block next to a naturals
    family occupies indices ``0..r-1`` and pushes the family up by ``r``.
    """

    name = "direct_sum"

    def __init__(self, f: Endomorphism, g: Endomorphism):
        self.f, self.g = f, g
        s1, s2 = f.domain, g.domain
        if s1.is_finite and s2.is_finite:
            r = len(s1.moduli)
            self.domain = GroupSpec.finite(s1.moduli + s2.moduli)
            self._to = (lambda k: k, lambda k: k + r)
            self._split = lambda k: (0, k) if k < r else (1, k - r)
        elif not s1.is_finite and not s2.is_finite:
            if s1.pattern.index != s2.pattern.index:
                raise ReindexClash("cannot interleave a naturals family with an integers family")
            self.domain = _interleave_spec(s1, s2)
            self._to = (lambda k: 2 * k, lambda k: 2 * k + 1)
            self._split = lambda k: (k % 2, k // 2)
        else:
            fin, fam = (s1, s2) if s1.is_finite else (s2, s1)
            if fam.pattern.index != NATURALS:
                raise ReindexClash("a finite block can only be prepended to a naturals family")
            r = len(fin.moduli)
            p = fam.pattern
            self.domain = GroupSpec(pattern=PeriodicPattern(
                NATURALS, 0, fin.moduli + p.core, p.right))
            fin_side = 0 if s1.is_finite else 1
            embed = [None, None]
            embed[fin_side] = lambda k: k
            embed[1 - fin_side] = lambda k: k + r
            self._to = tuple(embed)
            self._split = lambda k: (fin_side, k) if k < r else (1 - fin_side, k - r)

    def inject(self, side: int, x: Element) -> Element:
        part = (self.f, self.g)[side].domain
        if x.spec != part:
            raise SpecMismatch("element does not belong to that summand")
        to = self._to[side]
        return Element(self.domain, [(to(k), v) for k, v in x.coords])

    def split(self, z: Element) -> tuple[Element, Element]:
        parts = ([], [])
        for k, v in z.coords:
            side, j = self._split(k)
            parts[side].append((j, v))
        return Element(self.f.domain, parts[0]), Element(self.g.domain, parts[1])

    @property
    def is_automorphism(self):
        return self.f.is_automorphism and self.g.is_automorphism

    def apply(self, z):
        self._check_arg(z)
        x, y = self.split(z)
        return self.inject(0, self.f.apply(x)) + self.inject(1, self.g.apply(y))

    def apply_inverse(self, z):
        x, y = self.split(z)
        return self.inject(0, self.f.apply_inverse(x)) + self.inject(1, self.g.apply_inverse(y))

    def sum_subgroup(self, h: FiniteSubgroup, k: FiniteSubgroup) -> FiniteSubgroup:
        """``h ⊕ k`` inside the reindexed spec."""
        gens = [self.inject(0, x) for x in h.generators()] + [self.inject(1, y) for y in k.generators()]
        return FiniteSubgroup.from_generators(self.domain, gens)

    def periodic_window(self):
        a, b = self.domain.window()
        return a - 2, b + 2

    def describe(self):
        return {"kind": "direct_sum", "parts": [self.f.describe(), self.g.describe()]}


def direct_sum_endo(f: Endomorphism, g: Endomorphism) -> DirectSumEndo:
    return DirectSumEndo(f, g)


# -- quotients ----------------------------------------------------------------

class QuotientProjection(Hom):
    """Canonical projection ``G -> G/H`` in invariant-factor coordinates."""

    def __init__(self, spec: GroupSpec, h: FiniteSubgroup):
        self.domain = spec
        self.subgroup = h
        rows = h.rows_on(tuple(range(len(spec.moduli))))
        moduli, kept, V, Vinv = lattice.quotient_data(spec, rows)
        self.codomain = GroupSpec.finite(moduli)
        self._kept, self._V, self._Vinv = kept, V, Vinv

    def apply(self, x):
        self._check_arg(x)
        xs = x.dense()
        s = len(xs)
        img = [sum(xs[i] * self._V[i][c] for i in range(s)) for c in self._kept]
        return self.codomain.vector(img)

    def lift(self, y: Element) -> Element:
        """A preimage of ``y`` (a section of the projection, not a homomorphism)."""
        s = len(self.domain.moduli)
        full = [0] * s
        for t, c in enumerate(self._kept):
            full[c] = y.dense()[t]
        vec = [sum(full[r] * self._Vinv[r][i] for r in range(s)) for i in range(s)]
        return self.domain.vector(vec)


def quotient_endo(phi: Endomorphism, h: FiniteSubgroup, samples: int = 64, seed: int = 0):
    """Induced map on ``G/H`` and the projection; requires ``phi(H) ⊆ H``."""
    spec = phi.domain
    if not spec.is_finite:
        raise GrexpandError("quotients are computed for finite specs only")
    if not image(h, phi).leq(h):
        raise NotInvariant("phi(H) is not contained in H")
    pi = QuotientProjection(spec, h)
    q = pi.codomain
    cols = [pi.apply(phi.apply(pi.lift(q.basis_vector(j)))).dense() for j in range(len(q.moduli))]
    tilde = MatrixEndo(q, [[cols[j][i] for j in range(len(q.moduli))] for i in range(len(q.moduli))])
    for x in _samples(spec, samples, seed):
        if pi.apply(phi.apply(x)) != tilde.apply(pi.apply(x)):
            raise GrexpandError(f"projection does not intertwine at {x}")
    return tilde, pi


def _samples(spec: GroupSpec, count: int, seed: int):
    if spec.is_finite and not spec.has_free_part and spec.order <= count:
        return enumerate_group(spec)
    rng = random.Random(seed)
    return [random_element(spec, rng) for _ in range(count)]


def random_element(spec: GroupSpec, rng: random.Random, lo: int | None = None,
                   hi: int | None = None, free_range: int = 20) -> Element:
    """Random element supported in ``[lo, hi]`` (default: the spec's window)."""
    a, b = spec.window()
    lo = a if lo is None else lo
    hi = b if hi is None else hi
    coords = []
    for k in spec.indices(lo, hi):
        m = spec.modulus_at(k)
        coords.append((k, rng.randrange(m) if m else rng.randint(-free_range, free_range)))
    return Element(spec, coords)


# -- divisor patterns and restriction ----------------------------------------

class DivisorPatternSubgroup:
    """The invariant-candidate subgroup ``⊕_k d_k Z_{m_k}`` of a family."""

    def __init__(self, spec: GroupSpec, divisors: PeriodicPattern):
        if spec.is_finite:
            raise GrexpandError("divisor patterns live on family specs")
        if divisors.index != spec.pattern.index:
            raise GrexpandError("divisor pattern and family use different index domains")
        self.spec = spec
        self.divisors = divisors
        a, b = self.window()
        for k in spec.indices(a, b):
            m, d = spec.modulus_at(k), divisors(k)
            if d < 0 or (m and (d == 0 or m % d)):
                raise GrexpandError(f"divisor {d} does not divide modulus {m} at index {k}")

    def window(self):
        a1, b1 = self.spec.window()
        a2, b2 = self.divisors.window()
        p, q = self.spec.pattern, self.divisors
        return (min(a1, a2) - math.lcm(len(p.left) or 1, len(q.left) or 1),
                max(b1, b2) + math.lcm(len(p.right), len(q.right)))

    def contains(self, x: Element) -> bool:
        for k, v in x.coords:
            d = self.divisors(k)
            if d == 0 or v % d:
                return False
        return True

    def kept(self, k: int) -> bool:
        m, d = self.spec.modulus_at(k), self.divisors(k)
        return (m == 0 and d > 0) or (m > 0 and m // d > 1)

    def rescaled_modulus(self, k: int) -> int:
        m = self.spec.modulus_at(k)
        return m // self.divisors(k) if m else 0

    def window_subgroup(self, lo: int, hi: int) -> FiniteSubgroup:
        spec = self.spec
        return FiniteSubgroup.from_generators(
            spec, [spec.basis_vector(k, self.divisors(k)) for k in spec.torsion_indices(lo, hi)])

    def describe(self):
        return {"divisors": self.divisors.to_dict()}


def pattern_invariance_witness(phi: Endomorphism, pattern: DivisorPatternSubgroup, window=None):
    """First index ``k`` in the window with ``phi(d_k e_k)`` outside the pattern, else None."""
    a, b = window or _joint_window(phi, pattern)
    spec = phi.domain
    for k in spec.indices(a, b):
        d = pattern.divisors(k)
        if d == 0:
            continue
        if not pattern.contains(phi.apply(spec.basis_vector(k, d))):
            return k
    return None


def _joint_window(phi, pattern):
    a1, b1 = phi.periodic_window()
    a2, b2 = pattern.window()
    return min(a1, a2), max(b1, b2)


class RestrictionEndo(Endomorphism):
    """``phi`` restricted to a divisor-pattern subgroup, in rescaled coordinates.

    Coordinate ``j`` of the new spec is ``Z_{m_k/d_k}`` for the ``j``-th kept
    index ``k``; the embedding ``y -> d * y`` conjugates this map to
    ``phi`` on the subgroup. Trivial coordinates (``d_k = m_k``) are dropped.
    """

    name = "restriction"

    def __init__(self, phi: Endomorphism, pattern: DivisorPatternSubgroup):
        if phi.domain != pattern.spec:
            raise SpecMismatch("pattern and endomorphism live in different groups")
        self.check_window = _joint_window(phi, pattern)
        k = pattern_invariance_witness(phi, pattern, self.check_window)
        if k is not None:
            raise NotInvariant(f"phi(d_k e_k) leaves the pattern at index {k}", witness=k)
        self.phi = phi
        self.pattern = pattern
        sp, dp = phi.domain.pattern, pattern.divisors
        self.reindex = IndexSubset(
            phi.domain, pattern.kept, core=(min(sp.lo, dp.lo), max(sp.hi, dp.hi)),
            periods=(math.lcm(len(sp.right), len(dp.right)), math.lcm(len(sp.left) or 1, len(dp.left) or 1)))
        self.domain = self.reindex.sub_spec(pattern.rescaled_modulus)

    def embed(self, y: Element) -> Element:
        """Rescaled coordinates -> the subgroup inside the original group."""
        r, d = self.reindex, self.pattern.divisors
        return Element(self.phi.domain, [(r.from_sub(j), d(r.from_sub(j)) * v) for j, v in y.coords])

    def pull(self, x: Element) -> Element:
        """Inverse of :meth:`embed` on elements of the subgroup."""
        r, d = self.reindex, self.pattern.divisors
        out = []
        for k, v in x.coords:
            dk = d(k)
            if dk == 0 or v % dk:
                raise NotInvariant(f"{x} is not in the pattern subgroup", witness=k)
            if self.pattern.kept(k):
                out.append((r.to_sub(k), v // dk))
        return Element(self.domain, out)

    def apply(self, y):
        self._check_arg(y)
        return self.pull(self.phi.apply(self.embed(y)))

    @cached_property
    def is_automorphism(self):
        if not self.phi.is_automorphism:
            return False
        return pattern_invariance_witness(InverseEndo(self.phi), self.pattern, self.check_window) is None

    def apply_inverse(self, y):
        if not self.is_automorphism:
            raise NotAutomorphism("restriction is not onto the pattern subgroup")
        return self.pull(self.phi.apply_inverse(self.embed(y)))

    def pull_subgroup(self, h: FiniteSubgroup) -> FiniteSubgroup:
        return FiniteSubgroup.from_generators(self.domain, [self.pull(g) for g in h.generators()])

    def periodic_window(self):
        a, b = self.domain.window()
        return a - 2, b + 2

    def describe(self):
        return {"kind": "restriction", "of": self.phi.describe(), "pattern": self.pattern.describe()}


def restriction_endo(phi: Endomorphism, pattern: DivisorPatternSubgroup) -> RestrictionEndo:
    return RestrictionEndo(phi, pattern)


# -- the Bernoulli semiconjugacy ------------------------------------------------

class BernoulliSemiconjugacy(Hom):
    """``(s_k) -> sum_k phi^k s_k`` from the Bernoulli family over ``S``.

    ``S ≅ ⊕ Z_{e_t}`` is fixed through its invariant-factor generators, so
    position ``k`` of the family carries one copy of each ``Z_{e_t}``.
    """

    def __init__(self, phi: Endomorphism, s: FiniteSubgroup, index: str = NATURALS):
        if index == INTEGERS and not phi.is_automorphism:
            raise NotAutomorphism("the two-sided map needs an automorphism")
        factors, gens = lattice.invariant_decomposition(s)
        if not factors:
            raise GrexpandError("the trivial subgroup has no Bernoulli cover")
        self.phi = phi
        self.subgroup = s
        self.factors = factors
        self.generators = gens
        self.shift = bernoulli_shift(factors, index)
        self.domain = self.shift.domain
        self.codomain = phi.domain
        self._cache = {0: list(gens)}

    def _images(self, k: int) -> list[Element]:
        if k not in self._cache:
            step = 1 if k > 0 else -1
            prev = self._images(k - step)
            f = self.phi.apply if k > 0 else self.phi.apply_inverse
            self._cache[k] = [f(g) for g in prev]
        return self._cache[k]

    def apply(self, x):
        self._check_arg(x)
        r = len(self.factors)
        out = self.codomain.zero()
        for idx, v in x.coords:
            k, t = divmod(idx, r)
            out = out + v * self._images(k)[t]
        return out


def semiconjugacy_q(phi: Endomorphism, s: FiniteSubgroup, index: str = NATURALS) -> BernoulliSemiconjugacy:
    return BernoulliSemiconjugacy(phi, s, index)


@dataclass(frozen=True)
class IntertwiningReport:
    holds: bool
    checked: int
    witness: Element | None = None


def check_intertwining(pi: Hom, phi: Endomorphism, psi: Endomorphism, samples) -> IntertwiningReport:
    """``pi ∘ phi == psi ∘ pi`` on the given sample elements."""
    n = 0
    for x in samples:
        n += 1
        if pi.apply(phi.apply(x)) != psi.apply(pi.apply(x)):
            return IntertwiningReport(False, n, x)
    return IntertwiningReport(True, n)
