from __future__ import annotations

import math

import pytest

from grexpand.errors import GrexpandError, OutsideDomain, SpecMismatch
from grexpand.groups import (INFINITE, INTEGERS, NATURALS, Element, GroupSpec, PeriodicPattern,
                             element_arith, element_order, is_torsion, modulus_at, torsion_part)


def test_finite_spec_basics():
    g = GroupSpec.finite([4, 6])
    assert g.order == 24
    assert g.exponent == 12
    assert modulus_at(g, 1) == 6
    with pytest.raises(OutsideDomain):
        g.modulus_at(2)


def test_modulus_one_rejected():
    with pytest.raises(GrexpandError):
        GroupSpec.finite([1, 2])


def test_free_coordinate_has_infinite_order():
    g = GroupSpec.finite([0, 2])
    assert g.has_free_part
    assert g.order == INFINITE
    x = g.vector([3, 1])
    assert element_order(x) == INFINITE
    assert not is_torsion(x)
    assert is_torsion(g.vector([0, 1]))


def test_periodic_extension_unilateral():
    g = GroupSpec.family(NATURALS, core=(4,), right=(2, 3))
    assert [g.modulus_at(k) for k in range(6)] == [4, 2, 3, 2, 3, 2]
    with pytest.raises(OutsideDomain):
        g.modulus_at(-1)


def test_periodic_extension_bilateral():
    p = PeriodicPattern(INTEGERS, 0, (5,), (2,), (3, 4))
    g = GroupSpec(pattern=p)
    assert [g.modulus_at(k) for k in range(-4, 3)] == [4, 3, 4, 3, 5, 2, 2]


def test_pattern_equality_ignores_presentation():
    a = PeriodicPattern(NATURALS, 0, (2, 2), (2,))
    b = PeriodicPattern.constant(2, NATURALS)
    assert a == b and hash(a) == hash(b)


def test_element_arithmetic_reduces():
    g = GroupSpec.finite([4, 6])
    x, y = g.vector([3, 5]), g.vector([2, 4])
    assert (x + y).dense() == [1, 3]
    assert element_arith("negate", x).dense() == [1, 1]
    assert element_arith("scale", x, c=2).dense() == [2, 4]
    assert element_order(x) == math.lcm(4, 6)
    assert not g.zero()


def test_element_rejects_foreign_spec():
    with pytest.raises(SpecMismatch):
        GroupSpec.finite([2]).vector([1]) + GroupSpec.finite([3]).vector([1])


def test_element_outside_naturals_domain():
    g = GroupSpec.family(NATURALS)
    with pytest.raises(OutsideDomain):
        Element(g, {-1: 1})


def test_family_element_order_mixed_moduli():
    g = GroupSpec.family(INTEGERS, right=(4,), left=(6,))
    x = Element(g, {-3: 1, 5: 2})
    assert x.order() == 6


def test_torsion_part_of_integer_tail():
    g = GroupSpec(pattern=PeriodicPattern(INTEGERS, 0, (), (2,), (0,)))
    t = torsion_part(g)
    assert t.spec.index_kind == NATURALS
    x = Element(g, {0: 1, 3: 1})
    assert t.from_sub(t.to_sub(x)) == x
    assert not t.contains(Element(g, {-2: 1}))


def test_torsion_part_finite():
    t = torsion_part(GroupSpec.finite([0, 4, 0, 2]))
    assert t.spec.moduli == (4, 2)


def test_indices_clip_to_domain():
    g = GroupSpec.family(NATURALS)
    assert list(g.indices(-3, 2)) == [0, 1, 2]
    assert list(GroupSpec.finite([2, 2]).indices(-1, 5)) == [0, 1]
