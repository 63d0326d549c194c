from __future__ import annotations

import random

import pytest

from grexpand import oracles
from grexpand.corpus import random_automorphism, random_endomorphism, random_group, random_subgroup
from grexpand.endo import (ComposeEndo, DirectSumEndo, DivisorPatternSubgroup, IdentityEndo,
                           MatrixEndo, RestrictionEndo, ShiftEndo, ZeroEndo, bernoulli_shift,
                           check_intertwining, copy_subgroup, integer_tail_shift, power,
                           quotient_endo, random_element, semiconjugacy_q)
from grexpand.errors import (GrexpandError, IllDefined, IllDefinedTwist, NotAutomorphism,
                             NotInvariant, ReindexClash)
from grexpand.groups import INTEGERS, NATURALS, Element, GroupSpec, PeriodicPattern
from grexpand.subgroup import FiniteSubgroup, enumerate_group, image


def test_ill_defined_entry_names_condition():
    g = GroupSpec.finite([4, 2])
    with pytest.raises(IllDefined) as err:
        MatrixEndo(g, [[1, 1], [0, 1]])
    assert err.value.condition == "m_i | m_j*A_ij: 4 | 2*1 fails"
    assert "4 | 2*1" in str(err.value)
    MatrixEndo(g, [[1, 2], [0, 1]])


def test_free_row_rejects_torsion_column():
    g = GroupSpec.finite([0, 2])
    with pytest.raises(IllDefined):
        MatrixEndo(g, [[1, 1], [0, 1]])


def test_matrix_apply_matches_oracle():
    rng = random.Random(1)
    for _ in range(40):
        spec = random_group(rng, 48)
        phi = random_endomorphism(spec, rng)
        for x in enumerate_group(spec)[:20]:
            assert tuple(phi.apply(x).dense()) == oracles.apply_matrix(spec.moduli, phi.A, tuple(x.dense()))


def test_matrix_inverse():
    rng = random.Random(2)
    for _ in range(30):
        spec = random_group(rng, 48)
        phi = random_automorphism(spec, rng)
        inv = phi.inverse()
        for x in enumerate_group(spec):
            assert inv.apply(phi.apply(x)) == x and phi.apply_inverse(phi.apply(x)) == x


def test_non_injective_matrix_is_not_automorphism():
    g = GroupSpec.finite([4])
    phi = MatrixEndo(g, [[2]])
    assert not phi.is_automorphism
    with pytest.raises(NotAutomorphism):
        phi.inverse()


def test_identity_and_zero():
    g = GroupSpec.finite([6])
    x = g.vector([5])
    assert IdentityEndo(g).apply(x) == x and IdentityEndo(g).is_automorphism
    assert not ZeroEndo(g).apply(x) and not ZeroEndo(g).is_automorphism


def test_shift_twist_must_respect_moduli():
    spec = GroupSpec.family(NATURALS, core=(2,), right=(4,))
    with pytest.raises(IllDefinedTwist) as err:
        ShiftEndo(spec)
    assert "4 | 1*2 fails" in err.value.condition
    ShiftEndo(spec, PeriodicPattern(NATURALS, 0, (2,), (1,)))


def test_bernoulli_shifts():
    uni = bernoulli_shift((2, 3), NATURALS)
    assert uni.offset == 2 and not uni.is_automorphism
    bi = bernoulli_shift((2,), INTEGERS)
    assert bi.is_automorphism
    x = Element(bi.domain, {-3: 1, 4: 1})
    assert bi.apply(x) == Element(bi.domain, {-2: 1, 5: 1})
    assert bi.apply_inverse(bi.apply(x)) == x


def test_integer_tail_shift_reduces_at_seam():
    ex = integer_tail_shift()
    spec = ex.domain
    assert spec.modulus_at(-1) == 0 and spec.modulus_at(0) == 2
    y = ex.apply(Element(spec, {-1: 3}))
    assert y == Element(spec, {0: 1})
    assert not ex.is_automorphism


def test_power_and_compose():
    bi = bernoulli_shift((2,), INTEGERS)
    sq = power(bi, 2)
    e0 = bi.domain.basis_vector(0)
    assert sq.apply(e0) == bi.domain.basis_vector(2)
    assert ComposeEndo(bi, bi).apply(e0) == sq.apply(e0)
    assert power(bi, 0).apply(e0) == e0
    assert power(bi, 1) is bi
    assert sq.apply_inverse(sq.apply(e0)) == e0


def test_direct_sum_finite_blocks():
    f = MatrixEndo(GroupSpec.finite([2]), [[1]])
    g = MatrixEndo(GroupSpec.finite([3, 3]), [[0, 1], [1, 0]])
    d = DirectSumEndo(f, g)
    assert d.domain.moduli == (2, 3, 3)
    z = d.domain.vector([1, 1, 2])
    assert d.apply(z).dense() == [1, 2, 1]
    x, y = d.split(z)
    assert d.inject(0, x) + d.inject(1, y) == z


def test_direct_sum_interleaves_families():
    d = DirectSumEndo(bernoulli_shift((2,), NATURALS), bernoulli_shift((3,), NATURALS))
    assert [d.domain.modulus_at(k) for k in range(4)] == [2, 3, 2, 3]
    assert d.apply(d.domain.basis_vector(1)) == d.domain.basis_vector(3)


def test_direct_sum_finite_before_naturals():
    d = DirectSumEndo(MatrixEndo(GroupSpec.finite([5]), [[2]]), bernoulli_shift((2,), NATURALS))
    assert [d.domain.modulus_at(k) for k in range(3)] == [5, 2, 2]
    assert d.apply(d.domain.basis_vector(0)) == d.domain.basis_vector(0, 2)
    assert d.apply(d.domain.basis_vector(1)) == d.domain.basis_vector(2)


def test_direct_sum_reindex_clash():
    with pytest.raises(ReindexClash):
        DirectSumEndo(MatrixEndo(GroupSpec.finite([2]), [[1]]), bernoulli_shift((2,), INTEGERS))
    with pytest.raises(ReindexClash):
        DirectSumEndo(bernoulli_shift((2,), NATURALS), bernoulli_shift((2,), INTEGERS))


def test_quotient_endo_intertwines():
    rng = random.Random(3)
    for _ in range(30):
        spec = random_group(rng, 48)
        phi = random_endomorphism(spec, rng)
        H = random_subgroup(spec, rng)
        for _ in range(8):
            H = H + image(H, phi)
        tilde, pi = quotient_endo(phi, H)
        assert tilde.domain.order * H.order == spec.order
        for x in enumerate_group(spec)[:30]:
            assert pi.apply(phi.apply(x)) == tilde.apply(pi.apply(x))
            assert pi.apply(pi.lift(pi.apply(x))) == pi.apply(x)


def test_quotient_needs_invariance():
    g = GroupSpec.finite([2, 2])
    phi = MatrixEndo(g, [[0, 1], [1, 0]])
    with pytest.raises(NotInvariant):
        quotient_endo(phi, FiniteSubgroup.from_generators(g, [g.vector([1, 0])]))


def test_divisor_pattern_validation():
    spec = bernoulli_shift((8,), NATURALS).domain
    DivisorPatternSubgroup(spec, PeriodicPattern.constant(4, NATURALS))
    with pytest.raises(GrexpandError):
        DivisorPatternSubgroup(spec, PeriodicPattern.constant(3, NATURALS))


def test_restriction_rescales_coordinates():
    phi = bernoulli_shift((8,), NATURALS)
    D = DivisorPatternSubgroup(phi.domain, PeriodicPattern(NATURALS, 0, (4, 2), (1,)))
    r = RestrictionEndo(phi, D)
    assert [r.domain.modulus_at(j) for j in range(4)] == [2, 4, 8, 8]
    y = r.domain.basis_vector(0)
    assert r.embed(y) == phi.domain.basis_vector(0, 4)
    assert r.apply(y) == r.pull(phi.domain.basis_vector(1, 4)) == r.domain.basis_vector(1, 2)


def test_restriction_rejects_non_invariant_pattern():
    phi = bernoulli_shift((8,), NATURALS)
    D = DivisorPatternSubgroup(phi.domain, PeriodicPattern(NATURALS, 0, (1, 2), (4,)))
    with pytest.raises(NotInvariant) as err:
        RestrictionEndo(phi, D)
    assert err.value.witness == 0


def test_restriction_of_bilateral_is_automorphism():
    phi = bernoulli_shift((6,), INTEGERS)
    r = RestrictionEndo(phi, DivisorPatternSubgroup(phi.domain, PeriodicPattern.constant(2)))
    assert r.domain.modulus_at(5) == 3 and r.is_automorphism


def test_semiconjugacy_intertwines():
    rng = random.Random(4)
    bi = bernoulli_shift((2,), INTEGERS)
    q = semiconjugacy_q(bi, copy_subgroup(bi), INTEGERS)
    samples = [random_element(q.domain, rng, -5, 5) for _ in range(50)]
    assert check_intertwining(q, q.shift, bi, samples).holds
    spec = GroupSpec.finite([2, 4])
    phi = MatrixEndo(spec, [[1, 1], [2, 1]])
    S = FiniteSubgroup.from_generators(spec, [spec.vector([1, 1])])
    q = semiconjugacy_q(phi, S)
    samples = [random_element(q.domain, rng, 0, 6) for _ in range(50)]
    assert check_intertwining(q, q.shift, phi, samples).holds


def test_intertwining_failure_reports_witness():
    spec = GroupSpec.finite([3])
    a, b = MatrixEndo(spec, [[1]]), MatrixEndo(spec, [[2]])
    rep = check_intertwining(IdentityEndo(spec), a, b, enumerate_group(spec))
    assert not rep.holds and rep.witness is not None


@pytest.mark.parametrize("index,core,right,left", [
    (NATURALS, (4, 2), (1,), ()),
    (NATURALS, (), (4,), ()),
    (NATURALS, (8, 4, 4, 2), (2,), ()),
    (INTEGERS, (2,), (1,), (4,)),
])
def test_restriction_conjugates_to_phi(index, core, right, left):
    rng = random.Random(5)
    phi = bernoulli_shift((8,), index)
    D = DivisorPatternSubgroup(phi.domain, PeriodicPattern(index, 0, core, right, left))
    try:
        r = RestrictionEndo(phi, D)
    except NotInvariant:
        pytest.skip("pattern not invariant")
    for k in range(-6 if index == INTEGERS else 0, 12):
        assert r.domain.modulus_at(r.reindex.to_sub(k)) == 8 // D.divisors(k) or not D.kept(k)
    for _ in range(40):
        y = random_element(r.domain, rng, -5, 5)
        assert r.embed(r.apply(y)) == phi.apply(r.embed(y))
        assert r.pull(r.embed(y)) == y
