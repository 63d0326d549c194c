from __future__ import annotations

import random

import pytest

from grexpand import oracles
from grexpand.corpus import (groups_up_to, random_automorphism, random_endomorphism, random_group,
                             random_subgroup)
from grexpand.duality import (annihilator, annihilator_enumerated, coannihilator, dual_endo,
                              dual_group, duality_expansivity_check, pairing, verify_identities)
from grexpand.dynamics import TWO_SIDED
from grexpand.endo import MatrixEndo, bernoulli_shift
from grexpand.errors import NonCompactDual
from grexpand.groups import NATURALS, GroupSpec
from grexpand.subgroup import FiniteSubgroup, all_subgroups, enumerate_group, enumerate_subgroup


def _set(h):
    return frozenset(tuple(x.dense()) for x in enumerate_subgroup(h))


def test_pairing_values():
    g = GroupSpec.finite([2, 4])
    x, a = g.vector([1, 1]), g.vector([1, 3])
    v = pairing(x, a)
    # E = 4: 2*1*1 + 1*1*3 = 5 = 1 mod 4
    assert v.exponent == 4 and int(v) == 1
    assert int(pairing(a, x)) == int(v)


def test_pairing_is_perfect():
    for spec in groups_up_to(16, include_trivial=False):
        elems = enumerate_group(spec)
        for a in elems:
            if a:
                assert any(pairing(x, a) for x in elems)


def test_annihilator_matches_set_oracle(backend):
    rng = random.Random(21)
    for _ in range(60):
        spec = random_group(rng, 64)
        H = random_subgroup(spec, rng)
        assert _set(annihilator(H)) == oracles.annihilator_set(spec.moduli, _set(H))
    spec = GroupSpec.finite([2, 6])
    for H in all_subgroups(spec):
        assert annihilator(H) == annihilator_enumerated(H)


def test_dual_endo_is_adjoint():
    rng = random.Random(22)
    for _ in range(40):
        spec = random_group(rng, 48)
        phi = random_endomorphism(spec, rng)
        psi = dual_endo(phi)
        elems = enumerate_group(spec)
        for x in elems[:12]:
            for a in elems[:12]:
                assert int(pairing(phi.apply(x), a)) == int(pairing(x, psi.apply(a)))


def test_identities_exhaustive_small():
    for spec in groups_up_to(12, include_trivial=False):
        subs = all_subgroups(spec)
        rep = verify_identities(spec, MatrixEndo(spec, [[int(i == j) for j in range(len(spec.moduli))]
                                                        for i in range(len(spec.moduli))]), subs)
        assert rep.holds, rep.to_json()


def test_double_annihilator_and_orders():
    rng = random.Random(23)
    for _ in range(40):
        spec = random_group(rng, 64)
        H = random_subgroup(spec, rng)
        assert coannihilator(annihilator(H)) == H
        assert H.order * annihilator(H).order == spec.order


def test_infinite_groups_have_no_finite_dual():
    with pytest.raises(NonCompactDual):
        dual_group(GroupSpec.finite([0, 2]))
    with pytest.raises(NonCompactDual):
        annihilator(FiniteSubgroup.trivial(bernoulli_shift((2,), NATURALS).domain))


def test_dual_chain_equivalence_random():
    rng = random.Random(24)
    for _ in range(60):
        spec = random_group(rng, 64)
        phi = random_endomorphism(spec, rng)
        S = random_subgroup(spec, rng)
        rep = duality_expansivity_check(phi, S)
        assert rep.holds, rep.to_json()
        assert rep.D_orders[-1] * rep.T_orders[-1] == spec.order


def test_dual_chain_two_sided():
    rng = random.Random(25)
    for _ in range(30):
        spec = random_group(rng, 64)
        phi = random_automorphism(spec, rng)
        rep = duality_expansivity_check(phi, random_subgroup(spec, rng), TWO_SIDED)
        assert rep.holds


def test_dual_chain_detects_nongenerator():
    spec = GroupSpec.finite([2, 2])
    phi = MatrixEndo(spec, [[1, 0], [0, 1]])
    S = FiniteSubgroup.from_generators(spec, [spec.vector([1, 0])])
    rep = duality_expansivity_check(phi, S)
    assert rep.holds and not rep.T_full and not rep.D_trivial
