from __future__ import annotations

import math
import random

import pytest

from grexpand import oracles
from grexpand.corpus import random_automorphism, random_endomorphism, random_group, random_subgroup
from grexpand.dynamics import (FORWARD, STATS, TWO_SIDED, TrajectoryTable, absorbing_witness,
                               certify, certify_positively_expansive_finite, check_generator_family,
                               combine_sum_generators, conjecture_harness, entropy_report,
                               entropy_with_generator, epi_audit, extension_generator,
                               factor_transport, monotonicity_check, power_generator, stabilize,
                               trajectory_shift_check, trajectory_sum, trajectory_table)
from grexpand.endo import (DirectSumEndo, DivisorPatternSubgroup, MatrixEndo, bernoulli_shift,
                           copy_subgroup, integer_tail_shift, power, quotient_endo, semiconjugacy_q)
from grexpand.errors import (GrexpandError, InvalidCertificate, InvariantViolation, NotAutomorphism,
                             NotEpimorphism, NotGenerator)
from grexpand.groups import INTEGERS, NATURALS, GroupSpec, PeriodicPattern
from grexpand.subgroup import FiniteSubgroup, enumerate_subgroup, full_subgroup, image


def _set(h):
    return frozenset(tuple(x.dense()) for x in enumerate_subgroup(h))


# -- trajectories ------------------------------------------------------------------

def test_finite_trajectory_matches_set_oracle(backend):
    rng = random.Random(11)
    for _ in range(80):
        spec = random_group(rng, 48)
        phi = random_endomorphism(spec, rng)
        F = random_subgroup(spec, rng)
        orders, n_star, final = oracles.forward_closure(spec.moduli, phi.A, _set(F))
        table = trajectory_table(phi, F, 40)
        assert table.stabilized_at == n_star
        assert list(table.orders[:n_star]) == orders[:n_star]
        assert _set(table.subgroup(n_star)) == final


def test_two_sided_trajectory_matches_oracle():
    rng = random.Random(12)
    for _ in range(40):
        spec = random_group(rng, 48)
        phi = random_automorphism(spec, rng)
        F = random_subgroup(spec, rng)
        inv = phi.inverse().A
        orders, n_star, final = oracles.forward_closure(spec.moduli, phi.A, _set(F), inv)
        table = trajectory_table(phi, F, 40, TWO_SIDED)
        assert table.stabilized_at == n_star and _set(table.final) == final


def test_two_sided_needs_automorphism():
    spec = GroupSpec.finite([4])
    with pytest.raises(NotAutomorphism):
        trajectory_table(MatrixEndo(spec, [[2]]), full_subgroup(spec), 4, TWO_SIDED)


def test_family_trajectory_is_copy_window():
    phi = bernoulli_shift((3,), NATURALS)
    T = trajectory_sum(phi, copy_subgroup(phi), 4)
    assert T == full_subgroup(phi.domain, 0, 3)
    bi = bernoulli_shift((2,), INTEGERS)
    assert trajectory_sum(bi, copy_subgroup(bi), 3, TWO_SIDED) == full_subgroup(bi.domain, -2, 2)


def test_invariant_checks_flag_bad_tables():
    spec = GroupSpec.finite([4])
    big, small = full_subgroup(spec), FiniteSubgroup.from_generators(spec, [spec.vector([2])])
    with pytest.raises(InvariantViolation, match="monotonicity"):
        TrajectoryTable(spec, FORWARD, subgroups=[big, small]).check_invariants()
    with pytest.raises(InvariantViolation, match="absorption"):
        TrajectoryTable(spec, TWO_SIDED, subgroups=[small, small, big]).check_invariants()
    trivial = FiniteSubgroup.trivial(spec)
    with pytest.raises(InvariantViolation, match="subadditivity"):
        TrajectoryTable(spec, FORWARD, subgroups=[trivial, small]).check_invariants()


def test_stats_counter_advances():
    before = STATS["tables_checked"]
    phi = bernoulli_shift((2,), NATURALS)
    entropy_report(phi, copy_subgroup(phi), 6)
    assert STATS["tables_checked"] > before


def test_stabilize():
    spec = GroupSpec.finite([2, 2])
    phi = MatrixEndo(spec, [[0, 0], [1, 0]])
    F = FiniteSubgroup.from_generators(spec, [spec.vector([1, 0])])
    st = stabilize(phi, F)
    assert st.stabilized and st.n_star == 2 and st.subgroup.order == 4
    shift = bernoulli_shift((2,), NATURALS)
    assert not stabilize(shift, copy_subgroup(shift), n_cap=5).stabilized


# -- certificates ----------------------------------------------------------------

def test_finite_certificate_matches_oracle():
    rng = random.Random(13)
    for _ in range(80):
        spec = random_group(rng, 32)
        phi = random_endomorphism(spec, rng)
        S = random_subgroup(spec, rng)
        _, n_star, final = oracles.forward_closure(spec.moduli, phi.A, _set(S))
        cert = certify_positively_expansive_finite(phi, S)
        assert cert.positive == (len(final) == spec.order)
        assert cert.n_star == n_star


def test_bilateral_copy_generates_two_sided_only():
    bi = bernoulli_shift((2,), INTEGERS)
    S0 = copy_subgroup(bi)
    two = check_generator_family(bi, S0, 8, 64, TWO_SIDED)
    assert two.positive and dict(two.coverage)[-8] == 9
    fwd = check_generator_family(bi, S0, 8, 64, FORWARD)
    assert not fwd.positive and fwd.failures[0] == -1


def test_square_needs_two_copies():
    bi = bernoulli_shift((2,), INTEGERS)
    S0 = copy_subgroup(bi)
    sq = power(bi, 2)
    assert 1 in check_generator_family(sq, S0, 6, side=TWO_SIDED).failures
    assert check_generator_family(sq, S0 + image(S0, bi), 6, side=TWO_SIDED).positive


def test_family_with_free_part_checks_torsion_coordinates():
    ex = integer_tail_shift()
    S = FiniteSubgroup.from_generators(ex.domain, [ex.domain.basis_vector(0)])
    cert = check_generator_family(ex, S, 6)
    assert cert.positive and all(j >= 0 for j, _ in cert.coverage)


# -- entropy ---------------------------------------------------------------------

@pytest.mark.parametrize("p", [2, 3, 5, 7])
def test_bernoulli_entropy_is_log_p(p):
    phi = bernoulli_shift((p,), NATURALS)
    rep = entropy_report(phi, copy_subgroup(phi), 12)
    assert rep.classification == "exact_geometric" and rep.ratio == p
    assert rep.orders == tuple(p ** n for n in range(1, 13))
    assert rep.entropy == math.log(p) and rep.fekete_consistent()


def test_direct_sum_entropy_adds():
    d = DirectSumEndo(bernoulli_shift((2,), NATURALS), bernoulli_shift((3,), NATURALS))
    S = d.sum_subgroup(copy_subgroup(d.f), copy_subgroup(d.g))
    rep = entropy_report(d, S, 10)
    assert rep.ratio == 6


def test_finite_entropy_zero_and_csv_rows():
    spec = GroupSpec.finite([2, 4])
    phi = MatrixEndo(spec, [[1, 1], [2, 1]])
    rep = entropy_report(phi, FiniteSubgroup.from_generators(spec, [spec.vector([0, 1])]), 8)
    assert rep.classification == "exact_zero" and rep.entropy == 0.0
    rows = rep.rows()
    assert rows[0][0] == 1 and rows[0][3] == "" and len(rows) == 8


def test_estimate_classification_for_irregular_growth():
    # copies of Z_2 at every other position: orders 2, 2, 4, 4, 8, 8, ...
    phi = bernoulli_shift((2,), NATURALS)
    F = FiniteSubgroup.from_generators(phi.domain, [phi.domain.basis_vector(0) + phi.domain.basis_vector(1)])
    rep = entropy_report(phi, F, 12)
    assert rep.classification in ("exact_geometric", "estimate")
    assert rep.entropy <= math.log(2) + 1e-12


def test_bound_argmin_is_exact():
    phi = bernoulli_shift((2,), NATURALS)
    rep = entropy_report(phi, full_subgroup(phi.domain, 0, 2), 8)
    # |T_n| = 2^(n+2): log|T_n|/n decreases, so the bound sits at n_max
    assert rep.bound_n == 8 and rep.ratio == 2


def test_entropy_with_generator_requires_matching_certificate():
    phi = bernoulli_shift((3,), NATURALS)
    S = copy_subgroup(phi)
    cert = check_generator_family(phi, S, 6)
    assert entropy_with_generator(phi, S, cert).total
    other = full_subgroup(phi.domain, 0, 1)
    with pytest.raises(InvalidCertificate):
        entropy_with_generator(phi, other, cert)
    bad = check_generator_family(bernoulli_shift((2,), INTEGERS), copy_subgroup(bernoulli_shift((2,), INTEGERS)), 4)
    with pytest.raises(InvalidCertificate):
        entropy_with_generator(phi, S, bad)


# -- lemmas ----------------------------------------------------------------------

def test_trajectory_shift_and_monotonicity():
    rng = random.Random(14)
    for _ in range(40):
        spec = random_group(rng, 32)
        phi = random_endomorphism(spec, rng)
        F = random_subgroup(spec, rng)
        assert trajectory_shift_check(phi, F, rng.randint(0, 3)).holds
        assert monotonicity_check(phi, F, F + random_subgroup(spec, rng))
    bi = bernoulli_shift((2,), INTEGERS)
    rep = trajectory_shift_check(bi, copy_subgroup(bi), 2)
    assert rep.holds and rep.two_sided_holds


def test_absorbing_witness_random():
    rng = random.Random(15)
    for _ in range(20):
        spec = random_group(rng, 32)
        phi = random_automorphism(spec, rng)
        S = full_subgroup(spec)
        K, rep = absorbing_witness(phi, S, m_cap=4)
        assert rep.holds and S.leq(K)


def test_absorbing_witness_errors():
    spec = GroupSpec.finite([4])
    with pytest.raises(NotEpimorphism):
        absorbing_witness(MatrixEndo(spec, [[2]]), full_subgroup(spec))
    with pytest.raises(NotGenerator):
        absorbing_witness(MatrixEndo(spec, [[1]]), FiniteSubgroup.trivial(spec))


def test_epi_audit_verdicts():
    un = bernoulli_shift((2,), NATURALS)
    f = epi_audit(un, copy_subgroup(un))
    assert f.kind == "NotSurjective" and f.witness == un.domain.basis_vector(0)
    bi = bernoulli_shift((2,), INTEGERS)
    f = epi_audit(bi, copy_subgroup(bi))
    assert f.kind == "GeneratorFails" and f.target == -1
    ex = integer_tail_shift()
    f = epi_audit(ex, FiniteSubgroup.from_generators(ex.domain, [ex.domain.basis_vector(0)]))
    assert f.kind == "NonTorsionAmbient" and not f.is_violation
    with pytest.raises(GrexpandError):
        epi_audit(MatrixEndo(GroupSpec.finite([2]), [[1]]), full_subgroup(GroupSpec.finite([2])))


# -- combinators -----------------------------------------------------------------

def test_factor_transport_through_semiconjugacy():
    spec = GroupSpec.finite([2, 4])
    phi = MatrixEndo(spec, [[1, 1], [2, 1]])
    S = FiniteSubgroup.from_generators(spec, [spec.vector([0, 1])])
    q = semiconjugacy_q(phi, S)
    T, cert = factor_transport(q, q.shift, phi, copy_subgroup(q.shift))
    assert T == S and cert.positive


def test_combine_sum_generators_finite():
    spec = GroupSpec.finite([2, 3])
    phi = MatrixEndo(spec, [[1, 0], [0, 2]])
    H = FiniteSubgroup.from_generators(spec, [spec.vector([1, 0])])
    K = FiniteSubgroup.from_generators(spec, [spec.vector([0, 1])])
    out = combine_sum_generators(phi, H, H, K, K)
    assert out.verified and out.subgroup == full_subgroup(spec)


def test_combine_sum_generators_patterns():
    six = bernoulli_shift((6,), INTEGERS)
    e = six.domain.basis_vector
    D2 = DivisorPatternSubgroup(six.domain, PeriodicPattern.constant(2))
    D3 = DivisorPatternSubgroup(six.domain, PeriodicPattern.constant(3))
    S2 = FiniteSubgroup.from_generators(six.domain, [e(0, 2)])
    S3 = FiniteSubgroup.from_generators(six.domain, [e(0, 3)])
    out = combine_sum_generators(six, D2, S2, D3, S3, side=TWO_SIDED, window=5)
    assert out.verified and out.subgroup == copy_subgroup(six)
    with pytest.raises(GrexpandError):
        combine_sum_generators(six, D2, S2, D2, S2, side=TWO_SIDED)


def test_extension_generator():
    spec = GroupSpec.finite([2, 4])
    phi = MatrixEndo(spec, [[1, 1], [2, 1]])
    H = FiniteSubgroup.from_generators(spec, [spec.vector([0, 2])])
    assert image(H, phi).leq(H)
    tilde, pi = quotient_endo(phi, H)
    S_q = full_subgroup(tilde.domain)
    ext = extension_generator(phi, H, H, S_q)
    assert ext.certificate.positive and image(ext.lifted, pi) == S_q


def test_power_generator_support():
    bi = bernoulli_shift((2,), INTEGERS)
    S0 = copy_subgroup(bi)
    S = S0 + image(S0, bi)
    cand, cert = power_generator(bi, S, 2, window=6)
    assert cert.positive and cand.support == tuple(range(-2, 4))
    with pytest.raises(NotGenerator):
        power_generator(bi, S0, 2, window=6)
    uni = bernoulli_shift((2,), NATURALS)
    with pytest.raises(NotAutomorphism):
        power_generator(uni, copy_subgroup(uni), 1)


def test_certify_dispatch():
    spec = GroupSpec.finite([3])
    assert certify(MatrixEndo(spec, [[1]]), full_subgroup(spec)).mode == "finite"
    phi = bernoulli_shift((3,), NATURALS)
    assert certify(phi, copy_subgroup(phi), window=4).mode == "family"


# -- restriction harness ---------------------------------------------------------

def test_harness_on_unilateral_patterns():
    phi = bernoulli_shift((8,), NATURALS)
    pats = [DivisorPatternSubgroup(phi.domain, p) for p in (
        PeriodicPattern.constant(2, NATURALS),
        PeriodicPattern(NATURALS, 0, (4, 2), (1,)),
        PeriodicPattern(NATURALS, 0, (1, 2), (4,)),
    )]
    rep = conjecture_harness(phi, copy_subgroup(phi), pats, window=6)
    assert rep.verdict == "consistent at window 6"
    inv = [v.invariant for v in rep.verdicts]
    assert inv == [True, True, False]
    assert rep.verdicts[2].witness == 0
    assert rep.verdicts[1].candidate.startswith("D∩T_")


def test_harness_two_sided_bilateral():
    phi = bernoulli_shift((4,), INTEGERS)
    pats = [DivisorPatternSubgroup(phi.domain, PeriodicPattern.constant(2)),
            DivisorPatternSubgroup(phi.domain, PeriodicPattern(INTEGERS, 0, (2,), (1,), (4,)))]
    rep = conjecture_harness(phi, copy_subgroup(phi), pats, window=5, side=TWO_SIDED)
    assert rep.verdict == "consistent at window 5"
    # the staircase is forward invariant but its inverse image leaves it
    assert rep.verdicts[0].invariant and not rep.verdicts[1].invariant
