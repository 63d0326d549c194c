"""Property suites over deterministic corpora.

Every suite returns a :class:`SuiteResult`; cases are generated from a
seeded ``random.Random`` and iterated in a fixed order, so two runs with
the same parameters produce identical results.
"""

from __future__ import annotations

import itertools
import math
import random
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from . import oracles
from .corpus import (conjugation_classes, groups_up_to, matmul, matrix_endomorphisms,
                     matrix_tuples, random_automorphism, random_endomorphism, random_group,
                     random_subgroup)
from .duality import duality_expansivity_check, verify_identities
from .dynamics import (FORWARD, STATS, TWO_SIDED, absorbing_witness,
                       certify_positively_expansive_finite, check_generator_family,
                       combine_sum_generators, conjecture_harness, entropy_report,
                       entropy_with_generator, epi_audit, extension_generator, factor_transport,
                       monotonicity_check, power_generator, trajectory_shift_check,
                       trajectory_sum)
from .endo import (DirectSumEndo, DivisorPatternSubgroup, MatrixEndo, bernoulli_shift,
                   check_intertwining, copy_subgroup, integer_tail_shift, power, quotient_endo,
                   random_element, semiconjugacy_q)
from .groups import INTEGERS, NATURALS, GroupSpec, PeriodicPattern
from .subgroup import FiniteSubgroup, all_subgroups, coordinate_subgroup, full_subgroup, image

MAX_FAILURES = 20


@dataclass
class SuiteResult:
    name: str
    cases: int = 0
    failures: list = field(default_factory=list)
    failure_count: int = 0
    params: dict = field(default_factory=dict)
    details: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.failure_count == 0 and self.cases > 0

    def case(self, ok: bool, key) -> bool:
        self.cases += 1
        if not ok:
            self.failure_count += 1
            if len(self.failures) < MAX_FAILURES:
                self.failures.append(key)
        return ok

    def to_json(self) -> dict:
        return {"suite": self.name, "passed": self.passed, "cases": self.cases,
                "failure_count": self.failure_count, "failures": self.failures,
                "params": self.params, "details": self.details}


def _key(spec: GroupSpec, *parts):
    return [list(spec.moduli), *[_plain(p) for p in parts]]


def _plain(x):
    if isinstance(x, FiniteSubgroup):
        return [g.dense() for g in x.generators()]
    if isinstance(x, tuple):
        return [_plain(v) for v in x]
    return x


# -- entropy ---------------------------------------------------------------------

def suite_entropy_bernoulli(primes=(2, 3, 5), n_max: int = 12, oracle_n: int = 6, **_):
    res = SuiteResult("entropy-bernoulli", params={"primes": list(primes), "n_max": n_max})
    for p in primes:
        phi = bernoulli_shift((p,), NATURALS)
        rep = entropy_report(phi, copy_subgroup(phi), n_max)
        # oracle: truncated shift on Z_p^oracle_n, set-level trajectory
        mods = (p,) * oracle_n
        A = [[int(i == j + 1) for j in range(oracle_n)] for i in range(oracle_n)]
        e0 = tuple(int(i == 0) for i in range(oracle_n))
        orders, _, _ = oracles.forward_closure(mods, A, oracles.closure(mods, [e0]), limit=oracle_n)
        ok = (rep.classification == "exact_geometric" and rep.ratio == p
              and list(rep.orders[:oracle_n]) == orders[:oracle_n] == [p ** n for n in range(1, oracle_n + 1)]
              and rep.fekete_consistent())
        res.case(ok, [p])
        res.details[str(p)] = {"classification": rep.classification, "ratio": rep.ratio}
    return res


def suite_finite_entropy(max_order: int = 16, **_):
    """Every endomorphism of every group of order <= max_order has entropy exactly 0."""
    res = SuiteResult("finite-entropy", params={"max_order": max_order})
    for spec in groups_up_to(max_order):
        Fs = [coordinate_subgroup(spec, k) for k in range(len(spec.moduli))] or [full_subgroup(spec)]
        for phi in matrix_endomorphisms(spec):
            for i, F in enumerate(Fs):
                rep = entropy_report(phi, F, 12)
                res.case(rep.classification == "exact_zero" and rep.entropy == 0.0,
                         _key(spec, phi.A, i))
    return res


def suite_certify_oracle(max_order: int = 16, **_):
    """Finite certification against the bitmask closure oracle, all (G, phi, S)."""
    res = SuiteResult("certify-oracle", params={"max_order": max_order})
    mismatched_lists = 0
    for spec in groups_up_to(max_order):
        subs = all_subgroups(spec)
        if spec.moduli:
            if {frozenset(tuple(x.dense()) for x in h.elements()) for h in subs} != \
                    oracles.all_subgroup_sets(spec.moduli):
                mismatched_lists += 1
        bg = oracles.BitmaskGroup(spec.moduli)
        masks = [bg.mask(tuple(x.dense()) for x in h.elements()) for h in subs]
        mats = list(matrix_tuples(spec))
        for start in range(0, len(mats), 4096):
            chunk = mats[start:start + 4096]
            n_star, final = bg.forward_closures(chunk, masks)
            full = np.uint64(bg.full)
            for e, A in enumerate(chunk):
                phi = MatrixEndo(spec, A)
                for i, S in enumerate(subs):
                    c = certify_positively_expansive_finite(phi, S)
                    ok = c.positive == bool(final[e, i] == full) and c.n_star == int(n_star[e, i])
                    res.case(ok, _key(spec, A, i))
    res.case(mismatched_lists == 0, "subgroup lists")
    res.details["subgroup_list_mismatches"] = mismatched_lists
    return res


# -- duality ----------------------------------------------------------------------

def suite_duality_chain(max_order: int = 16, random_cases: int = 500, random_order: int = 64,
                        seed: int = 0, reduce: bool = True, **_):
    """Dual-chain equivalence: exhaustive up to conjugation, plus unreduced random cases."""
    rng = random.Random(seed)
    res = SuiteResult("duality-chain", params={"max_order": max_order, "random_cases": random_cases,
                                               "random_order": random_order, "seed": seed,
                                               "reduce": reduce})
    reduced = 0
    total = 0
    for spec in groups_up_to(max_order):
        subs = all_subgroups(spec)
        mats = list(matrix_tuples(spec))
        reps = conjugation_classes(spec, mats, rng)[0] if reduce else mats
        total += len(mats) * len(subs)
        for A in reps:
            phi = MatrixEndo(spec, A)
            for i, S in enumerate(subs):
                reduced += 1
                r = duality_expansivity_check(phi, S)
                res.case(r.holds, _key(spec, A, i))
    rng = random.Random(f"{seed}:random")
    for t in range(random_cases):
        spec = random_group(rng, random_order)
        phi = random_endomorphism(spec, rng)
        S = random_subgroup(spec, rng)
        r = duality_expansivity_check(phi, S)
        ok = r.holds
        if phi.is_automorphism:
            ok = ok and duality_expansivity_check(phi, S, TWO_SIDED).holds
        res.case(ok, ["random", t])
    res.details.update(exhaustive_pairs=total, representatives_checked=reduced)
    return res


def _endo_sample(spec, rng, limit):
    count = math.prod(math.gcd(a, b) for a in spec.moduli for b in spec.moduli)
    if count <= limit:
        return [MatrixEndo(spec, A) for A in matrix_tuples(spec)]
    return [random_endomorphism(spec, rng) for _ in range(limit)]


def suite_duality(max_order: int = 32, random_cases: int = 200, random_order: int = 64,
                  seed: int = 0, endo_limit: int = 16, **_):
    """Annihilator identities: every subgroup and pair, endomorphisms exhaustive or sampled."""
    rng = random.Random(seed)
    res = SuiteResult("duality", params={"max_order": max_order, "random_cases": random_cases,
                                         "random_order": random_order, "seed": seed,
                                         "endo_limit": endo_limit})
    for spec in groups_up_to(max_order):
        subs = all_subgroups(spec)
        endos = _endo_sample(spec, rng, endo_limit)
        rep = verify_identities(spec, endos[0], subs)
        res.case(rep.holds, _key(spec, "pairs"))
        for phi in endos[1:]:
            rep = verify_identities(spec, phi, subs, pairs=())
            res.case(rep.holds, _key(spec, phi.A))
    for t in range(random_cases):
        spec = random_group(rng, random_order)
        phi = random_endomorphism(spec, rng)
        subs = [random_subgroup(spec, rng) for _ in range(4)]
        res.case(verify_identities(spec, phi, subs).holds, ["random", t])
    return res


# -- epimorphisms --------------------------------------------------------------------

def _random_generator(spec, phi, rng, side=FORWARD):
    """Random subgroup grown until it (positively) generates ``G``."""
    S = random_subgroup(spec, rng, 1)
    while not certify_positively_expansive_finite(phi, S, side).positive:
        S = S + FiniteSubgroup.from_generators(spec, [random_element(spec, rng)])
    return S


def suite_absorbing_witness(cases: int = 100, random_order: int = 32, m_cap: int = 10,
                            seed: int = 0, **_):
    rng = random.Random(seed)
    res = SuiteResult("absorbing-witness", params={"cases": cases, "random_order": random_order,
                                                   "m_cap": m_cap, "seed": seed})
    for t in range(cases):
        spec = random_group(rng, random_order)
        phi = random_automorphism(spec, rng)
        S = _random_generator(spec, phi, rng)
        K, rep = absorbing_witness(phi, S, m_cap=m_cap, absorb_cap=spec.order)
        ok = rep.holds and all(m <= spec.order for _, m in rep.absorption)
        res.case(ok, ["random", t, list(spec.moduli)])
    return res


def suite_epi_audit(**_):
    res = SuiteResult("epi-audit")
    un = bernoulli_shift((2,), NATURALS)
    f = epi_audit(un, copy_subgroup(un))
    res.case(f.kind == "NotSurjective" and f.witness == un.domain.basis_vector(0), "unilateral")
    bi = bernoulli_shift((2,), INTEGERS)
    f = epi_audit(bi, copy_subgroup(bi))
    res.case(f.kind == "GeneratorFails" and f.target == -1, "bilateral-forward")
    ex = integer_tail_shift()
    S0 = FiniteSubgroup.from_generators(ex.domain, [ex.domain.basis_vector(0)])
    f = epi_audit(ex, S0)
    res.case(f.kind == "NonTorsionAmbient" and f.certificate.positive, "integer-tail")
    res.details = {"unilateral": "NotSurjective", "bilateral-forward": "GeneratorFails",
                   "integer-tail": "NonTorsionAmbient"}
    return res


# -- generator combinators --------------------------------------------------------------

def suite_direct_sum(max_order: int = 16, **_):
    """Direct-sum law for every pair of groups with ``|G||H| <= max_order``."""
    res = SuiteResult("direct-sum", params={"max_order": max_order})
    groups = groups_up_to(max_order // 2, include_trivial=False)
    for G, H in itertools.product(groups, repeat=2):
        if G.order * H.order > max_order:
            continue
        subs_G, subs_H = all_subgroups(G), all_subgroups(H)
        endo_G, endo_H = list(matrix_endomorphisms(G)), list(matrix_endomorphisms(H))
        verdict_G = {(e, i): certify_positively_expansive_finite(phi, S).positive
                     for e, phi in enumerate(endo_G) for i, S in enumerate(subs_G)}
        verdict_H = {(e, i): certify_positively_expansive_finite(psi, S).positive
                     for e, psi in enumerate(endo_H) for i, S in enumerate(subs_H)}
        for (a, phi), (b, psi) in itertools.product(enumerate(endo_G), enumerate(endo_H)):
            ds = DirectSumEndo(phi, psi)
            for (i, SG), (j, SH) in itertools.product(enumerate(subs_G), enumerate(subs_H)):
                got = certify_positively_expansive_finite(ds, ds.sum_subgroup(SG, SH)).positive
                res.case(got == (verdict_G[a, i] and verdict_H[b, j]),
                         [list(G.moduli), list(H.moduli), phi.A, psi.A, i, j])
    return res


def _invariant_closure(phi, H0):
    return trajectory_sum(phi, H0, 64)


def suite_extension(cases: int = 100, random_order: int = 32, seed: int = 0, **_):
    rng = random.Random(seed)
    res = SuiteResult("extension", params={"cases": cases, "random_order": random_order, "seed": seed})
    for t in range(cases):
        spec = random_group(rng, random_order)
        phi = random_endomorphism(spec, rng)
        H = _invariant_closure(phi, random_subgroup(spec, rng, 1))
        S_H = _small_generator(phi, H, rng)
        tilde, _ = quotient_endo(phi, H)
        S_q = _random_generator(tilde.domain, tilde, rng) if tilde.domain.moduli else \
            FiniteSubgroup.trivial(tilde.domain)
        try:
            ext = extension_generator(phi, H, S_H, S_q)
            ok = ext.certificate.positive and image(ext.lifted, _projection(phi, H)) == S_q
        except Exception as exc:  # a raised verification failure is a failed case
            ok = False
            res.details.setdefault("errors", []).append(f"{t}: {type(exc).__name__}")
        res.case(ok, ["random", t, list(spec.moduli)])
    return res


def _small_generator(phi, H, rng):
    """A generating prefix of a shuffled generator list of the invariant subgroup ``H``."""
    gens = list(H.generators())
    rng.shuffle(gens)
    for k in range(len(gens) + 1):
        cand = FiniteSubgroup.from_generators(H.spec, gens[:k])
        if trajectory_sum(phi, cand, 64) == H:
            return cand
    return H


def _projection(phi, H):
    return quotient_endo(phi, H)[1]


def suite_power(window: int = 6, **_):
    res = SuiteResult("power", params={"window": window})
    bi = bernoulli_shift((2,), INTEGERS)
    S0 = copy_subgroup(bi)
    S = S0 + image(S0, bi)
    sq = power(bi, 2)
    cert_sq = check_generator_family(sq, S, window, side=TWO_SIDED)
    cand, cert = power_generator(bi, S, 2, window=window, certificate=cert_sq)
    core = trajectory_sum(bi, S0, 3, TWO_SIDED)
    expected = core + image(core, bi)
    res.case(cert_sq.positive and cert.positive and cand == expected
             and cand.support == tuple(range(-2, 4)), "bilateral-square")
    neg = check_generator_family(sq, S0, window, side=TWO_SIDED)
    res.case(not neg.positive and 1 in neg.failures, "negative-control")
    res.details = {"candidate_support": list(cand.support), "negative_failures": list(neg.failures)}
    return res


def suite_conjugacy(cases: int = 200, random_order: int = 32, seed: int = 0, **_):
    rng = random.Random(seed)
    res = SuiteResult("conjugacy", params={"cases": cases, "random_order": random_order, "seed": seed})
    for t in range(cases):
        spec = random_group(rng, random_order)
        phi = random_endomorphism(spec, rng)
        S = _random_generator(spec, phi, rng)
        c = certify_positively_expansive_finite(phi, S)
        theta = random_automorphism(spec, rng)
        conj = MatrixEndo(spec, matmul(spec, matmul(spec, theta.A, phi.A), theta.inverse().A))
        c2 = certify_positively_expansive_finite(conj, image(S, theta))
        res.case(c.positive and c2.positive and c.n_star == c2.n_star, ["random", t])
    return res


def suite_semiconjugacy(cases: int = 100, seed: int = 0, **_):
    """Bernoulli covers: intertwining and transport of the copy subgroup."""
    rng = random.Random(seed)
    res = SuiteResult("semiconjugacy", params={"cases": cases, "seed": seed})
    bi = bernoulli_shift((2,), INTEGERS)
    q = semiconjugacy_q(bi, copy_subgroup(bi), INTEGERS)
    samples = [random_element(q.domain, rng, -6, 6) for _ in range(cases)]
    res.case(check_intertwining(q, q.shift, bi, samples).holds, "bilateral")
    for t in range(20):
        spec = random_group(rng, 32)
        phi = random_endomorphism(spec, rng)
        S = _random_generator(spec, phi, rng)
        q = semiconjugacy_q(phi, S, NATURALS)
        base = copy_subgroup(q.shift)
        T, cert = factor_transport(q, q.shift, phi, base, samples=64, seed=t)
        res.case(T == S and cert.positive, ["finite", t, list(spec.moduli)])
    return res


def suite_sum_generators(cases: int = 50, random_order: int = 32, seed: int = 0, **_):
    rng = random.Random(seed)
    res = SuiteResult("sum-generators", params={"cases": cases, "seed": seed})
    for t in range(cases):
        spec = random_group(rng, random_order)
        phi = random_endomorphism(spec, rng)
        G = full_subgroup(spec)
        H = _invariant_closure(phi, random_subgroup(spec, rng, 1))
        K = _invariant_closure(phi, random_subgroup(spec, rng, 1))
        while H + K != G:
            K = _invariant_closure(phi, K + FiniteSubgroup.from_generators(spec, [random_element(spec, rng)]))
        out = combine_sum_generators(phi, H, _small_generator(phi, H, rng), K,
                                     _small_generator(phi, K, rng))
        res.case(out.verified, ["random", t])
    six = bernoulli_shift((6,), INTEGERS)
    D2 = DivisorPatternSubgroup(six.domain, PeriodicPattern.constant(2))
    D3 = DivisorPatternSubgroup(six.domain, PeriodicPattern.constant(3))
    e = six.domain.basis_vector
    S2 = FiniteSubgroup.from_generators(six.domain, [e(0, 2)])
    S3 = FiniteSubgroup.from_generators(six.domain, [e(0, 3)])
    out = combine_sum_generators(six, D2, S2, D3, S3, side=TWO_SIDED, window=6)
    res.case(out.verified and out.subgroup == copy_subgroup(six), "windowed-family")
    return res


# -- entropy lemmas ------------------------------------------------------------------------

def suite_trajectory_shift(cases: int = 100, random_order: int = 32, seed: int = 0, **_):
    rng = random.Random(seed)
    res = SuiteResult("trajectory-shift", params={"cases": cases, "seed": seed})
    bi = bernoulli_shift((2,), INTEGERS)
    r = trajectory_shift_check(bi, copy_subgroup(bi), 2, 6)
    res.case(r.holds, "bilateral m=2")
    for t in range(cases):
        spec = random_group(rng, random_order)
        phi = random_endomorphism(spec, rng)
        F = random_subgroup(spec, rng)
        E = F + random_subgroup(spec, rng, 1)
        ok = trajectory_shift_check(phi, F, rng.randint(0, 3), 6).holds
        ok = ok and monotonicity_check(phi, F, E)
        res.case(ok, ["random", t])
    return res


def suite_generator_entropy(samples: int = 20, n_max: int = 12, seed: int = 0, **_):
    """Entropy relative to sampled F never exceeds the entropy of a certified generator."""
    rng = random.Random(seed)
    res = SuiteResult("generator-entropy", params={"samples": samples, "n_max": n_max, "seed": seed})
    for p, index in ((2, NATURALS), (3, NATURALS), (2, INTEGERS), (5, NATURALS)):
        phi = bernoulli_shift((p,), index)
        S = copy_subgroup(phi)
        side = FORWARD if index == NATURALS else TWO_SIDED
        total = entropy_with_generator(phi, S, check_generator_family(phi, S, 8, side=side), n_max)
        res.case(total.ratio == p, [p, index, "total"])
        for t in range(samples):
            gens = [random_element(phi.domain, rng, 0, 3) for _ in range(rng.randint(1, 2))]
            F = FiniteSubgroup.from_generators(phi.domain, gens)
            rep = entropy_report(phi, F, n_max)
            if rep.classification == "exact_geometric":
                ok = rep.ratio <= total.ratio
            elif rep.classification == "exact_zero":
                ok = True
            else:
                ok = rep.slope <= math.log(total.ratio) + 1e-12
            res.case(ok, [p, index, t])
    return res


def suite_restriction(window: int = 6, n_cap: int = 64, **_):
    """Restrictions of shift families to invariant divisor patterns."""
    res = SuiteResult("restriction", params={"window": window, "n_cap": n_cap})
    systems = []
    for m in (4, 6, 8, 12):
        for index in (NATURALS, INTEGERS):
            phi = bernoulli_shift((m,), index)
            divs = [d for d in range(1, m + 1) if m % d == 0]
            pats = [PeriodicPattern.constant(d, index) for d in divs]
            if index == NATURALS:
                pats += [PeriodicPattern(NATURALS, 0, (a, b), (c,))
                         for a in divs for b in divs for c in divs]
            systems.append((phi, pats, FORWARD if index == NATURALS else TWO_SIDED))
    two = DirectSumEndo(bernoulli_shift((2,), NATURALS), bernoulli_shift((4,), NATURALS))
    systems.append((two, [PeriodicPattern(NATURALS, 0, (), (1, 2)), PeriodicPattern(NATURALS, 0, (), (2, 2)),
                          PeriodicPattern(NATURALS, 0, (), (2, 4)), PeriodicPattern(NATURALS, 0, (), (1, 4))],
                    FORWARD))
    invariant = 0
    for phi, pats, side in systems:
        S = copy_subgroup(phi) if not isinstance(phi, DirectSumEndo) else \
            phi.sum_subgroup(copy_subgroup(phi.f), copy_subgroup(phi.g))
        patterns = [DivisorPatternSubgroup(phi.domain, p) for p in pats]
        rep = conjecture_harness(phi, S, patterns, window, n_cap, side)
        invariant += sum(v.invariant for v in rep.verdicts)
        res.case(rep.baseline.positive and rep.verdict.startswith("consistent"),
                 [phi.describe()["kind"], side, len(pats)])
    res.details["invariant_patterns"] = invariant
    return res


SUITES: dict[str, Callable[..., SuiteResult]] = {
    "entropy-bernoulli": suite_entropy_bernoulli,
    "finite-entropy": suite_finite_entropy,
    "certify-oracle": suite_certify_oracle,
    "duality-chain": suite_duality_chain,
    "duality": suite_duality,
    "absorbing-witness": suite_absorbing_witness,
    "epi-audit": suite_epi_audit,
    "direct-sum": suite_direct_sum,
    "extension": suite_extension,
    "power": suite_power,
    "conjugacy": suite_conjugacy,
    "semiconjugacy": suite_semiconjugacy,
    "sum-generators": suite_sum_generators,
    "trajectory-shift": suite_trajectory_shift,
    "generator-entropy": suite_generator_entropy,
    "restriction": suite_restriction,
}

# short names used by the command line interface
ALIASES = {
    "prop-2.5": "conjugacy", "prop-2.6": "semiconjugacy", "prop-2.7": "direct-sum",
    "prop-2.8": "sum-generators", "prop-2.9": "extension", "prop-2.10": "power",
    "lemma-3.2": "trajectory-shift", "thm-3.3": "generator-entropy",
    "lemma-4.1": "absorbing-witness", "thm-4.2": "epi-audit",
    "thm-5.1": "duality-chain", "thm-5.2": "restriction", "conj-5.3": "restriction",
    "identities": "duality",
}

# suites run by "all" (the exhaustive oracle comparison is opt-in: it takes minutes)
DEFAULT_SELECTION = [name for name in SUITES if name != "certify-oracle"]


def resolve(selector: str) -> list[str]:
    if selector == "all":
        return list(DEFAULT_SELECTION)
    names = []
    for part in selector.split(","):
        part = part.strip()
        name = ALIASES.get(part, part)
        if name not in SUITES:
            raise KeyError(f"unknown suite {part!r}")
        if name not in names:
            names.append(name)
    return names


def run_suites(selector: str = "all", seed: int = 0, max_order: int | None = None) -> list[SuiteResult]:
    out = []
    for name in resolve(selector):
        kwargs = {"seed": seed}
        if max_order is not None:
            kwargs["max_order"] = max_order
        before = STATS["tables_checked"]
        result = SUITES[name](**kwargs)
        result.details["tables_checked"] = STATS["tables_checked"] - before
        out.append(result)
    return out
