"""Trajectory sums, generator certificates and algebraic entropy.

Indexing convention: the forward trajectory of a finite subgroup ``F`` is
``T_n = F + phi F + ... + phi^(n-1) F`` (so ``T_1 = F``); the two-sided one
is ``T_n = sum_{|k| <= n-1} phi^k F``. A statement of the form
"F is inside sum_{k=0}^n phi^k S" is therefore "F <= T_{n+1}".
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from functools import lru_cache
from typing import Iterator, Sequence

from . import kernels
from .endo import (DivisorPatternSubgroup, Endomorphism, Hom, InverseEndo, RestrictionEndo,
                   check_intertwining, power, quotient_endo, random_element)
from .errors import (GrexpandError, IntertwiningFails, InvalidCertificate, InvariantViolation,
                     NotAutomorphism, NotEpimorphism, NotGenerator, NotInvariant)
from .groups import Element, GroupSpec
from .subgroup import (FiniteSubgroup, all_subgroups, enumerate_group,
                       full_subgroup, image, intersect, preimage)

FORWARD = "forward"
TWO_SIDED = "two-sided"

DEFAULT_WINDOW = 8
DEFAULT_NCAP = 64
GEOMETRIC_WINDOW = 3

# number of trajectory tables whose invariants were asserted (read by the suites)
STATS = {"tables_checked": 0}


def _check_side(phi: Endomorphism, side: str):
    if side not in (FORWARD, TWO_SIDED):
        raise GrexpandError(f"unknown side {side!r}")
    if side == TWO_SIDED and not phi.is_automorphism:
        raise NotAutomorphism("two-sided trajectories need an automorphism")


# -- trajectory tables --------------------------------------------------------

def _torsion_block(phi: Endomorphism, inverse: bool = False):
    """Moduli and matrix of ``phi`` (or its inverse) on the torsion coordinates."""
    key = "_tblock_inv" if inverse else "_tblock"
    cached = phi.__dict__.get(key)
    if cached is not None:
        return cached
    spec = phi.domain
    t = tuple(i for i, m in enumerate(spec.moduli) if m)
    A = phi.inverse().matrix if inverse else phi.matrix
    block = (t, [spec.moduli[i] for i in t], [[A[i][j] for j in t] for i in t])
    phi.__dict__[key] = block
    return block


class TrajectoryTable:
    """Recorded trajectory ``T_1, ..., T_len``.

    Finite specs keep raw HNF bases over the torsion coordinates (subgroups
    are materialized on demand); families keep the subgroups themselves.
    """

    def __init__(self, spec: GroupSpec, side: str, *, subgroups=None, support=None,
                 moduli=None, bases=None):
        self.spec = spec
        self.side = side
        self._subgroups = list(subgroups) if subgroups is not None else None
        self.support = support
        self.moduli = moduli
        self.bases = bases
        if bases is not None:
            self.orders = tuple(kernels.pivots_order(b, moduli) for b in bases)
            same = [bases[i] == bases[i + 1] for i in range(len(bases) - 1)]
        else:
            self.orders = tuple(h.order for h in self._subgroups)
            same = [self._subgroups[i] == self._subgroups[i + 1]
                    for i in range(len(self._subgroups) - 1)]
        self.stabilized_at = next((i + 1 for i, eq in enumerate(same) if eq), None)
        self._same = same

    def __len__(self):
        return len(self.orders)

    def subgroup(self, n: int) -> FiniteSubgroup:
        """``T_n`` (1-indexed)."""
        if self._subgroups is None:
            self._subgroups = [None] * len(self.bases)
        h = self._subgroups[n - 1]
        if h is None:
            h = FiniteSubgroup.from_rows(self.spec, self.support, self.bases[n - 1])
            self._subgroups[n - 1] = h
        return h

    @property
    def entries(self) -> list[FiniteSubgroup]:
        return [self.subgroup(n) for n in range(1, len(self) + 1)]

    @property
    def final(self) -> FiniteSubgroup:
        return self.subgroup(len(self))

    def check_invariants(self) -> None:
        """Monotonicity, absorption and (forward) subadditivity; raises on failure."""
        STATS["tables_checked"] += 1
        if self.bases is not None:
            bad = kernels.chain_violation(self.moduli, self.bases)
        else:
            bad = next((i for i in range(len(self) - 1)
                        if not self._subgroups[i].leq(self._subgroups[i + 1])), -1)
        if bad >= 0:
            raise InvariantViolation(f"monotonicity: T_{bad + 1} is not inside T_{bad + 2}")
        n0 = self.stabilized_at
        if n0 is not None and not all(self._same[n0 - 1:]):
            raise InvariantViolation(f"absorption: T stabilized at {n0} but grew afterwards")
        if self.side == FORWARD:
            o = self.orders
            for a in range(1, len(o)):
                for b in range(1, len(o) - a + 1):
                    if o[a + b - 1] > o[a - 1] * o[b - 1]:
                        raise InvariantViolation(
                            f"subadditivity: |T_{a + b}| > |T_{a}| * |T_{b}|")


def _iter_trajectory(phi: Endomorphism, F: FiniteSubgroup, side: str) -> Iterator[FiniteSubgroup]:
    """Yield ``T_1, T_2, ...`` through generic subgroup arithmetic."""
    inv = InverseEndo(phi) if side == TWO_SIDED else None
    cur = F
    yield cur
    while True:
        if inv is None:
            cur = F + image(cur, phi)
        else:
            cur = cur + image(cur, phi) + image(cur, inv)
        yield cur


def trajectory_table(phi: Endomorphism, F: FiniteSubgroup, n_max: int, side: str = FORWARD,
                     stop: bool = True, extra: int = 1) -> TrajectoryTable:
    """``T_1 .. T_{n_max}``; with ``stop`` it ends ``extra`` steps after stabilizing."""
    _check_side(phi, side)
    if F.spec != phi.domain:
        raise GrexpandError("subgroup and endomorphism live in different groups")
    spec = phi.domain
    if n_max < 1:
        raise GrexpandError("n_max must be positive")
    if spec.is_finite:
        t, mods, A = _torsion_block(phi)
        A_inv = _torsion_block(phi, inverse=True)[2] if side == TWO_SIDED else None
        bases = kernels.trajectory(mods, A, F.rows_on(t), n_max, A_inv, stop, extra)
        return TrajectoryTable(spec, side, support=t, moduli=mods, bases=bases)
    out = []
    stop_at = n_max
    prev = None
    for T in _iter_trajectory(phi, F, side):
        out.append(T)
        if stop and stop_at == n_max and prev is not None and T == prev:
            stop_at = min(n_max, len(out) + extra)
        if len(out) >= stop_at:
            break
        prev = T
    return TrajectoryTable(spec, side, subgroups=out)


def trajectory_sum(phi: Endomorphism, F: FiniteSubgroup, n: int, side: str = FORWARD) -> FiniteSubgroup:
    """``T_n`` for the given side."""
    table = trajectory_table(phi, F, n, side, stop=True, extra=0)
    return table.final


@dataclass(frozen=True)
class Stabilization:
    n_star: int | None
    subgroup: FiniteSubgroup
    n_cap: int

    @property
    def stabilized(self) -> bool:
        return self.n_star is not None


def stabilize(phi: Endomorphism, F: FiniteSubgroup, side: str = FORWARD,
              n_cap: int = DEFAULT_NCAP) -> Stabilization:
    """Least ``n*`` with ``T_{n*+1} = T_{n*}``, or not-stabilized at ``n_cap``."""
    table = trajectory_table(phi, F, n_cap + 1, side, stop=True, extra=1)
    table.check_invariants()
    n0 = table.stabilized_at
    if n0 is None or n0 > n_cap:
        return Stabilization(None, table.subgroup(min(len(table), n_cap)), n_cap)
    return Stabilization(n0, table.subgroup(n0), n_cap)


# -- certificates ---------------------------------------------------------------

@dataclass(frozen=True)
class GeneratorCertificate:
    """Outcome of a generator check.

    ``finite`` mode: ``n_star`` is the stabilization step and ``positive``
    says whether ``T_{n*}`` is the whole torsion part. ``family`` mode: a
    semidecision over targets ``C_j`` with ``|j| <= window``; ``coverage``
    lists ``(j, least n)`` and ``failures`` the targets missed by ``n_cap``.
    """

    mode: str
    side: str
    positive: bool
    generator: FiniteSubgroup = field(repr=False)
    n_star: int | None = None
    window: int | None = None
    n_cap: int | None = None
    coverage: tuple = ()
    failures: tuple = ()
    table: TrajectoryTable | None = field(default=None, repr=False, compare=False)

    @property
    def limit(self) -> FiniteSubgroup | None:
        """The stabilized subgroup (finite mode)."""
        if self.table is None or self.n_star is None:
            return None
        return self.table.subgroup(self.n_star)

    def to_json(self) -> dict:
        d = {"mode": self.mode, "side": self.side, "positive": self.positive,
             "generator": self.generator.to_json()}
        if self.mode == "finite":
            d["n_star"] = self.n_star
            if not self.positive and self.limit is not None:
                d["stabilized_subgroup"] = self.limit.to_json()
        else:
            d.update(window=self.window, n_cap=self.n_cap,
                     coverage=[[j, n] for j, n in self.coverage],
                     failures=list(self.failures))
        return d


@lru_cache(maxsize=256)
def _chain_bound(spec: GroupSpec) -> int:
    """Upper bound on the length of a strictly increasing chain of subgroups."""
    total = 0
    for m in spec.moduli:
        if m:
            total += sum(_prime_factors(m).values())
    return total + 1


def _prime_factors(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def certify_positively_expansive_finite(phi: Endomorphism, S: FiniteSubgroup,
                                        side: str = FORWARD) -> GeneratorCertificate:
    """Decide whether ``S`` (positively) generates ``t(G)`` for ``phi`` on a finite spec."""
    spec = phi.domain
    if not spec.is_finite:
        raise GrexpandError("finite certification needs a finite spec")
    table = trajectory_table(phi, S, _chain_bound(spec) + 2, side, stop=True, extra=1)
    table.check_invariants()
    n0 = table.stabilized_at
    if n0 is None:
        raise InvariantViolation("trajectory failed to stabilize within the chain bound")
    torsion_order = math.prod(m for m in spec.moduli if m)
    return GeneratorCertificate("finite", side, table.orders[n0 - 1] == torsion_order, S,
                                n_star=n0, table=table)


def check_generator_family(phi: Endomorphism, S: FiniteSubgroup, window: int = DEFAULT_WINDOW,
                           n_cap: int = DEFAULT_NCAP, side: str = FORWARD) -> GeneratorCertificate:
    """Windowed check that every torsion coordinate ``C_j``, ``|j| <= window``, lies in some ``T_n``."""
    _check_side(phi, side)
    spec = phi.domain
    if spec.is_finite:
        return certify_positively_expansive_finite(phi, S, side)
    targets = sorted(spec.torsion_indices(-window, window), key=lambda j: (abs(j), j))
    remaining = list(targets)
    coverage = {}
    seen = []
    for n, T in enumerate(_iter_trajectory(phi, S, side), 1):
        seen.append(T)
        remaining = [j for j in remaining if not _record(T, spec, j, n, coverage)]
        if not remaining or n >= n_cap or (n > 1 and T == seen[-2]):
            break
    TrajectoryTable(spec, side, subgroups=seen).check_invariants()
    cov = tuple(sorted(coverage.items(), key=lambda jn: (abs(jn[0]), jn[0])))
    return GeneratorCertificate("family", side, not remaining, S, window=window, n_cap=n_cap,
                                coverage=cov, failures=tuple(remaining))


def _record(T, spec, j, n, coverage) -> bool:
    if T.member(spec.basis_vector(j)):
        coverage[j] = n
        return True
    return False


def certify(phi: Endomorphism, S: FiniteSubgroup, side: str = FORWARD,
            window: int = DEFAULT_WINDOW, n_cap: int = DEFAULT_NCAP) -> GeneratorCertificate:
    """Finite decision on finite specs, windowed semidecision on families."""
    if phi.domain.is_finite:
        return certify_positively_expansive_finite(phi, S, side)
    return check_generator_family(phi, S, window, n_cap, side)


# -- entropy --------------------------------------------------------------------

@dataclass(frozen=True)
class EntropyReport:
    """Growth of ``|T_n|`` and the resulting value of ``h(phi, F)``.

    ``classification`` is ``exact_zero`` (the trajectory stabilized),
    ``exact_geometric`` (constant integer ratio ``ratio`` over the last
    steps) or ``estimate`` (``slope`` over the final half). The upper bound
    ``min_n log|T_n| / n`` is attained at ``bound_n``.
    """

    orders: tuple
    classification: str
    n_max: int
    computed: int
    stabilized_at: int | None
    bound_n: int
    ratio: int | None = None
    slope: float | None = None
    total: bool = False
    note: str = ""

    @property
    def entropy(self) -> float:
        if self.classification == "exact_zero":
            return 0.0
        if self.classification == "exact_geometric":
            return math.log(self.ratio)
        return self.slope

    @property
    def is_exact(self) -> bool:
        return self.classification != "estimate"

    @property
    def upper_bound(self) -> float:
        return math.log(self.orders[self.bound_n - 1]) / self.bound_n

    def fekete_consistent(self) -> bool:
        """``log r <= log|T_n| / n`` at every recorded ``n`` (exact integer test)."""
        if self.classification != "exact_geometric":
            return True
        return all(self.ratio ** n <= o for n, o in enumerate(self.orders, 1))

    def rows(self) -> list[tuple]:
        out = []
        for n, o in enumerate(self.orders, 1):
            ratio = "" if n == 1 else _ratio_text(o, self.orders[n - 2])
            out.append((n, o, f"{math.log(o):.12g}", ratio))
        return out

    def to_json(self) -> dict:
        d = {"classification": self.classification, "n_max": self.n_max,
             "orders": list(self.orders), "computed_steps": self.computed,
             "stabilized_at": self.stabilized_at, "entropy": round(self.entropy, 12),
             "upper_bound": {"n": self.bound_n, "order": self.orders[self.bound_n - 1],
                             "value": round(self.upper_bound, 12)},
             "total": self.total}
        if self.ratio is not None:
            d["ratio"] = self.ratio
            d["entropy_exact"] = f"log({self.ratio})"
        if self.classification == "exact_zero":
            d["entropy_exact"] = "0"
        if self.slope is not None:
            d["slope"] = round(self.slope, 12)
        if self.note:
            d["note"] = self.note
        return d


def _ratio_text(a: int, b: int) -> str:
    return str(a // b) if a % b == 0 else f"{a}/{b}"


def _fekete_argmin(orders: Sequence[int]) -> int:
    best = 1
    for n in range(2, len(orders) + 1):
        # log o_n / n < log o_best / best  <=>  o_n^best < o_best^n
        if orders[n - 1] ** best < orders[best - 1] ** n:
            best = n
    return best


def report_from_table(table: TrajectoryTable, n_max: int, window: int = GEOMETRIC_WINDOW) -> EntropyReport:
    orders = list(table.orders)
    n0 = table.stabilized_at
    computed = len(orders)
    if n0 is not None:
        orders = orders[:n0] + [orders[n0 - 1]] * (n_max - n0)
    orders = tuple(orders[:n_max])
    bound = _fekete_argmin(orders)
    if n0 is not None and n0 < n_max:
        return EntropyReport(orders, "exact_zero", n_max, computed, n0, bound)
    tail = [(orders[i + 1], orders[i]) for i in range(len(orders) - 1)][-window:]
    ratios = {a // b for a, b in tail if a % b == 0}
    if len(tail) == window and all(a % b == 0 for a, b in tail) and len(ratios) == 1:
        r = ratios.pop()
        if r > 1:
            return EntropyReport(orders, "exact_geometric", n_max, computed, None, bound, ratio=r)
    h = n_max // 2
    slope = (math.log(orders[-1]) - math.log(orders[h - 1])) / (n_max - h)
    return EntropyReport(orders, "estimate", n_max, computed, n0, bound, slope=slope)


def entropy_report(phi: Endomorphism, F: FiniteSubgroup, n_max: int = 12,
                   window: int = GEOMETRIC_WINDOW) -> EntropyReport:
    """Forward orders ``|T_1| .. |T_{n_max}|`` classified as described in :class:`EntropyReport`."""
    if n_max < 4:
        raise GrexpandError("entropy reports need n_max >= 4")
    table = trajectory_table(phi, F, n_max, FORWARD, stop=True, extra=1)
    table.check_invariants()
    return report_from_table(table, n_max, window)


def entropy_with_generator(phi: Endomorphism, S: FiniteSubgroup, certificate: GeneratorCertificate,
                           n_max: int = 12) -> EntropyReport:
    """Total entropy of ``phi``, read off from a certified generator."""
    if not isinstance(certificate, GeneratorCertificate) or not certificate.positive:
        raise InvalidCertificate("a positive generator certificate is required")
    if certificate.generator != S:
        raise InvalidCertificate("the certificate was issued for a different subgroup")
    rep = entropy_report(phi, S, n_max)
    scope = ("certified over the whole group" if certificate.mode == "finite"
             else f"certified on window {certificate.window} with n_cap {certificate.n_cap}")
    return replace(rep, total=True,
                   note=f"total entropy equals entropy relative to a {certificate.side} generator, {scope}")


# -- trajectory shift and monotonicity -------------------------------------------

@dataclass(frozen=True)
class TrajectoryShiftReport:
    m: int
    n_max: int
    forward_holds: bool
    forward_failures: tuple = ()
    two_sided_holds: bool | None = None

    @property
    def holds(self) -> bool:
        return self.forward_holds and self.two_sided_holds is not False

    def to_json(self):
        return {"m": self.m, "n_max": self.n_max, "forward_holds": self.forward_holds,
                "forward_failures": list(self.forward_failures),
                "two_sided_holds": self.two_sided_holds}


def trajectory_shift_check(phi: Endomorphism, F: FiniteSubgroup, m: int,
                           n_max: int = 6) -> TrajectoryShiftReport:
    """With ``E = T^F_{m+1}``: ``T^E_n = T^F_{m+n}`` for ``n <= n_max``.

    For automorphisms also ``sum_{|k|<=m} phi^k F = phi^(-m) T^F_{2m+1}``.
    """
    big = trajectory_table(phi, F, m + n_max, FORWARD, stop=False)
    big.check_invariants()
    E = big.subgroup(m + 1)
    small = trajectory_table(phi, E, n_max, FORWARD, stop=False)
    small.check_invariants()
    fails = tuple(n for n in range(1, n_max + 1) if small.subgroup(n) != big.subgroup(m + n))
    two = None
    if phi.is_automorphism:
        lhs = trajectory_sum(phi, F, m + 1, TWO_SIDED)
        rhs = trajectory_sum(phi, F, 2 * m + 1, FORWARD)
        inv = InverseEndo(phi)
        for _ in range(m):
            rhs = image(rhs, inv)
        two = lhs == rhs
    return TrajectoryShiftReport(m, n_max, not fails, fails, two)


def monotonicity_check(phi: Endomorphism, E: FiniteSubgroup, F: FiniteSubgroup,
                       n_max: int = 8) -> bool:
    """``E <= F`` implies ``|T^E_n| <= |T^F_n|`` for every ``n <= n_max``."""
    if not E.leq(F):
        raise GrexpandError("monotonicity needs E inside F")
    a = trajectory_table(phi, E, n_max, stop=False)
    b = trajectory_table(phi, F, n_max, stop=False)
    a.check_invariants()
    b.check_invariants()
    return all(x <= y for x, y in zip(a.orders, b.orders))


# -- absorbing witness for epimorphisms -----------------------------------------

@dataclass(frozen=True)
class WitnessReport:
    """Data of the absorbing subgroup ``K = T^S_{n+1}`` of a surjective map."""

    n: int
    lifted: FiniteSubgroup
    shift_identity: tuple  # (m, holds) for m = 0..m_cap
    power_identity: tuple  # (m, holds): phi^m K = T^S_{n+m+1}
    absorption: tuple  # (subgroup index, least m with F <= phi^m K or None)

    @property
    def holds(self) -> bool:
        return (all(ok for _, ok in self.shift_identity)
                and all(ok for _, ok in self.power_identity)
                and all(m is not None for _, m in self.absorption))

    def to_json(self):
        return {"n": self.n, "lifted": self.lifted.to_json(),
                "shift_identity": [[m, ok] for m, ok in self.shift_identity],
                "power_identity": [[m, ok] for m, ok in self.power_identity],
                "absorption": [[i, m] for i, m in self.absorption], "holds": self.holds}


def absorbing_witness(phi: Endomorphism, S: FiniteSubgroup, m_cap: int = 10,
                      test_subgroups: Sequence[FiniteSubgroup] | None = None,
                      absorb_cap: int | None = None):
    """Finite subgroup ``K`` such that every finite ``F`` lies in some ``phi^m K``.

    ``S_0 = phi^{-1}(S)`` is the preimage subgroup (so ``phi S_0 = S``),
    ``n`` the least index with ``S_0 <= sum_{k<=n} phi^k S`` and
    ``K = sum_{k<=n} phi^k S``. Checks, for ``m <= m_cap``::

        sum_{k=0}^{n+m} phi^k S == sum_{k=m}^{n+m} phi^k S == phi^m K
    """
    spec = phi.domain
    if not spec.is_finite or spec.has_free_part:
        raise GrexpandError("the witness is computed on finite torsion groups")
    G = full_subgroup(spec)
    if image(G, phi) != G:
        raise NotEpimorphism("phi is not surjective")
    cert = certify_positively_expansive_finite(phi, S)
    if not cert.positive:
        raise NotGenerator("S is not a positive generator")
    lifted = preimage(S, phi)
    if image(lifted, phi) != S:
        raise NotEpimorphism("phi(phi^{-1} S) differs from S")
    depth = m_cap + _chain_bound(spec) + 2
    table = trajectory_table(phi, S, depth, FORWARD, stop=False)
    table.check_invariants()
    n = next(i for i in range(len(table)) if lifted.leq(table.subgroup(i + 1)))
    K = table.subgroup(n + 1)
    # phi^k S for k = 0 .. n + m_cap
    powers = [S]
    for _ in range(n + m_cap):
        powers.append(image(powers[-1], phi))
    shift_ok, power_ok = [], []
    cur = K
    for m in range(m_cap + 1):
        lhs = table.subgroup(n + m + 1)
        tail = powers[m]
        for k in range(m + 1, n + m + 1):
            tail = tail + powers[k]
        shift_ok.append((m, lhs == tail))
        power_ok.append((m, cur == lhs))
        cur = image(cur, phi)
    if test_subgroups is None:
        test_subgroups = all_subgroups(spec)
    absorb_cap = spec.order if absorb_cap is None else absorb_cap
    absorption = []
    for idx, F in enumerate(test_subgroups):
        cur, hit = K, None
        for m in range(absorb_cap + 1):
            if F.leq(cur):
                hit = m
                break
            cur = image(cur, phi)
        absorption.append((idx, hit))
    return K, WitnessReport(n, lifted, tuple(shift_ok), tuple(power_ok), tuple(absorption))


# -- epimorphism audit ----------------------------------------------------------

@dataclass(frozen=True)
class AuditFinding:
    """One verdict of :func:`epi_audit`."""

    kind: str  # NotSurjective | GeneratorFails | NonTorsionAmbient | Inconsistent
    witness: Element | None = None
    target: int | None = None
    note: str = ""
    certificate: GeneratorCertificate | None = field(default=None, repr=False, compare=False)

    @property
    def is_violation(self) -> bool:
        return self.kind == "Inconsistent"

    def to_json(self):
        d = {"finding": self.kind}
        if self.witness is not None:
            d["witness"] = self.witness.to_json()
        if self.target is not None:
            d["target"] = self.target
        if self.note:
            d["note"] = self.note
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_json()
        return d


def epi_audit(phi: Endomorphism, S: FiniteSubgroup, window: int = DEFAULT_WINDOW,
              n_cap: int = DEFAULT_NCAP) -> AuditFinding:
    """Audit a would-be positively expansive epimorphism of an infinite family.

    Surjectivity is probed on the coordinate generators ``e_j`` of the
    window, searching preimages supported in ``window +- n_cap``.
    """
    spec = phi.domain
    if spec.is_finite:
        raise GrexpandError("the audit applies to indexed families")
    if spec.has_free_part:
        cert = check_generator_family(phi, S, window, n_cap, FORWARD)
        verdict = "positively generates" if cert.positive else "does not positively generate"
        return AuditFinding("NonTorsionAmbient",
                            note=f"ambient group is not torsion; S {verdict} t(G) on window {window}",
                            certificate=cert)
    targets = sorted(spec.torsion_indices(-window, window), key=lambda j: (abs(j), j))
    reach = FiniteSubgroup.from_generators(
        spec, [phi.apply(spec.basis_vector(k)) for k in spec.torsion_indices(-window - n_cap, window + n_cap)])
    for j in targets:
        e = spec.basis_vector(j)
        if not reach.member(e):
            return AuditFinding("NotSurjective", witness=e, target=j,
                                note=f"no preimage supported in [{-window - n_cap}, {window + n_cap}]")
    cert = check_generator_family(phi, S, window, n_cap, FORWARD)
    if not cert.positive:
        j = cert.failures[0]
        return AuditFinding("GeneratorFails", target=j,
                            note=f"C_{j} not reached within n_cap={n_cap}", certificate=cert)
    return AuditFinding("Inconsistent", certificate=cert,
                        note="every windowed check passed on an infinite torsion family; review manually")


# -- generator combinators --------------------------------------------------------

def _samples_for(spec: GroupSpec, count: int, seed: int):
    import random
    if spec.is_finite and not spec.has_free_part and spec.order <= max(count, 256):
        return enumerate_group(spec)
    rng = random.Random(seed)
    return [random_element(spec, rng) for _ in range(count)]


def factor_transport(pi: Hom, phi: Endomorphism, psi: Endomorphism, S: FiniteSubgroup,
                     samples: int = 128, seed: int = 0, side: str = FORWARD,
                     window: int = DEFAULT_WINDOW, n_cap: int = DEFAULT_NCAP):
    """``pi S`` as a generator candidate for the factor ``psi``; returns ``(pi S, certificate)``."""
    if pi.domain != phi.domain or pi.codomain != psi.domain:
        raise GrexpandError("pi must map phi's group onto psi's group")
    rep = check_intertwining(pi, phi, psi, _samples_for(phi.domain, samples, seed))
    if not rep.holds:
        raise IntertwiningFails("pi o phi differs from psi o pi", witness=rep.witness)
    T = image(S, pi)
    return T, certify(psi, T, side, window, n_cap)


@dataclass(frozen=True)
class CombinedGenerator:
    subgroup: FiniteSubgroup
    certificate: GeneratorCertificate
    parts: tuple = ()

    @property
    def verified(self) -> bool:
        return self.certificate.positive


def combine_sum_generators(phi: Endomorphism, H, S_H: FiniteSubgroup, K, S_K: FiniteSubgroup,
                           side: str = FORWARD, window: int = DEFAULT_WINDOW,
                           n_cap: int = DEFAULT_NCAP) -> CombinedGenerator:
    """``S_H + S_K`` for ``G = H + K`` with generators of the two restrictions.

    ``H`` and ``K`` are finite subgroups (finite specs) or divisor patterns
    (families, checked on the window).
    """
    spec = phi.domain
    if isinstance(H, FiniteSubgroup):
        for X, S_X in ((H, S_H), (K, S_K)):
            if not image(X, phi).leq(X):
                raise NotInvariant("a summand is not invariant")
            if not S_X.leq(X):
                raise GrexpandError("a generator leaves its summand")
            if trajectory_table(phi, S_X, _chain_bound(spec) + 2, side).final != X:
                raise NotGenerator("a summand generator does not generate its summand")
        if H + K != full_subgroup(spec):
            raise GrexpandError("H + K is not the whole group")
    else:
        a, b = H.window()
        c, d = K.window()
        for k in spec.torsion_indices(min(a, c), max(b, d)):
            if math.gcd(H.divisors(k), K.divisors(k), spec.modulus_at(k)) != 1:
                raise GrexpandError(f"the patterns do not cover coordinate {k}")
        for X, S_X in ((H, S_H), (K, S_K)):
            if not all(X.contains(g) for g in S_X.generators()):
                raise GrexpandError("a generator leaves its pattern")
    S = S_H + S_K
    return CombinedGenerator(S, certify(phi, S, side, window, n_cap), (S_H, S_K))


@dataclass(frozen=True)
class ExtensionGenerator:
    subgroup: FiniteSubgroup
    lifted: FiniteSubgroup
    lifts: tuple  # (quotient generator, chosen preimage)
    certificate: GeneratorCertificate


def extension_generator(phi: Endomorphism, H: FiniteSubgroup, S_H: FiniteSubgroup,
                        S_quot: FiniteSubgroup, side: str = FORWARD) -> ExtensionGenerator:
    """``S_H + S_0`` where ``S_0`` lifts a generator of the induced map on ``G/H``."""
    spec = phi.domain
    tilde, pi = quotient_endo(phi, H)
    if S_quot.spec != tilde.domain:
        raise GrexpandError("S_quot must live in the quotient spec")
    if not S_H.leq(H):
        raise GrexpandError("S_H must lie in H")
    if trajectory_table(phi, S_H, _chain_bound(spec) + 2, side).final != H:
        raise NotGenerator("S_H does not generate H under the restriction")
    if not certify_positively_expansive_finite(tilde, S_quot, side).positive:
        raise NotGenerator("S_quot does not generate the quotient")
    lifts = tuple((y, pi.lift(y)) for y in S_quot.generators())
    S0 = FiniteSubgroup.from_generators(spec, [x for _, x in lifts])
    if image(S0, pi) != S_quot:
        raise GrexpandError("lift does not project onto S_quot")
    S = S_H + S0
    cert = certify_positively_expansive_finite(phi, S, side)
    if not cert.positive:
        raise InvalidCertificate("the lifted sum is not a generator")
    return ExtensionGenerator(S, S0, lifts, cert)


def power_generator(phi: Endomorphism, S: FiniteSubgroup, n: int,
                    window: int = DEFAULT_WINDOW, n_cap: int = DEFAULT_NCAP,
                    certificate: GeneratorCertificate | None = None):
    """``sum_{|k| <= n} phi^k S`` from a generator ``S`` of ``phi^n``.

    Returns ``(candidate, certificate for phi)``; the certificate for
    ``phi^n`` is computed when not supplied.
    """
    if n < 1:
        raise GrexpandError("n must be positive")
    if not phi.is_automorphism:
        raise NotAutomorphism("the construction uses negative powers")
    pn = power(phi, n)
    if certificate is None:
        certificate = certify(pn, S, TWO_SIDED, window, n_cap)
    if not certificate.positive:
        raise NotGenerator("S is not a generator for phi^n")
    candidate = trajectory_sum(phi, S, n + 1, TWO_SIDED)
    cert = certify(phi, candidate, TWO_SIDED, window, n_cap)
    if not cert.positive:
        raise InvalidCertificate("the symmetric sum is not a generator")
    return candidate, cert


# -- restriction harness ----------------------------------------------------------

@dataclass(frozen=True)
class PatternVerdict:
    pattern: dict
    invariant: bool
    witness: int | None = None
    restricted_spec: dict | None = None
    certificate: GeneratorCertificate | None = None
    candidate: str | None = None

    @property
    def counterexample_candidate(self) -> bool:
        return self.invariant and self.certificate is not None and not self.certificate.positive

    def to_json(self):
        d = {"pattern": self.pattern, "invariant": self.invariant}
        if self.witness is not None:
            d["witness_index"] = self.witness
        if self.restricted_spec is not None:
            d["restricted_spec"] = self.restricted_spec
        if self.certificate is not None:
            d["certificate"] = self.certificate.to_json()
            d["candidate"] = self.candidate
        d["counterexample_candidate"] = self.counterexample_candidate
        return d


@dataclass(frozen=True)
class HarnessReport:
    side: str
    window: int
    n_cap: int
    baseline: GeneratorCertificate
    verdicts: tuple

    @property
    def verdict(self) -> str:
        if any(v.counterexample_candidate for v in self.verdicts):
            return "counterexample candidate found"
        return f"consistent at window {self.window}"

    def to_json(self):
        return {"side": self.side, "window": self.window, "n_cap": self.n_cap,
                "baseline": self.baseline.to_json(),
                "patterns": [v.to_json() for v in self.verdicts], "verdict": self.verdict}


def scale_subgroup(pattern: DivisorPatternSubgroup, S: FiniteSubgroup) -> FiniteSubgroup:
    """``d * S``: every generator multiplied coordinatewise by the divisors."""
    d = pattern.divisors
    return FiniteSubgroup.from_generators(
        S.spec, [Element(S.spec, [(k, d(k) * v) for k, v in g.coords]) for g in S.generators()])


def _restricted_certificate(phi, r, D, S, side, window, n_cap, enlarge):
    """Certificate for the first candidate generator of the restriction that passes.

    Tries ``d * S`` and then, if allowed, ``D ∩ T_w`` for ``w = 1 .. window + 1``.
    """
    cert = certify(r, r.pull_subgroup(scale_subgroup(D, S)), side, window, n_cap)
    if cert.positive or not enlarge:
        return cert, "d*S"
    for w in range(1, window + 2):
        T = trajectory_sum(phi, S, w, side)
        if not T.support:
            continue
        part = intersect(D.window_subgroup(T.support[0], T.support[-1]), T)
        c = certify(r, r.pull_subgroup(part), side, window, n_cap)
        if c.positive:
            return c, f"D∩T_{w}"
    return cert, "d*S"


def conjecture_harness(phi: Endomorphism, S: FiniteSubgroup,
                       patterns: Sequence[DivisorPatternSubgroup], window: int = DEFAULT_WINDOW,
                       n_cap: int = DEFAULT_NCAP, side: str = FORWARD,
                       enlarge: bool = True) -> HarnessReport:
    """Restrict ``phi`` to each invariant divisor pattern and test a generator there.

    The first candidate is ``d * S``; with ``enlarge`` the pattern's part
    of the trajectory window, ``D ∩ T_w``, is tried next. ``side=forward``
    probes positive expansivity of the restriction (the endomorphism
    statement); ``two-sided`` probes restrictions of automorphisms.
    """
    baseline = certify(phi, S, side, window, n_cap)
    verdicts = []
    for D in patterns:
        try:
            r = RestrictionEndo(phi, D)
        except NotInvariant as exc:
            verdicts.append(PatternVerdict(D.describe(), False, witness=exc.witness))
            continue
        if side == TWO_SIDED and not r.is_automorphism:
            verdicts.append(PatternVerdict(D.describe(), False, witness=None,
                                           restricted_spec=r.domain.to_dict()))
            continue
        cert, label = _restricted_certificate(phi, r, D, S, side, window, n_cap, enlarge)
        verdicts.append(PatternVerdict(D.describe(), True, restricted_spec=r.domain.to_dict(),
                                       certificate=cert, candidate=label))
    return HarnessReport(side, window, n_cap, baseline, tuple(verdicts))
