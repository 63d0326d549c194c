"""Deterministic corpora of finite groups, endomorphisms and subgroups."""

from __future__ import annotations

import itertools
import math
import random
from typing import Iterator

from .endo import MatrixEndo
from .groups import GroupSpec
from .subgroup import FiniteSubgroup


def _partitions(n: int, largest: int | None = None) -> Iterator[tuple[int, ...]]:
    largest = n if largest is None else largest
    if n == 0:
        yield ()
        return
    for first in range(min(n, largest), 0, -1):
        for rest in _partitions(n - first, first):
            yield (first,) + rest


def _factor(n: int) -> dict[int, int]:
    out, p = {}, 2
    while p * p <= n:
        while n % p == 0:
            out[p] = out.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def invariant_factor_lists(order: int) -> list[tuple[int, ...]]:
    """Every abelian group of the given order as ``e_1 | e_2 | ... | e_r``."""
    if order == 1:
        return [()]
    per_prime = []
    for p, a in sorted(_factor(order).items()):
        per_prime.append([(p, part) for part in _partitions(a)])
    out = []
    for choice in itertools.product(*per_prime):
        r = max(len(part) for _, part in choice)
        factors = [1] * r
        for p, part in choice:
            # largest exponent goes to the last invariant factor
            for t, e in enumerate(part):
                factors[r - 1 - t] *= p ** e
        out.append(tuple(factors))
    return sorted(out)


def groups_up_to(max_order: int, include_trivial: bool = True) -> list[GroupSpec]:
    out = []
    for n in range(1 if include_trivial else 2, max_order + 1):
        out.extend(GroupSpec.finite(f) for f in invariant_factor_lists(n))
    return out


def entry_choices(moduli, i: int, j: int) -> range:
    """Admissible residues ``a`` for entry ``(i, j)``: ``m_i | m_j a``, ``0 <= a < m_i``."""
    mi, mj = moduli[i], moduli[j]
    step = mi // math.gcd(mi, mj)
    return range(0, mi, step)


def endomorphism_count(spec: GroupSpec) -> int:
    m = spec.moduli
    return math.prod(math.gcd(a, b) for a in m for b in m)


def matrix_tuples(spec: GroupSpec) -> Iterator[tuple[tuple[int, ...], ...]]:
    """All well-defined matrices of a finite torsion spec, in lexicographic order."""
    m = spec.moduli
    s = len(m)
    cells = [entry_choices(m, i, j) for i in range(s) for j in range(s)]
    for vals in itertools.product(*cells):
        yield tuple(tuple(vals[i * s:(i + 1) * s]) for i in range(s))


def matrix_endomorphisms(spec: GroupSpec) -> Iterator[MatrixEndo]:
    for A in matrix_tuples(spec):
        yield MatrixEndo(spec, A)


def random_matrix(spec: GroupSpec, rng: random.Random):
    m = spec.moduli
    s = len(m)
    return tuple(tuple(rng.choice(entry_choices(m, i, j)) for j in range(s)) for i in range(s))


def random_endomorphism(spec: GroupSpec, rng: random.Random) -> MatrixEndo:
    return MatrixEndo(spec, random_matrix(spec, rng))


def random_automorphism(spec: GroupSpec, rng: random.Random, tries: int = 10_000) -> MatrixEndo:
    for _ in range(tries):
        phi = random_endomorphism(spec, rng)
        if phi.is_automorphism:
            return phi
    raise RuntimeError("no automorphism found")  # pragma: no cover


def random_subgroup(spec: GroupSpec, rng: random.Random, max_gens: int = 2) -> FiniteSubgroup:
    gens = [spec.vector([rng.randrange(m) for m in spec.moduli])
            for _ in range(rng.randint(0, max_gens))]
    return FiniteSubgroup.from_generators(spec, gens)


def random_group(rng: random.Random, max_order: int, min_order: int = 2) -> GroupSpec:
    choices = [g for g in groups_up_to(max_order, include_trivial=False) if g.order >= min_order]
    return rng.choice(choices)


def matmul(spec: GroupSpec, A, B):
    """Matrix of the composition ``A o B`` reduced row-wise."""
    m = spec.moduli
    s = len(m)
    return tuple(tuple(sum(A[i][k] * B[k][j] for k in range(s)) % m[i] for j in range(s))
                 for i in range(s))


def conjugation_classes(spec: GroupSpec, matrices, rng: random.Random, n_auts: int = 4):
    """Partition matrices into classes closed under ``A -> T A T^{-1}``.

    ``T`` runs over a few random automorphisms; the classes are orbits of
    the subgroup they generate, so every class lies in a single
    ``Aut(G)``-conjugacy class (possibly several classes per orbit).
    Returns ``(representatives, class_of)``.
    """
    matrices = list(matrices)
    index = {A: i for i, A in enumerate(matrices)}
    parent = list(range(len(matrices)))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    auts = [random_automorphism(spec, rng) for _ in range(n_auts)] if spec.moduli else []
    pairs = [(T.A, T.inverse().A) for T in auts]
    for i, A in enumerate(matrices):
        for T, Tinv in pairs:
            j = index[matmul(spec, matmul(spec, T, A), Tinv)]
            a, b = find(i), find(j)
            if a != b:
                parent[max(a, b)] = min(a, b)
    roots = sorted({find(i) for i in range(len(matrices))})
    return [matrices[r] for r in roots], [find(i) for i in range(len(matrices))]
