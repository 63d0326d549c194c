"""Brute-force reference computations.

Nothing here uses the lattice machinery: groups are tuples of residues,
subgroups are Python sets or bitmasks over an explicit element list.
"""

from __future__ import annotations

import itertools
from typing import Sequence

import numpy as np


def elements(moduli: Sequence[int]) -> list[tuple[int, ...]]:
    return list(itertools.product(*(range(m) for m in moduli)))


def add(moduli, x, y):
    return tuple((a + b) % m for a, b, m in zip(x, y, moduli))


def apply_matrix(moduli, A, x):
    s = len(moduli)
    return tuple(sum(A[i][j] * x[j] for j in range(s)) % moduli[i] for i in range(s))


def closure(moduli, gens) -> frozenset:
    """Subgroup generated by ``gens`` via repeated addition."""
    zero = tuple(0 for _ in moduli)
    out = {zero}
    frontier = [zero]
    gens = [tuple(g) for g in gens]
    while frontier:
        nxt = []
        for x in frontier:
            for g in gens:
                y = add(moduli, x, g)
                if y not in out:
                    out.add(y)
                    nxt.append(y)
        frontier = nxt
    return frozenset(out)


def sumset(moduli, a, b) -> frozenset:
    return frozenset(add(moduli, x, y) for x in a for y in b)


def forward_closure(moduli, A, S, two_sided_inverse=None, limit=None):
    """Set-level trajectory of ``S``: returns ``(orders, n_star, final set)``."""
    S = frozenset(S)
    cur = S
    orders = [len(cur)]
    limit = limit or (len(elements(moduli)) + 2)
    for n in range(1, limit):
        img = frozenset(apply_matrix(moduli, A, x) for x in cur)
        if two_sided_inverse is None:
            nxt = sumset(moduli, S, img)
        else:
            back = frozenset(apply_matrix(moduli, two_sided_inverse, x) for x in cur)
            nxt = sumset(moduli, sumset(moduli, cur, img), back)
        if nxt == cur:
            return orders, n, cur
        orders.append(len(nxt))
        cur = nxt
    return orders, None, cur


def annihilator_set(moduli, H) -> frozenset:
    E = 1
    for m in moduli:
        E = E * m // np.gcd(E, m)
    E = int(E)
    out = []
    for a in elements(moduli):
        if all(sum((E // m) * x * y for m, x, y in zip(moduli, h, a)) % E == 0 for h in H):
            out.append(a)
    return frozenset(out)


def preimage_set(moduli, A, H) -> frozenset:
    return frozenset(x for x in elements(moduli) if apply_matrix(moduli, A, x) in H)


def all_subgroup_sets(moduli) -> set[frozenset]:
    """All subgroups as element sets: joins of cyclic subgroups."""
    cyc = {closure(moduli, [x]) for x in elements(moduli)}
    found = set(cyc)
    frontier = list(cyc)
    while frontier:
        nxt = []
        for h in frontier:
            for c in cyc:
                if c <= h:
                    continue
                k = sumset(moduli, h, c)
                if k not in found:
                    found.add(k)
                    nxt.append(k)
        frontier = nxt
    return found


class BitmaskGroup:
    """Vectorized closure oracle for groups of order at most 64.

    Elements are indexed in mixed radix; a subgroup is a ``uint64`` mask.
    Translation by an element is a bit permutation, tabulated per byte.
    """

    def __init__(self, moduli: Sequence[int]):
        self.moduli = tuple(moduli)
        self.elems = elements(self.moduli)
        self.N = len(self.elems)
        if self.N > 64:
            raise ValueError("bitmask oracle supports groups of order <= 64")
        self.index = {x: i for i, x in enumerate(self.elems)}
        self.nbytes = (self.N + 7) // 8
        self.full = (1 << self.N) - 1
        table = np.zeros((self.N, self.nbytes, 256), dtype=np.uint64)
        for a in range(self.N):
            for b in range(self.nbytes):
                for v in range(256):
                    out = 0
                    for bit in range(8):
                        x = 8 * b + bit
                        if x < self.N and (v >> bit) & 1:
                            out |= 1 << self.index[add(self.moduli, self.elems[a], self.elems[x])]
                    table[a, b, v] = out
        self.table = table

    def mask(self, subset) -> int:
        out = 0
        for x in subset:
            out |= 1 << self.index[tuple(x)]
        return out

    def image_table(self, matrices) -> np.ndarray:
        """``[e, x] -> index of A_e x``."""
        out = np.empty((len(matrices), self.N), dtype=np.uint64)
        for e, A in enumerate(matrices):
            for x, el in enumerate(self.elems):
                out[e, x] = self.index[apply_matrix(self.moduli, A, el)]
        return out

    def _image(self, T, img):
        out = np.zeros_like(T)
        one = np.uint64(1)
        for x in range(self.N):
            bit = (T >> np.uint64(x)) & one
            out |= bit << img[:, x][:, None]
        return out

    def _translate(self, T, a):
        out = np.zeros_like(T)
        for b in range(self.nbytes):
            byte = ((T >> np.uint64(8 * b)) & np.uint64(255)).astype(np.intp)
            out |= self.table[a, b][byte]
        return out

    def _sum(self, A, B):
        """Sumset of subgroup masks, elementwise."""
        out = np.zeros_like(A)
        one = np.uint64(1)
        for a in range(self.N):
            has = ((A >> np.uint64(a)) & one).astype(bool)
            if has.any():
                out |= np.where(has, self._translate(B, a), np.uint64(0))
        return out

    def forward_closures(self, matrices, masks, inverses=None):
        """For every (endomorphism, subgroup) pair: ``(n_star, final mask)`` arrays.

        ``n_star`` is the least ``n`` with ``T_{n+1} = T_n``.
        """
        img = self.image_table(matrices)
        inv = self.image_table(inverses) if inverses is not None else None
        F = np.broadcast_to(np.asarray(masks, dtype=np.uint64)[None, :],
                            (len(matrices), len(masks))).copy()
        T = F.copy()
        n_star = np.zeros(T.shape, dtype=np.int64)
        for n in range(1, self.N + 2):
            I = self._image(T, img)
            if inv is None:
                nxt = self._sum(F, I)
            else:
                nxt = self._sum(self._sum(T, I), self._image(T, inv))
            done = (nxt == T) & (n_star == 0)
            n_star[done] = n
            if (n_star > 0).all():
                break
            T = nxt
        return n_star, T
