"""Integer linear algebra on top of the HNF kernel.

Smith normal form comes from sympy; it is only needed for quotients and
invariant-factor decompositions, never in inner loops.
"""

from __future__ import annotations

from fractions import Fraction

from sympy import Matrix
from sympy.matrices.normalforms import smith_normal_decomp
from sympy.polys.domains import ZZ

from . import kernels
from .errors import GrexpandError
from .groups import Element, GroupSpec


def smith(rows: list[list[int]], ncols: int):
    """Return ``(diag, U, V)`` with ``U * N * V`` diagonal, ``diag`` of length ``ncols``.

    Missing or zero diagonal entries are reported as 0 (free summands).
    """
    if not rows:
        return [0] * ncols, [], [[int(i == j) for j in range(ncols)] for i in range(ncols)]
    d, u, v = smith_normal_decomp(Matrix(rows), domain=ZZ)
    diag = [abs(int(d[i, i])) if i < d.rows else 0 for i in range(ncols)]
    return diag, [[int(x) for x in u.row(i)] for i in range(u.rows)], \
        [[int(x) for x in v.row(i)] for i in range(v.rows)]


def integer_inverse(m: list[list[int]]) -> list[list[int]]:
    inv = Matrix(m).inv()
    out = [[int(x) for x in inv.row(i)] for i in range(inv.rows)]
    return out


def matrix_of(phi) -> list[list[int]]:
    """Matrix ``A`` with ``phi(x) = A x`` on a finite spec (columns are images of e_j)."""
    spec = phi.domain
    s = len(spec.moduli)
    cols = [phi.apply(spec.basis_vector(j)).dense() for j in range(s)]
    return [[cols[j][i] for j in range(s)] for i in range(s)]


def solve(A: list[list[int]], moduli: list[int], b: list[int]):
    """Some ``x`` with ``A x ≡ b`` (coordinatewise modulo ``moduli``), or None.

    Works on torsion specs, where the map must already be well defined.
    """
    s = len(moduli)
    if s == 0:
        return []
    rows = []
    for j in range(s):
        unit = [0] * s
        unit[j] = 1
        rows.append([A[i][j] for i in range(s)] + unit)
    mods = list(moduli) + list(moduli)
    basis = kernels.hnf_mod(rows, mods)
    v = [b[i] % moduli[i] for i in range(s)] + [0] * s
    for j in range(s):
        if v[j]:
            pj = basis[j][j]
            q, r = divmod(v[j], pj)
            if r:
                return None
            row = basis[j]
            for k in range(j, 2 * s):
                v[k] = (v[k] - q * row[k]) % mods[k]
    return [(-v[s + i]) % moduli[i] for i in range(s)]


def invariant_decomposition(h):
    """Invariant factors ``e_1 | ... | e_r`` of ``h`` and elements generating each summand.

    ``h ≅ ⊕ Z_{e_t}`` with ``generators[t]`` of order ``e_t`` and the
    summands independent.
    """
    s = len(h.support)
    if s == 0:
        return [], []
    basis = [list(r) for r in h.basis]
    mods = h.moduli
    # relation rows m_i e_i expressed in the lattice basis: diag(m) * basis^{-1}
    inv = [[Fraction(x) for x in row] for row in Matrix(basis).inv().tolist()]
    rel = []
    for i in range(s):
        row = [mods[i] * inv[i][j] for j in range(s)]
        if any(x.denominator != 1 for x in row):
            raise GrexpandError("relation lattice is not inside the subgroup lattice")
        rel.append([int(x) for x in row])
    diag, _u, v = smith(rel, s)
    vinv = integer_inverse(v)
    factors, gens = [], []
    for t in range(s):
        if diag[t] == 1:
            continue
        coeff = vinv[t]
        vec = [sum(coeff[i] * basis[i][k] for i in range(s)) for k in range(s)]
        gens.append(Element(h.spec, [(h.support[k], vec[k]) for k in range(s)]))
        factors.append(diag[t])
    return factors, gens


def quotient_data(spec: GroupSpec, rows: list[list[int]]):
    """Presentation of ``Z^s / (rows + relations)``.

    Returns ``(moduli, kept, V, Vinv)``: the quotient has the listed moduli,
    ``x ↦ (x V)[kept]`` is the projection and ``y ↦ y' Vinv`` a section.
    """
    s = len(spec.moduli)
    rel = [list(r) for r in rows]
    for i, m in enumerate(spec.moduli):
        if m:
            unit = [0] * s
            unit[i] = m
            rel.append(unit)
    diag, _u, v = smith(rel, s)
    kept = [i for i in range(s) if diag[i] != 1]
    return [diag[i] for i in kept], kept, v, integer_inverse(v) if s else []
