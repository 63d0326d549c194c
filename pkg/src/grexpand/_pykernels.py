"""Pure-Python lattice kernels.

Every lattice handled here contains the relation lattice spanned by
``m_i * e_i``, so column ``i`` may be reduced modulo ``m_i`` at any time.
This keeps entries bounded and makes the Hermite normal form unique.
The compiled module ``_ckernels`` implements the same functions with the
same signatures; this one is the arbitrary-precision reference.
"""

from __future__ import annotations


def _xgcd(a: int, b: int) -> tuple[int, int, int]:
    x0, y0, x1, y1 = 1, 0, 0, 1
    while b:
        q, r = divmod(a, b)
        a, b = b, r
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        return -a, -x0, -y0
    return a, x0, y0


def hnf_mod(rows, moduli):
    """Row HNF of ``span(rows) + span(m_i e_i)``.

    Returns ``s`` rows forming an upper-triangular basis with positive
    pivots (each dividing its modulus) and entries above every pivot
    reduced into ``[0, pivot)``. All moduli must be positive.
    """
    s = len(moduli)
    work = []
    for row in rows:
        w = [row[k] % moduli[k] for k in range(s)]
        if any(w):
            work.append(w)
    basis = []
    for j in range(s):
        mj = moduli[j]
        p = [0] * s
        p[j] = mj
        survivors = []
        for w in work:
            b = w[j]
            if b:
                a = p[j]
                g, x, y = _xgcd(a, b)
                ag, bg = a // g, b // g
                new_p = [0] * s
                new_w = [0] * s
                new_p[j] = g
                for k in range(j + 1, s):
                    mk = moduli[k]
                    new_p[k] = (x * p[k] + y * w[k]) % mk
                    new_w[k] = (bg * p[k] - ag * w[k]) % mk
                p = new_p
                w = new_w
            if any(w):
                survivors.append(w)
        work = survivors
        basis.append(p)
    for j in range(s):
        pj = basis[j][j]
        for i in range(j):
            bi = basis[i]
            q = bi[j] // pj
            if q:
                bj = basis[j]
                bi[j] -= q * pj
                for k in range(j + 1, s):
                    bi[k] = (bi[k] - q * bj[k]) % moduli[k]
    return basis


def reduce_vector(basis, moduli, vec):
    """Return the remainder of ``vec`` against an HNF basis, or None if zero."""
    s = len(moduli)
    v = [vec[k] % moduli[k] for k in range(s)]
    for j in range(s):
        if v[j]:
            pj = basis[j][j]
            q, r = divmod(v[j], pj)
            if r:
                return v
            bj = basis[j]
            v[j] = 0
            for k in range(j + 1, s):
                v[k] = (v[k] - q * bj[k]) % moduli[k]
    return None


def is_member(basis, moduli, vec) -> bool:
    return reduce_vector(basis, moduli, vec) is None


def _image_rows(A, moduli, rows):
    s = len(moduli)
    out = []
    for r in rows:
        img = []
        for i in range(s):
            Ai = A[i]
            acc = 0
            for j in range(s):
                if r[j]:
                    acc += Ai[j] * r[j]
            img.append(acc % moduli[i])
        out.append(img)
    return out


def trajectory(moduli, A, F_rows, n_max, A_inv=None, stop=True, extra=0):
    """HNF bases of the trajectory sums ``T_1, ..., T_n``.

    Forward (``A_inv`` is None): ``T_1 = F`` and ``T_{n+1} = F + A T_n``.
    Two-sided: ``T_{n+1} = T_n + A T_n + A_inv T_n``.
    With ``stop`` the iteration ends ``extra`` steps after the first ``n``
    with ``T_{n+1} == T_n`` (the repeated bases are included).
    """
    f_basis = hnf_mod(F_rows, moduli)
    bases = [f_basis]
    cur = f_basis
    stop_at = n_max
    while len(bases) < stop_at:
        img = _image_rows(A, moduli, cur)
        if A_inv is None:
            nxt = hnf_mod(f_basis + img, moduli)
        else:
            nxt = hnf_mod(cur + img + _image_rows(A_inv, moduli, cur), moduli)
        bases.append(nxt)
        if stop and stop_at == n_max and nxt == cur:
            stop_at = min(n_max, len(bases) + extra)
        cur = nxt
    return bases


def chain_violation(moduli, bases) -> int:
    """First ``i`` with ``bases[i]`` not inside ``bases[i+1]``, or -1."""
    for i in range(len(bases) - 1):
        nxt = bases[i + 1]
        for row in bases[i]:
            if reduce_vector(nxt, moduli, row) is not None:
                return i
    return -1
