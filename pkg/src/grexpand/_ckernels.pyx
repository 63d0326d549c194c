# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled lattice kernels (int64). Same contract as ``_pykernels``.

Callers must keep every modulus below ``2**30`` so that the products
formed during elimination stay inside 64 bits; ``grexpand.kernels``
routes larger moduli to the pure-Python implementation.
"""

from libc.stdlib cimport malloc, free
from libc.string cimport memset, memcpy, memcmp

ctypedef long long i64


cdef inline i64 _mod(i64 v, i64 m) nogil:
    v = v % m
    if v < 0:
        v += m
    return v


cdef inline i64 _xgcd(i64 a, i64 b, i64* x, i64* y) nogil:
    cdef i64 x0 = 1, y0 = 0, x1 = 0, y1 = 1, q, t
    while b != 0:
        q = a // b
        t = a - q * b
        a = b
        b = t
        t = x0 - q * x1
        x0 = x1
        x1 = t
        t = y0 - q * y1
        y0 = y1
        y1 = t
    if a < 0:
        x[0] = -x0
        y[0] = -y0
        return -a
    x[0] = x0
    y[0] = y0
    return a


cdef void _hnf(i64* work, int nrows, const i64* mod, int s, i64* basis) nogil:
    """In-place elimination; ``work`` (nrows x s) is clobbered."""
    cdef int j, k, r, i, nact
    cdef i64 a, b, g, x, y, ag, bg, pk, wk, q, pj
    cdef i64* p
    cdef i64* w
    memset(basis, 0, s * s * sizeof(i64))
    nact = nrows
    for j in range(s):
        p = basis + j * s
        p[j] = mod[j]
        r = 0
        while r < nact:
            w = work + r * s
            b = w[j]
            if b != 0:
                a = p[j]
                g = _xgcd(a, b, &x, &y)
                ag = a // g
                bg = b // g
                p[j] = g
                w[j] = 0
                for k in range(j + 1, s):
                    pk = p[k]
                    wk = w[k]
                    p[k] = _mod(x * pk + y * wk, mod[k])
                    w[k] = _mod(bg * pk - ag * wk, mod[k])
            # drop rows that became zero
            for k in range(j + 1, s):
                if w[k] != 0:
                    break
            else:
                nact -= 1
                if r != nact:
                    memcpy(w, work + nact * s, s * sizeof(i64))
                continue
            r += 1
    for j in range(s):
        pj = basis[j * s + j]
        for i in range(j):
            q = basis[i * s + j] // pj
            if q != 0:
                basis[i * s + j] -= q * pj
                for k in range(j + 1, s):
                    basis[i * s + k] = _mod(basis[i * s + k] - q * basis[j * s + k], mod[k])


cdef i64* _load_rows(rows, int s, const i64* mod, int* nrows) except NULL:
    cdef int n = len(rows)
    cdef i64* buf = <i64*> malloc((n if n > 0 else 1) * s * sizeof(i64) + sizeof(i64))
    cdef int r, k
    if buf == NULL:
        raise MemoryError()
    for r in range(n):
        row = rows[r]
        for k in range(s):
            buf[r * s + k] = _mod(row[k], mod[k])
    nrows[0] = n
    return buf


cdef list _dump(const i64* basis, int s):
    cdef int i, k
    return [[basis[i * s + k] for k in range(s)] for i in range(s)]


def hnf_mod(rows, moduli):
    cdef int s = len(moduli)
    cdef int n, k
    cdef i64* mod = <i64*> malloc((s + 1) * sizeof(i64))
    cdef i64* work = NULL
    cdef i64* basis = <i64*> malloc((s * s + 1) * sizeof(i64))
    try:
        for k in range(s):
            mod[k] = moduli[k]
        work = _load_rows(rows, s, mod, &n)
        _hnf(work, n, mod, s, basis)
        return _dump(basis, s)
    finally:
        free(mod)
        free(basis)
        if work != NULL:
            free(work)


def reduce_vector(basis, moduli, vec):
    cdef int s = len(moduli)
    cdef int j, k
    cdef i64 q, pj, m
    v = [vec[k] % moduli[k] for k in range(s)]
    for j in range(s):
        if v[j]:
            bj = basis[j]
            pj = bj[j]
            q = v[j] // pj
            if v[j] - q * pj != 0:
                return v
            v[j] = 0
            for k in range(j + 1, s):
                m = moduli[k]
                v[k] = _mod(<i64> v[k] - q * <i64> bj[k], m)
    return None


def is_member(basis, moduli, vec):
    return reduce_vector(basis, moduli, vec) is None


cdef void _image(const i64* A, const i64* rows, int nrows, const i64* mod, int s, i64* out) nogil:
    cdef int r, i, j
    cdef i64 acc, v
    for r in range(nrows):
        for i in range(s):
            acc = 0
            for j in range(s):
                v = rows[r * s + j]
                if v != 0:
                    acc = _mod(acc + A[i * s + j] * v, mod[i])
            out[r * s + i] = acc


def trajectory(moduli, A, F_rows, n_max, A_inv=None, stop=True, extra=0):
    cdef int s = len(moduli)
    cdef int nf, k, i, j, nrows, steps = 1
    cdef int two_sided = A_inv is not None
    cdef int do_stop = 1 if stop else 0
    cdef int cap = n_max
    cdef int n_extra = extra
    cdef int stopped = 0
    cdef size_t sq = s * s + 1
    cdef i64* mod = <i64*> malloc((s + 1) * sizeof(i64))
    cdef i64* Am = <i64*> malloc(sq * sizeof(i64))
    cdef i64* Ai = <i64*> malloc(sq * sizeof(i64))
    cdef i64* fb = <i64*> malloc(sq * sizeof(i64))
    cdef i64* cur = <i64*> malloc(sq * sizeof(i64))
    cdef i64* nxt = <i64*> malloc(sq * sizeof(i64))
    cdef i64* work = <i64*> malloc((3 * s * s + 1) * sizeof(i64))
    cdef i64* fwork = NULL
    out = []
    try:
        for k in range(s):
            mod[k] = moduli[k]
        for i in range(s):
            for j in range(s):
                Am[i * s + j] = _mod(A[i][j], mod[i])
                if two_sided:
                    Ai[i * s + j] = _mod(A_inv[i][j], mod[i])
        fwork = _load_rows(F_rows, s, mod, &nf)
        _hnf(fwork, nf, mod, s, fb)
        memcpy(cur, fb, s * s * sizeof(i64))
        out.append(_dump(fb, s))
        while steps < cap:
            if two_sided:
                memcpy(work, cur, s * s * sizeof(i64))
                _image(Am, cur, s, mod, s, work + s * s)
                _image(Ai, cur, s, mod, s, work + 2 * s * s)
                nrows = 3 * s
            else:
                memcpy(work, fb, s * s * sizeof(i64))
                _image(Am, cur, s, mod, s, work + s * s)
                nrows = 2 * s
            _hnf(work, nrows, mod, s, nxt)
            steps += 1
            out.append(_dump(nxt, s))
            if do_stop and not stopped and memcmp(nxt, cur, s * s * sizeof(i64)) == 0:
                stopped = 1
                if steps + n_extra < cap:
                    cap = steps + n_extra
            memcpy(cur, nxt, s * s * sizeof(i64))
        return out
    finally:
        free(mod)
        free(Am)
        free(Ai)
        free(fb)
        free(cur)
        free(nxt)
        free(work)
        if fwork != NULL:
            free(fwork)


def chain_violation(moduli, bases):
    cdef int s = len(moduli)
    cdef int n = len(bases)
    cdef int i, r, j, k
    cdef i64 q, pj
    cdef i64* mod = <i64*> malloc((s + 1) * sizeof(i64))
    cdef i64* buf = <i64*> malloc((n * s * s + 1) * sizeof(i64))
    cdef i64* v = <i64*> malloc((s + 1) * sizeof(i64))
    cdef i64* nb
    try:
        for k in range(s):
            mod[k] = moduli[k]
        for i in range(n):
            b = bases[i]
            for r in range(s):
                row = b[r]
                for k in range(s):
                    buf[(i * s + r) * s + k] = row[k]
        for i in range(n - 1):
            nb = buf + (i + 1) * s * s
            for r in range(s):
                memcpy(v, buf + (i * s + r) * s, s * sizeof(i64))
                for j in range(s):
                    if v[j] != 0:
                        pj = nb[j * s + j]
                        q = v[j] // pj
                        if v[j] - q * pj != 0:
                            return i
                        v[j] = 0
                        for k in range(j + 1, s):
                            v[k] = _mod(v[k] - q * nb[j * s + k], mod[k])
        return -1
    finally:
        free(mod)
        free(buf)
        free(v)
