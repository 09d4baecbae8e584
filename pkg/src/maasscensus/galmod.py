"""Integer and F2 linear algebra, and F2[Z/3]-module decomposition.

Smith normal form with transforms, Hermite form, mod-p elimination, and the
decomposition of an F2-space with an order-3 operator into copies of the
2-dimensional simple module U2 plus trivial summands.
"""

from __future__ import annotations


# ---------------------------------------------------------------------------
# dense integer matrices as list-of-rows of Python ints

def mat_mul(a, b):
    if not a or not b:
        return []
    n, k, m = len(a), len(b), len(b[0])
    out = [[0] * m for _ in range(n)]
    for i in range(n):
        ra = a[i]
        oi = out[i]
        for t in range(k):
            c = ra[t]
            if c:
                rb = b[t]
                for j in range(m):
                    oi[j] += c * rb[j]
    return out

def mat_identity(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def smith_normal_form(mat):
    """Smith normal form over Z.

    Returns (d, U, V) with U*M*V diagonal, diag entries d (each dividing the
    next), U and V unimodular.  Pivots are chosen by least absolute value to
    limit coefficient growth.
    """
    m = [row[:] for row in mat]
    rows = len(m)
    cols = len(m[0]) if rows else 0
    U = mat_identity(rows)
    V = mat_identity(cols)

    def swap_rows(i, j):
        m[i], m[j] = m[j], m[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in m:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(src, dst, c):  # row dst += c * row src
        mr, ms = m[dst], m[src]
        for j in range(cols):
            mr[j] += c * ms[j]
        ur, us = U[dst], U[src]
        for j in range(rows):
            ur[j] += c * us[j]

    def add_col(src, dst, c):
        for r in m:
            r[dst] += c * r[src]
        for r in V:
            r[dst] += c * r[src]

    def negate_row(i):
        m[i] = [-x for x in m[i]]
        U[i] = [-x for x in U[i]]

    t = 0
    while t < min(rows, cols):
        # locate least-absolute-value nonzero pivot in the remaining block
        piv = None
        best = None
        for i in range(t, rows):
            for j in range(t, cols):
                v = m[i][j]
                if v and (best is None or abs(v) < best):
                    best = abs(v)
                    piv = (i, j)
                    if best == 1:
                        break
            if best == 1:
                break
        if piv is None:
            break
        swap_rows(t, piv[0])
        swap_cols(t, piv[1])
        while True:
            # clear column t
            again = False
            for i in range(t + 1, rows):
                if m[i][t]:
                    q = m[i][t] // m[t][t]
                    add_row(t, i, -q)
                    if m[i][t]:
                        swap_rows(t, i)
                        again = True
            if again:
                continue
            for j in range(t + 1, cols):
                if m[t][j]:
                    q = m[t][j] // m[t][t]
                    add_col(t, j, -q)
                    if m[t][j]:
                        swap_cols(t, j)
                        again = True
            if not again:
                break
        # divisibility sweep: pivot must divide every later entry
        d = m[t][t]
        bad = None
        for i in range(t + 1, rows):
            for j in range(t + 1, cols):
                if m[i][j] % d:
                    bad = i
                    break
            if bad is not None:
                break
        if bad is not None:
            add_row(bad, t, 1)
            continue
        if m[t][t] < 0:
            negate_row(t)
        t += 1
    d = [m[i][i] for i in range(min(rows, cols))]
    return d, U, V


def hnf_rows(mat, keep_zero_rows=False):
    """Row-style Hermite normal form (upper staircase, positive pivots,
    entries above a pivot reduced)."""
    m = [row[:] for row in mat if any(row)]
    if not m:
        return []
    cols = len(m[0])
    out = []
    col = 0
    while m and col < cols:
        nz = [r for r in m if r[col]]
        if not nz:
            col += 1
            continue
        while True:
            nz.sort(key=lambda r: abs(r[col]))
            piv = nz[0]
            done = True
            for r in nz[1:]:
                q = r[col] // piv[col]
                if q:
                    for j in range(col, cols):
                        r[j] -= q * piv[j]
                if r[col]:
                    done = False
            nz = [piv] + [r for r in nz[1:] if r[col]]
            if done or len(nz) == 1:
                break
        if piv[col] < 0:
            for j in range(cols):
                piv[j] = -piv[j]
        out.append(piv)
        m = [r for r in m if r is not piv and any(r)]
        col += 1
    # reduce entries above each pivot; ascending pivot order per row, so a
    # reduction never disturbs a column that was already normalised
    for k in range(len(out)):
        for i in range(k + 1, len(out)):
            pcol = next(j for j in range(cols) if out[i][j])
            q = out[k][pcol] // out[i][pcol]
            if q:
                for j in range(cols):
                    out[k][j] -= q * out[i][j]
    return out


def hnf_with_transform(mat):
    """Row HNF with the unimodular row transform: returns (H, T) with
    T*mat == H (H includes zero rows at the bottom)."""
    rows = len(mat)
    cols = len(mat[0]) if rows else 0
    m = [row[:] for row in mat]
    T = mat_identity(rows)
    r = 0
    for col in range(cols):
        piv = None
        for i in range(r, rows):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        while True:
            # pick the smallest |entry| in this column at or below r
            best, bi = None, None
            for i in range(r, rows):
                if m[i][col] and (best is None or abs(m[i][col]) < best):
                    best, bi = abs(m[i][col]), i
            m[r], m[bi] = m[bi], m[r]
            T[r], T[bi] = T[bi], T[r]
            done = True
            for i in range(r + 1, rows):
                if m[i][col]:
                    q = m[i][col] // m[r][col]
                    if q:
                        mi, mr = m[i], m[r]
                        for j in range(cols):
                            mi[j] -= q * mr[j]
                        ti, tr = T[i], T[r]
                        for j in range(rows):
                            ti[j] -= q * tr[j]
                    if m[i][col]:
                        done = False
            if done:
                break
        if m[r][col] < 0:
            m[r] = [-x for x in m[r]]
            T[r] = [-x for x in T[r]]
        for k in range(r):
            q = m[k][col] // m[r][col]
            if q:
                mk, mr = m[k], m[r]
                for j in range(cols):
                    mk[j] -= q * mr[j]
                tk, tr = T[k], T[r]
                for j in range(rows):
                    tk[j] -= q * tr[j]
        r += 1
    return m, T


def kernel_int(mat):
    """Z-basis of the integer (left) kernel {x : x * mat = 0} as rows."""
    H, T = hnf_with_transform(mat)
    out = []
    for i, row in enumerate(H):
        if not any(row):
            out.append(T[i])
    return out


def det_int(mat):
    from .exactarith import _bareiss_det

    return _bareiss_det(mat)


# ---------------------------------------------------------------------------
# mod-p elimination (used both for F2 work and large-prime rank checks)

def fp_rref(mat, p):
    """Reduced row echelon form mod p; returns (rref_rows, pivot_cols)."""
    m = [[x % p for x in row] for row in mat]
    m = [r for r in m if any(r)]
    cols = len(mat[0]) if mat else 0
    pivots = []
    r = 0
    for col in range(cols):
        piv = None
        for i in range(r, len(m)):
            if m[i][col]:
                piv = i
                break
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        inv = pow(m[r][col], -1, p)
        m[r] = [x * inv % p for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][col]:
                c = m[i][col]
                mi, mr = m[i], m[r]
                for j in range(col, cols):
                    if mr[j]:
                        mi[j] = (mi[j] - c * mr[j]) % p
        pivots.append(col)
        r += 1
        if r == len(m):
            break
    return m[:r], pivots


def fp_rank(mat, p):
    return len(fp_rref(mat, p)[0])


def fp_kernel(mat, p):
    """Basis of the right kernel {v : mat * v = 0} mod p, as rows."""
    if not mat:
        return []
    cols = len(mat[0])
    rref, pivots = fp_rref(mat, p)
    free = [j for j in range(cols) if j not in pivots]
    basis = []
    for fcol in free:
        v = [0] * cols
        v[fcol] = 1
        for i, pcol in enumerate(pivots):
            v[pcol] = (-rref[i][fcol]) % p
        basis.append(v)
    return basis


def fp_solve(mat, rhs, p):
    """One solution of mat * x = rhs mod p, or None."""
    if not mat:
        return None if any(c % p for c in rhs) else []
    cols = len(mat[0])
    aug = [row[:] + [r] for row, r in zip(mat, rhs)]
    rref, pivots = fp_rref(aug, p)
    x = [0] * cols
    for i, pcol in enumerate(pivots):
        if pcol == cols:
            return None  # inconsistent
        x[pcol] = rref[i][cols] % p
    return x


# ---------------------------------------------------------------------------
# F2[Z/3]-modules

def f2_module_decompose(sigma):
    """Split an F2-space with an order-3 operator into U2^k + trivial^m.

    sigma is the operator matrix over F2 (rows).  The trivial multiplicity is
    m = dim ker(sigma - 1); since the only simple F2[Z/3]-modules are the
    trivial one and the 2-dimensional U2 (with no nonzero fixed vector),
    k = (dim - m)/2.  Returns (k, m).
    """
    n = len(sigma)
    if n == 0:
        return 0, 0
    if any(len(r) != n for r in sigma):
        raise ValueError("square matrix required")
    s3 = _f2_matpow(sigma, 3)
    if s3 != mat_identity(n) and [[x % 2 for x in r] for r in s3] != mat_identity(n):
        raise ValueError("operator does not have order dividing 3")
    fixed = [[(sigma[i][j] - (1 if i == j else 0)) % 2 for j in range(n)] for i in range(n)]
    m = n - fp_rank(fixed, 2)
    if (n - m) % 2:
        raise ValueError("non-semisimple action: dim - fixed dim is odd")
    return (n - m) // 2, m


def u2_block_basis(sigma):
    """Basis of a fixed-point-free order-3 module as explicit U2 blocks.

    Returns k pairs (v, sigma v) of row vectors whose concatenation is a
    basis adapted to the U2 decomposition; vectors apply on the left
    (image of v is v @ sigma).  Requires the trivial multiplicity to be
    zero, which makes every greedy block automatically independent of the
    span of the previous ones.
    """
    n = len(sigma)
    k, m = f2_module_decompose(sigma)
    if m:
        raise ValueError("operator has nonzero fixed space")

    def apply(v):
        return [sum(v[i] & sigma[i][j] for i in range(n)) % 2 for j in range(n)]

    span = []  # rref rows

    def reduce(v):
        v = list(v)
        for row in span:
            piv = next(i for i, x in enumerate(row) if x)
            if v[piv]:
                v = [(a + b) % 2 for a, b in zip(v, row)]
        return v

    def insert(v):
        r = reduce(v)
        span.append(r)
        span.sort(key=lambda row: next(i for i, x in enumerate(row) if x))

    blocks = []
    for i in range(n):
        e = [1 if t == i else 0 for t in range(n)]
        if any(reduce(e)):
            w = apply(e)
            blocks.append((e, w))
            insert(e)
            insert(w)
        if len(blocks) == k:
            break
    assert len(blocks) == k
    return blocks


def _f2_matpow(mat, e):
    n = len(mat)
    out = mat_identity(n)
    b = [[x % 2 for x in r] for r in mat]
    while e:
        if e & 1:
            out = [[sum(out[i][t] & b[t][j] for t in range(n)) % 2 for j in range(n)] for i in range(n)]
        b2 = [[sum(b[i][t] & b[t][j] for t in range(n)) % 2 for j in range(n)] for i in range(n)]
        b = b2
        e >>= 1
    return out


def projective_count(q: int, k: int) -> int:
    """Number of points of the projective space P(F_q^k): (q^k - 1)/(q - 1)."""
    if k < 0:
        raise ValueError("negative dimension")
    if q < 2:
        raise ValueError("q must be a prime power >= 2")
    return (q**k - 1) // (q - 1)


def projective_point_count(k: int) -> int:
    """Number of lines in F2^k, i.e. 2^k - 1."""
    return projective_count(2, k)


def u2_submodule_count(k: int) -> int:
    """Number of U2-isomorphic submodules of U2^k.

    A U2-submodule of U2^k is the image of a nonzero module map U2 -> U2^k,
    and Hom(U2, U2^k) is a k-dimensional F4-vector space (the endomorphisms
    of U2 form F4, not F2).  Two maps have the same image exactly when they
    differ by Aut(U2) = F4^*, so the count is the number of F4-lines,
    (4^k - 1)/3.  Census form counts use projective_count(2, k) instead;
    the two agree at k = 1.
    """
    return projective_count(4, k)


def u2_submodule_count_exhaustive(k: int) -> int:
    """Count U2-submodules of U2^k by direct enumeration of planes.

    Independent of the closed formulas: lists every 2-dimensional subspace
    of F2^(2k), keeps the sigma-stable ones on which sigma has no nonzero
    fixed vector.  Practical for k <= 3.
    """
    if not 1 <= k <= 4:
        raise ValueError("exhaustive count supported for 1 <= k <= 4")
    n = 2 * k

    def sigma(v):
        out = []
        for i in range(k):
            a, b = v[2 * i], v[2 * i + 1]
            out.extend([b, (a + b) % 2])
        return tuple(out)

    vecs = [tuple((x >> i) & 1 for i in range(n)) for x in range(1, 2**n)]
    seen = set()
    count = 0
    for i, v in enumerate(vecs):
        for w in vecs[i + 1:]:
            span = frozenset(
                tuple((a * vi + b * wi) % 2 for vi, wi in zip(v, w))
                for a in range(2)
                for b in range(2)
            )
            if len(span) != 4 or span in seen:
                continue
            seen.add(span)
            if not all(sigma(u) in span for u in span):
                continue
            if any(sigma(u) == u for u in span if any(u)):
                continue
            count += 1
    return count
