"""Brute-force class group oracle for cyclic cubic fields.

Everything is done by direct enumeration, with no relation matrices and no
analytic class number input, so the results are independent of the main
engine:

  * units come from explicit cyclotomic constructions inside Z[x]/Phi_m(x),
  * the unit lattice gives a covering-radius bound, which turns ideal
    principality into a finite certified lattice search,
  * classes are found by testing all ideals up to the Minkowski bound
    pairwise, and the group structure by composing representatives.

Only practical for small conductors; the acceptance suite runs it below 200.
"""

from __future__ import annotations

import math
from fractions import Fraction

import mpmath
import numpy as np

from maasscensus.exactarith import IntPoly, primes_up_to
from maasscensus.fields import _index3_subgroup_characters
from maasscensus.numfield import Ideal, NumberField, find_automorphisms, prime_decomposition


def cyclotomic_poly(m: int) -> IntPoly:
    """Phi_m via prod over d | m of (x^d - 1)^mu(m/d)."""
    num = IntPoly.of(1)
    den = IntPoly.of(1)
    for d in range(1, m + 1):
        if m % d:
            continue
        mu = _moebius(m // d)
        if mu == 0:
            continue
        xd1 = IntPoly.from_list([-1] + [0] * (d - 1) + [1])
        if mu == 1:
            num = num * xd1
        else:
            den = den * xd1
    q, r = num.divmod_exact(den)
    assert r.is_zero
    return q


def _moebius(n: int) -> int:
    out = 1
    d = 2
    while d * d <= n:
        if n % d == 0:
            n //= d
            if n % d == 0:
                return 0
            out = -out
        d += 1
    if n > 1:
        out = -out
    return out


def _poly_mod(f: IntPoly, phi: IntPoly) -> IntPoly:
    if f.degree < phi.degree:
        return f
    _, r = f.divmod_exact(phi)
    return r


def _find_subgroup(nf: NumberField, m: int):
    """Recover the index-3 subgroup H whose periods generate this field."""
    chars = _index3_subgroup_characters(m)
    with mpmath.workdps(40):
        for chi in chars:
            eta = mpmath.mpf(0)
            for t in range(1, m):
                if math.gcd(t, m) == 1 and chi(t) == 0:
                    eta += mpmath.cos(2 * mpmath.pi * t / m)
            val = sum(mpmath.mpf(c) * eta**i for i, c in enumerate(nf.f.coeffs))
            if abs(val) < mpmath.mpf(10) ** -15:
                return sorted(
                    t for t in range(1, m) if math.gcd(t, m) == 1 and chi(t) == 0
                )
    raise AssertionError("field does not match any period construction")


def cyclotomic_units(nf: NumberField, m: int):
    """Two independent explicit units of the cyclic cubic of conductor m."""
    H = _find_subgroup(nf, m)
    phi_m = cyclotomic_poly(m)
    phideg = phi_m.degree

    def u_poly(a):
        acc = IntPoly.of(1)
        for t in H:
            k = (a * t) % m
            factor = IntPoly.from_list([1] + [0] * (k - 1) + [-1]) if k else IntPoly.of(0)
            acc = _poly_mod(acc * factor, phi_m)
        return acc

    # eta powers as vectors in the monomial basis of Z[x]/Phi_m
    eta = _poly_mod(IntPoly.from_list(
        [1 if i in H else 0 for i in range(max(H) + 1)]), phi_m)
    pows = [IntPoly.of(1), eta, _poly_mod(eta * eta, phi_m)]

    def to_vec(p):
        v = [0] * phideg
        for i, c in enumerate(p.coeffs):
            v[i] = c
        return v

    cols = [to_vec(p) for p in pows]
    divide = cyclotomic_poly(m)(1) != 1

    # coset representatives of H in (Z/m)^x
    reps = []
    seen = set()
    for a in range(1, m):
        if math.gcd(a, m) == 1 and a not in seen:
            reps.append(a)
            seen.update((a * t) % m for t in H)
    assert len(reps) == 3

    units = []
    base = u_poly(reps[0]) if divide else None
    for a in reps[1:]:
        u = u_poly(a)
        uv = [Fraction(c) for c in to_vec(u)]
        if divide:
            basev = to_vec(base)
            # solve u = q * base in the field: q = u/base lies in the cubic;
            # easier to solve (c0 + c1 eta + c2 eta^2) * base = u
            prod_cols = []
            for p in pows:
                pb = _poly_mod(p * base, phi_m)
                prod_cols.append(to_vec(pb))
            c = _solve3(prod_cols, uv)
        else:
            c = _solve3(cols, uv)
        coords = nf.from_power_basis(c)
        assert abs(nf.norm(coords)) == 1, "cyclotomic element must be a unit"
        units.append(coords)
    return units


def _solve3(cols, rhs):
    """Solve sum c_j cols[j] = rhs exactly; assert consistency on all rows."""
    nrows = len(rhs)
    rows = [[Fraction(cols[j][i]) for j in range(3)] + [rhs[i]] for i in range(nrows)]
    piv_rows = []
    used = set()
    for col in range(3):
        for i in range(nrows):
            if i in used:
                continue
            r = rows[i][:]
            for pr, pc in piv_rows:
                if r[pc]:
                    f = r[pc] / pr[pc]
                    r = [x - f * y for x, y in zip(r, pr)]
            if r[col]:
                piv_rows.append((r, col))
                used.add(i)
                break
    assert len(piv_rows) == 3, "eta powers must be independent"
    sol = [Fraction(0)] * 3
    for r, c in reversed(piv_rows):
        s = r[3] - sum(r[j] * sol[j] for j in range(3) if j != c)
        sol[c] = s / r[c]
    for i in range(nrows):
        tot = sum(Fraction(cols[j][i]) * sol[j] for j in range(3))
        assert tot == rhs[i], "inconsistent system"
    return sol


class BruteOracle:
    """Certified class group of one cyclic cubic field, by enumeration."""

    def __init__(self, nf: NumberField, conductor: int):
        self.nf = nf
        self.m = conductor
        self.units = cyclotomic_units(nf, conductor)
        self._embed = None
        self._saturate_units()
        self.rho = self._covering_bound()
        mats = [t[2] for t in find_automorphisms(nf)]
        self.sigma = next(a for a in mats if [list(r) for r in a] != _ident(3))

    def _embed_rows(self):
        if self._embed is None:
            E = self.nf.embed_matrix(prec=60)
            self._embed = np.array([[float(x) for x in row] for row in E])
        return self._embed

    def _upow(self, u, e):
        out = list(self.nf.one())
        for _ in range(e):
            out = list(self.nf.mul(out, u))
        return out

    def _try_root(self, u, p):
        """Exact p-th root of u in the ring of integers, or None."""
        E = self._embed_rows()
        Einv = np.linalg.inv(E)
        v = np.array(u, dtype=float) @ E
        if p % 2:
            roots = [np.sign(v) * np.abs(v) ** (1.0 / p)]
        else:
            if np.any(v <= 0):
                return None
            s = np.sqrt(v)
            roots = [
                s * np.array([1 if b >> i & 1 else -1 for i in range(3)])
                for b in range(8)
            ]
        for sv in roots:
            coords = [int(round(c)) for c in sv @ Einv]
            if any(coords) and self._upow(coords, p) == list(u):
                return coords
        return None

    def _saturate_units(self):
        """Shrink the unit lattice by replacing p-th powers with their roots.

        Cyclotomic constructions land on a finite-index sublattice of the
        full unit lattice (index 2 and the class number are the usual
        culprits); left alone that inflates the covering radius and blows
        up the enumeration volume of every principality test."""
        for _ in range(40):
            hit = False
            for p in (2, 3, 5, 7, 11, 13):
                combos = [(0, 1)] + [(1, k) for k in range(p)]
                for a, b in combos:
                    u = self.nf.mul(self._upow(self.units[0], a),
                                    self._upow(self.units[1], b))
                    r = self._try_root(list(u), p)
                    if r is not None:
                        self.units[0 if a else 1] = r
                        hit = True
                        break
                if hit:
                    break
            if not hit:
                return

    def _covering_bound(self):
        E = self._embed_rows()
        logs = []
        for u in self.units:
            v = np.array(u, dtype=float) @ E
            logs.append(np.log(np.abs(v)))
        b1, b2 = np.array(logs[0]), np.array(logs[1])
        # Lagrange-reduce the 2-dim lattice spanned by b1, b2
        for _ in range(60):
            if b1 @ b1 > b2 @ b2:
                b1, b2 = b2, b1
            k = round(float((b1 @ b2) / (b1 @ b1)))
            if k == 0:
                break
            b2 = b2 - k * b1
        rho = 0.5 * (np.linalg.norm(b1) + np.linalg.norm(b2))
        return float(rho)

    def principal_element(self, A: Ideal):
        """A generator of A, or None, certified by complete enumeration."""
        NA = A.norm()
        if NA == 1:
            return self.nf.one()
        n = self.nf.n
        B = _lll_rows([list(row) for row in A.hnf], self._embed_rows())
        E = np.array(B, dtype=float) @ self._embed_rows()
        t0 = math.log(NA) / n
        # a trace-zero vector of length rho has coordinates at most rho*sqrt(2/3)
        M = np.exp(t0 + self.rho * math.sqrt(2.0 / 3.0) + 0.3)
        Einv = np.linalg.inv(E)
        bounds = np.abs(Einv).T @ np.full(n, M)
        ranges = [np.arange(-int(b) - 1, int(b) + 2) for b in bounds]
        total = len(ranges[0]) * len(ranges[1]) * len(ranges[2])
        if total > 2 * 10**9:
            raise ArithmeticError(f"oracle enumeration too large: {total}")
        r0, r1, r2 = ranges
        G1, G2 = np.meshgrid(r1, r2, indexing="ij")
        Crest = np.stack([G1.ravel(), G2.ravel()], axis=1).astype(float)
        Vrest = Crest @ E[1:]
        for c0 in r0:
            V = Vrest + float(c0) * E[0]
            inside = np.all(np.abs(V) <= M * (1 + 1e-9), axis=1)
            if not inside.any():
                continue
            Nf = np.prod(V[inside], axis=1)
            hits = np.nonzero(inside)[0][np.abs(np.abs(Nf) - NA) < 0.45]
            for j in hits:
                c = (int(c0), int(r1[j // len(r2)]), int(r2[j % len(r2)]))
                coords = [sum(c[k] * B[k][i] for k in range(n)) for i in range(n)]
                if any(coords) and abs(self.nf.norm(coords)) == NA:
                    return coords
        return None

    def is_principal(self, A: Ideal) -> bool:
        return self.principal_element(A) is not None

    def equivalent(self, I: Ideal, J: Ideal) -> bool:
        Jc = J.apply_matrix(self.sigma)
        Jcc = Jc.apply_matrix(self.sigma)
        return self.is_principal(I * Jc * Jcc)

    def small_ideals(self):
        MK = self.nf.minkowski_bound()
        prim = []
        for p in primes_up_to(MK):
            for P in prime_decomposition(self.nf, p):
                if P.norm() <= MK:
                    prim.append(P)
        out = [Ideal.whole_ring(self.nf)]
        for P in prim:
            new = []
            for I in out:
                J = I
                while True:
                    J = J * P
                    if J.norm() > MK:
                        break
                    new.append(J)
            out.extend(new)
        return out

    def class_group(self):
        """(h, invariant factors ascending, class representatives)."""
        reps = []
        for I in sorted(self.small_ideals(), key=lambda I: I.norm()):
            if not any(self.equivalent(I, R) for R in reps):
                reps.append(I)
        h = len(reps)
        e = reps[0]
        assert e.norm() == 1

        def torsion(d):
            return sum(1 for R in reps if self.is_principal(R.power(d)))

        inv = _invariants_from_torsion(h, torsion)
        return h, inv, reps


def _lll_rows(B, embed):
    """LLL-reduce integer rows B against the real geometry B @ embed.

    Row operations are exact on B; the float picture is recomputed from
    B every pass, so huge HNF entries cannot poison the reduction."""
    B = [[int(x) for x in row] for row in B]
    n = len(B)
    if all(B[i][j] == 0 for i in range(n) for j in range(i)) and all(
        B[i][i] for i in range(n)
    ):
        # triangular input: clear the giant above-pivot entries exactly first,
        # otherwise the float conversion below swallows the whole geometry
        for i in range(n - 2, -1, -1):
            for k in range(n - 1, i, -1):
                q = B[i][k] // B[k][k]
                if q:
                    B[i] = [a - q * b for a, b in zip(B[i], B[k])]
    if max(abs(x) for row in B for x in row) > 2**50:
        raise ArithmeticError("ideal entries exceed float reduction range")
    for _ in range(120):
        F = np.array(B, dtype=float) @ embed
        gs = F.copy()
        for i in range(1, n):
            for j in range(i):
                gs[i] -= (F[i] @ gs[j]) / (gs[j] @ gs[j]) * gs[j]
        changed = False
        for i in range(1, n):
            for j in range(i - 1, -1, -1):
                m = round(float((F[i] @ gs[j]) / (gs[j] @ gs[j])))
                if m:
                    B[i] = [a - m * b for a, b in zip(B[i], B[j])]
                    F[i] = F[i] - m * F[j]
                    changed = True
        if changed:
            continue
        for i in range(n - 1):
            mu = float((F[i + 1] @ gs[i]) / (gs[i] @ gs[i]))
            if gs[i + 1] @ gs[i + 1] + mu**2 * (gs[i] @ gs[i]) < 0.75 * (gs[i] @ gs[i]):
                B[i], B[i + 1] = B[i + 1], B[i]
                changed = True
                break
        if not changed:
            break
    return B


def _ident(n):
    return [[1 if i == j else 0 for j in range(n)] for i in range(n)]


def _invariants_from_torsion(h, torsion):
    if h == 1:
        return ()
    fac = {}
    n = h
    p = 2
    while p * p <= n:
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
        p += 1
    if n > 1:
        fac[n] = fac.get(n, 0) + 1
    parts = {}
    for p in fac:
        ranks = []
        prev = 1
        j = 1
        while True:
            t = torsion(p**j)
            r = 0
            while p**r < t // prev:
                r += 1
            assert p**r * prev == t
            if r == 0:
                break
            ranks.append(r)
            prev = t
            if prev == p ** fac[p]:
                break
            j += 1
        orders = []
        for idx, r in enumerate(ranks):
            nxt = ranks[idx + 1] if idx + 1 < len(ranks) else 0
            orders.extend([p ** (idx + 1)] * (r - nxt))
        parts[p] = sorted(orders)
    width = max(len(v) for v in parts.values())
    inv = []
    for i in range(width):
        d = 1
        for p, v in parts.items():
            pad = [1] * (width - len(v)) + v
            d *= pad[i]
        inv.append(d)
    assert math.prod(inv) == h
    return tuple(inv)
