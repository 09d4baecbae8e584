"""Defining polynomials for every field the census touches.

Cyclic cubic fields come from Gaussian periods (floating-point sums,
rounded, then certified exactly through the maximal order).  Shanks
primes get their classical explicit polynomial.  Cubic fields of prime
discriminant are enumerated through Hunter's bound with a certified
maximality check, and their sextic Galois closures are built by exact
linear algebra in the splitting algebra, which also hands us the order-3
automorphism for free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .exactarith import IntPoly, is_prime, poly_discriminant
from .galmod import kernel_int
from .numfield import NumberField, verify_automorphism


class DomainError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Shanks primes

@dataclass(frozen=True)
class ShanksWitness:
    a: int
    ell: int


def shanks_check(ell: int):
    """The unique a >= -1 with ell = a^2 + 3a + 9, if one exists."""
    if not is_prime(ell):
        raise DomainError("ell must be prime")
    # a = (-3 + sqrt(4*ell - 27)) / 2
    d = 4 * ell - 27
    r = math.isqrt(d)
    if r * r != d or (r - 3) % 2:
        return None
    a = (r - 3) // 2
    if a < -1:
        return None
    assert a * a + 3 * a + 9 == ell
    return ShanksWitness(a=a, ell=ell)


def shanks_polynomial(a: int) -> IntPoly:
    """x^3 - a x^2 - (a+3) x - 1; cyclic cubic of conductor a^2+3a+9."""
    ell = a * a + 3 * a + 9
    if a < -1 or not is_prime(ell):
        raise DomainError("a^2 + 3a + 9 must be prime and a >= -1")
    return IntPoly.from_list([-1, -(a + 3), -a, 1])


# ---------------------------------------------------------------------------
# cyclic cubic fields by conductor (Gaussian periods)

def _conductor_components(m: int):
    """Split a cyclic-cubic conductor into its prime-power parts.

    Valid conductors are products of distinct primes ≡ 1 mod 3 and at most
    one factor of 9.
    """
    parts = []
    rest = m
    if rest % 9 == 0:
        parts.append(9)
        rest //= 9
    if rest % 3 == 0:
        raise DomainError("conductor may contain 9 but not 3 or 27")
    p = 2
    while p * p <= rest:
        if rest % p == 0:
            if rest % (p * p) == 0 or p % 3 != 1:
                raise DomainError("conductor prime parts must be distinct primes = 1 mod 3")
            parts.append(p)
            rest //= p
        p += 1
    if rest > 1:
        if rest % 3 != 1:
            raise DomainError("conductor prime parts must be = 1 mod 3")
        parts.append(rest)
    return sorted(parts)


def _component_dlog3(q: int):
    """Map t -> discrete log mod 3 in (Z/q)^x for prime-power q with 3 | phi(q)."""
    if q == 9:
        phi = 6
        g = 2
    else:
        phi = q - 1
        g = _primitive_root(q)
    e = phi // 3
    w = pow(g, e, q)  # order 3
    table = {1: 0, w: 1, (w * w) % q: 2}

    def dlog3(t):
        return table[pow(t % q, e, q)]

    return dlog3


def _primitive_root(p: int) -> int:
    phi = p - 1
    fac = []
    n = phi
    d = 2
    while d * d <= n:
        if n % d == 0:
            fac.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        fac.append(n)
    g = 2
    while True:
        if all(pow(g, phi // q, p) != 1 for q in fac):
            return g
        g += 1


def _index3_subgroup_characters(m: int):
    """Characters (Z/m)^x -> Z/3 with conductor exactly m, up to inversion.

    Each character is returned as a function t -> value in {0,1,2}; its
    kernel is an index-3 subgroup whose fixed field has conductor m.
    """
    parts = _conductor_components(m)
    dlogs = [_component_dlog3(q) for q in parts]
    if len(parts) == 1:
        d = dlogs[0]
        return [lambda t, d=d: d(t)]
    if len(parts) == 2:
        d1, d2 = dlogs
        # the two classes nontrivial on both components: chi1*chi2, chi1*chi2^2
        return [
            lambda t, d1=d1, d2=d2: (d1(t) + d2(t)) % 3,
            lambda t, d1=d1, d2=d2: (d1(t) + 2 * d2(t)) % 3,
        ]
    raise DomainError("conductors with more than two prime-power parts not supported")


def _period_polynomial(m: int, chi) -> IntPoly:
    """Minimal polynomial of eta = sum over ker(chi) of exp(2 pi i t/m).

    Floating-point sums of cosines (the kernel contains -1, so eta is real),
    rounded to integers.  The caller certifies the result exactly.
    """
    t = np.arange(1, m, dtype=np.int64)
    t = t[np.gcd(t, m) == 1]
    vals = np.array([chi(int(x)) for x in t], dtype=np.int64)
    ang = 2.0 * np.pi * t.astype(np.float64) / m
    c = np.cos(ang)
    etas = [float(c[vals == j].sum()) for j in range(3)]
    e1 = etas[0] + etas[1] + etas[2]
    e2 = etas[0] * etas[1] + etas[0] * etas[2] + etas[1] * etas[2]
    e3 = etas[0] * etas[1] * etas[2]
    coeffs = [-e3, e2, -e1, 1.0]
    out = []
    for x in coeffs:
        r = round(x)
        if abs(x - r) > 0.01:
            raise ArithmeticError(f"period coefficient too far from integer: {x}")
        out.append(int(r))
    return IntPoly.from_list(out)


def cyclic_cubic_fields(conductor: int):
    """All cyclic cubic fields of the given conductor, certified.

    One field for a prime conductor or 9; two for a two-component conductor.
    Each NumberField carries a conductor_label attribute.  Deterministic
    order: ascending coefficient tuples.
    """
    chars = _index3_subgroup_characters(conductor)
    polys = sorted({_period_polynomial(conductor, chi).coeffs for chi in chars})
    out = []
    for coeffs in polys:
        f = IntPoly(coeffs)
        nf = _certified_cyclic_cubic(f, conductor)
        out.append(nf)
    return out


def _certified_cyclic_cubic(f: IntPoly, conductor: int) -> NumberField:
    assert f.degree == 3 and f.is_monic
    # irreducible: a cubic with square discriminant either is irreducible
    # or splits into three rational roots
    if _has_rational_root(f):
        raise ArithmeticError("period polynomial is reducible")
    hint = [p for p in ([3] + _conductor_components(conductor)) if conductor % p == 0]
    hint = sorted(set(3 if q == 9 else q for q in hint))
    nf = NumberField.from_poly(f, ramified_hint=hint)
    if nf.disc != conductor * conductor:
        raise ArithmeticError(
            f"field discriminant {nf.disc} does not certify conductor {conductor}"
        )
    nf.conductor_label = conductor
    return nf


def cubic_subfield_of_cyclotomic(ell: int) -> NumberField:
    """The cubic subfield of the ell-th cyclotomic field, ell = 1 mod 3 prime."""
    if not is_prime(ell) or ell % 3 != 1:
        raise DomainError("ell must be a prime = 1 mod 3")
    return cyclic_cubic_fields(ell)[0]


def real_quadratic_field(ell: int) -> NumberField:
    """Q(sqrt ell) for a prime ell = 1 mod 4, with discriminant exactly ell.

    Built on x^2 - x - (ell-1)/4, whose root is (1 + sqrt ell)/2, so the
    power basis is already the maximal order.
    """
    if ell % 4 != 1 or not is_prime(ell):
        raise DomainError("ell must be a prime = 1 mod 4")
    nf = NumberField.from_poly(IntPoly.from_list([-(ell - 1) // 4, -1, 1]))
    assert nf.disc == ell
    return nf


def period_cubic_fast(ell: int) -> IntPoly:
    """Period polynomial of prime conductor without trig sums.

    Uses the classical parametrization by 4*ell = A^2 + 27*B^2 with
    A = 1 mod 3: the polynomial is x^3 + x^2 - (ell-1)/3 x - (ell(A+3)-1)/27.
    Certified by the discriminant test in the caller when used for census
    work; cross-checked against the trigonometric construction in tests.
    """
    if not is_prime(ell) or ell % 3 != 1:
        raise DomainError("ell must be a prime = 1 mod 3")
    target = 4 * ell
    B = 1
    while True:
        rem = target - 27 * B * B
        if rem <= 0:
            raise ArithmeticError("no representation found")
        A = math.isqrt(rem)
        if A * A == rem:
            if A % 3 == 1:
                break
            if (-A) % 3 == 1:
                A = -A
                break
        B += 1
    c = (ell * (A + 3) - 1) // 27
    assert (ell * (A + 3) - 1) % 27 == 0
    return IntPoly.from_list([-c, -(ell - 1) // 3, 1, 1])


def diagonal_cubic_fields(ell1: int, ell2: int):
    """The two cyclic cubic fields of conductor ell1*ell2 (both = 1 mod 3)."""
    for ell in (ell1, ell2):
        if not is_prime(ell) or ell % 3 != 1:
            raise DomainError("both primes must be = 1 mod 3")
    if ell1 == ell2:
        raise DomainError("primes must be distinct")
    fields = cyclic_cubic_fields(ell1 * ell2)
    assert len(fields) == 2
    return fields


# ---------------------------------------------------------------------------
# cubic fields of prime discriminant ell (non-Galois, totally real)

def cubic_fields_of_discriminant(ell: int):
    """All cubic fields of field discriminant exactly ell, up to isomorphism.

    Hunter's bound: every cubic field contains a non-rational integer theta
    with trace t in {0,1} and T2(theta) <= t^2/3 + (2/sqrt 3) sqrt(ell/3),
    so scanning monic cubics x^3 - t x^2 + s x - q over the induced
    coefficient box is provably complete.  Survivors are certified by the
    maximal order and deduplicated by a generator fingerprint.
    """
    if not is_prime(ell) or ell % 4 != 1:
        raise DomainError("ell must be a prime = 1 mod 4")
    t2_max = 1.0 / 3.0 + (2.0 / math.sqrt(3.0)) * math.sqrt(ell / 3.0)
    found = []
    for t in (0, 1):
        # s = (t^2 - S2)/2 with S2 = sum of squared roots <= t2_max
        s_lo = -int((t2_max - t * t) // 2) - 1
        s_hi = t * t // 2 + 1
        q_bound = int((t2_max / 3.0) ** 1.5) + 2
        s_vals = np.arange(s_lo, s_hi + 1, dtype=np.int64)
        q_vals = np.arange(-q_bound, q_bound + 1, dtype=np.int64)
        S, Q = np.meshgrid(s_vals, q_vals, indexing="ij")
        # disc of x^3 - t x^2 + s x - q
        T = np.int64(t)
        D = (
            18 * T * S * Q
            - 4 * T ** 3 * Q
            + T ** 2 * S ** 2
            - 4 * S ** 3
            - 27 * Q ** 2
        )
        mask = (D > 0) & (D % ell == 0)
        for s, q, d in zip(S[mask], Q[mask], D[mask]):
            rest = int(d) // ell
            r = math.isqrt(rest)
            if r * r != rest:
                continue
            f = IntPoly.from_list([-int(q), int(s), -t, 1])
            if _has_rational_root(f):
                continue
            # exact discriminant recheck (the numpy formula can wrap only
            # far outside this box, but the recheck costs nothing)
            if poly_discriminant(f) != int(d):
                continue
            nf = NumberField.from_poly(f, ramified_hint=[ell])
            if nf.disc == ell:
                found.append(nf)
    # deduplicate isomorphic fields
    out = []
    seen = []
    for nf in found:
        fp = _cubic_iso_fingerprint(nf)
        if fp not in seen:
            seen.append(fp)
            out.append(nf)
    for nf in out:
        nf.conductor_label = None
    out.sort(key=lambda nf: nf.f.coeffs)
    return out


def _has_rational_root(f: IntPoly) -> bool:
    c0 = f.coeffs[0]
    if c0 == 0:
        return True
    for d in range(1, abs(c0) + 1):
        if abs(c0) % d == 0:
            if f(d) == 0 or f(-d) == 0:
                return True
    return False


def _cubic_iso_fingerprint(nf: NumberField):
    """Canonical invariant of the isomorphism class of a cubic field.

    The sorted set of characteristic polynomials of minimal-T2 generators
    (trace normalized into {0,1,2}); equal fingerprints <=> isomorphic,
    since a shared irreducible charpoly identifies the fields.
    """
    from .numfield import lll_reduced_basis

    U = lll_reduced_basis(nf)
    basis = [list(row) for row in U]
    best_t2 = None
    polys = set()
    B = 4
    while True:
        for a in range(-B, B + 1):
            for b in range(-B, B + 1):
                for c in range(-B, B + 1):
                    v = [
                        a * basis[0][i] + b * basis[1][i] + c * basis[2][i]
                        for i in range(3)
                    ]
                    tr = nf.trace(v)
                    # translate trace into {0,1,2}
                    shift = -(tr // 3) if tr % 3 == 0 else -((tr - tr % 3) // 3)
                    one = nf.one()
                    w = [v[i] + shift * one[i] for i in range(3)]
                    cp = _charpoly3(nf, w)
                    if _is_irreducible_cubic(cp):
                        t2 = nf.trace(nf.mul(w, w))
                        if best_t2 is None or t2 < best_t2:
                            best_t2 = t2
                            polys = {cp.coeffs}
                        elif t2 == best_t2:
                            polys.add(cp.coeffs)
        if best_t2 is not None:
            return frozenset(polys)
        B *= 2
        if B > 64:
            raise ArithmeticError("no generator found in search box")


def _charpoly3(nf: NumberField, v) -> IntPoly:
    m = nf.mult_matrix(v)
    tr = m[0][0] + m[1][1] + m[2][2]
    # char poly x^3 - tr x^2 + c2 x - det
    c2 = (
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
        + m[0][0] * m[2][2] - m[0][2] * m[2][0]
        + m[1][1] * m[2][2] - m[1][2] * m[2][1]
    )
    det = (
        m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
        - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
        + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0])
    )
    return IntPoly.from_list([-det, c2, -tr, 1])


def _is_irreducible_cubic(f: IntPoly) -> bool:
    return f.degree == 3 and not _has_rational_root(f)


# ---------------------------------------------------------------------------
# Galois closure of a non-Galois cubic: exact splitting-algebra construction

class SexticClosure:
    """Degree-6 Galois closure of a non-Galois cubic, with its S3 action.

    Built inside B = Q[y,z]/(f(y), f(z)/(z-y)): the difference delta = y - z
    generates the closure, and every root difference is an exact polynomial
    in delta, giving all six automorphisms without numerics.
    """

    def __init__(self, cubic: NumberField):
        f = cubic.f
        if f.degree != 3 or not f.is_monic:
            raise DomainError("monic cubic required")
        d = poly_discriminant(f)
        r = math.isqrt(abs(d))
        if d > 0 and r * r == d:
            raise DomainError("cubic is Galois; closure is itself")
        self.cubic = cubic
        A = f.coeffs[2]
        Bc = f.coeffs[1]
        # basis of the 6-dim algebra: y^i z^j, i<3, j<2
        # z^2 = -(y+A) z - (y^2 + A y + Bc)   [from f(z)/(z-y) = 0]
        # y^3 = -A y^2 - Bc y - C
        C = f.coeffs[0]
        self._A, self._B, self._C = A, Bc, C
        delta = self._sub(self._mono(1, 0), self._mono(0, 1))
        powers = [self._const(1)]
        for _ in range(6):
            powers.append(self._mul(powers[-1], delta))
        mat = [list(p) for p in powers]
        ker = kernel_int(mat)
        assert len(ker) == 1, "difference of roots must have degree exactly 6"
        v = list(ker[0])
        g = 0
        for c in v:
            g = math.gcd(g, c)
        v = [c // g for c in v]
        if v[6] < 0:
            v = [-c for c in v]
        assert v[6] == 1, "root difference is an algebraic integer"
        self.poly = IntPoly.from_list(v)
        self._delta_powers = powers[:6]

    # elements are integer (or Fraction) 6-vectors on y^i z^j, i<3, j<2,
    # ordered (1, y, y^2, z, yz, y^2 z)

    @staticmethod
    def _const(c):
        return [c, 0, 0, 0, 0, 0]

    @staticmethod
    def _mono(y_pow, z_pow):
        v = [0] * 6
        idx = {(0, 0): 0, (1, 0): 1, (2, 0): 2, (0, 1): 3, (1, 1): 4, (2, 1): 5}
        v[idx[(y_pow, z_pow)]] = 1
        return v

    @staticmethod
    def _sub(a, b):
        return [x - y for x, y in zip(a, b)]

    def _mul(self, a, b):
        A, B, C = self._A, self._B, self._C
        # multiply as polynomials in y (deg<3) and z (deg<2), reduce z^2 then y^3+
        # coefficient grid c[i][j], i = y-power 0..6, j = z-power 0..2
        grid = [[0] * 3 for _ in range(7)]
        av = [[a[0], a[1], a[2]], [a[3], a[4], a[5]]]  # av[j][i]
        bv = [[b[0], b[1], b[2]], [b[3], b[4], b[5]]]
        for j1 in range(2):
            for i1 in range(3):
                x = av[j1][i1]
                if not x:
                    continue
                for j2 in range(2):
                    for i2 in range(3):
                        yv = bv[j2][i2]
                        if yv:
                            grid[i1 + i2][j1 + j2] += x * yv
        # reduce z^2 = -(y+A) z - (y^2 + A y + B)
        for i in range(5):
            c = grid[i][2]
            if c:
                grid[i][2] = 0
                # -(y+A) z
                grid[i + 1][1] -= c
                grid[i][1] -= c * A
                # -(y^2 + A y + B)
                grid[i + 2][0] -= c
                grid[i + 1][0] -= c * A
                grid[i][0] -= c * B
        # reduce y powers >= 3: y^3 = -A y^2 - B y - C
        for i in range(6, 2, -1):
            for j in range(2):
                if grid[i][j]:
                    c = grid[i][j]
                    grid[i][j] = 0
                    grid[i - 1][j] -= c * A
                    grid[i - 2][j] -= c * B
                    grid[i - 3][j] -= c * C
        return [grid[0][0], grid[1][0], grid[2][0], grid[0][1], grid[1][1], grid[2][1]]

    def automorphism_polynomials(self):
        """The six maps delta -> s(delta) as (numerator list, denominator).

        Ordered: identity, the two 3-cycles, then the three transpositions.
        """
        from fractions import Fraction

        A = self._A
        y = self._mono(1, 0)
        z = self._mono(0, 1)
        w = self._sub(self._sub(self._const(-A), y), z)
        pairs = [
            (y, z),  # identity: y-z
            (z, w),  # 3-cycle (y z w)
            (w, y),  # its square
            (z, y),  # transpositions
            (y, w),
            (w, z),
        ]
        # basis-change: solve delta-power coords for each target difference
        P = [[Fraction(self._delta_powers[i][t]) for i in range(6)] for t in range(6)]
        out = []
        for u, v in pairs:
            target = [Fraction(c) for c in self._sub(u, v)]
            sol = _solve_fraction_system(P, target)
            den = 1
            for c in sol:
                den = den * c.denominator // math.gcd(den, c.denominator)
            out.append(([int(c * den) for c in sol], den))
        return out


def _solve_fraction_system(P, rhs):
    """Solve P x = rhs over the rationals (P square, invertible)."""
    n = len(P)
    m = [row[:] + [rhs[i]] for i, row in enumerate(P)]
    for col in range(n):
        piv = next(r for r in range(col, n) if m[r][col] != 0)
        m[col], m[piv] = m[piv], m[col]
        pc = m[col][col]
        m[col] = [x / pc for x in m[col]]
        for r in range(n):
            if r != col and m[r][col]:
                c = m[r][col]
                m[r] = [x - c * y for x, y in zip(m[r], m[col])]
    return [m[i][n] for i in range(n)]


def galois_closure_sextic(cubic: NumberField, ramified_hint=None):
    """Galois closure of a non-Galois cubic: (NumberField, order-3 matrix, algebra).

    The returned field is certified through its maximal order; the matrix is
    the action of a fixed 3-cycle on the integral basis, and all six group
    elements are attached to the field as verified matrices (galois_mats).
    """
    clo = SexticClosure(cubic)
    hint = ramified_hint
    if hint is None and cubic.disc > 0 and is_prime(cubic.disc):
        hint = [cubic.disc]
    nf = NumberField.from_poly(clo.poly, ramified_hint=hint)
    mats = []
    for s_num, s_den in clo.automorphism_polynomials():
        m = verify_automorphism(nf, s_num, s_den)
        assert m is not None, "every S3 map must verify on the closure"
        mats.append(m)
    nf.galois_mats = mats
    nf.conductor_label = None
    return nf, mats[1], clo
