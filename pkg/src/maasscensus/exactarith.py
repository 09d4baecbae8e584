"""Exact integer, modular and polynomial arithmetic.

Dense univariate polynomials over Z and over F_p, deterministic primality
testing, integer factorization, resultants and discriminants.  Plain Python
ints throughout; degrees in this project never exceed 24, so nothing here is
asymptotically clever.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass

# ---------------------------------------------------------------------------
# primality / integer factorization

# Strong-pseudoprime witness set; deterministic for n below this limit.
_MR_BASES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37)
_MR_DETERMINISTIC_LIMIT = 3317044064679887385961981

_SMALL_PRIMES = (2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47)


def is_prime(n: int) -> bool:
    """Primality test, deterministic for n < 3.3e24 (fixed witness set)."""
    if n < 2:
        return False
    for p in _SMALL_PRIMES:
        if n % p == 0:
            return n == p
    d = n - 1
    r = 0
    while d % 2 == 0:
        d //= 2
        r += 1
    if n < _MR_DETERMINISTIC_LIMIT:
        bases = _MR_BASES
    else:
        # beyond the proven range: many fixed witnesses, still a strong test
        bases = tuple(_first_primes(64))
    for a in bases:
        a %= n
        if a == 0:
            continue
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(r - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def _first_primes(k):
    out, n = [], 2
    while len(out) < k:
        if is_prime(n):
            out.append(n)
        n += 1
    return out


def primes_up_to(n: int) -> list[int]:
    """All primes <= n by sieve."""
    if n < 2:
        return []
    sieve = bytearray([1]) * (n + 1)
    sieve[0] = sieve[1] = 0
    for p in range(2, math.isqrt(n) + 1):
        if sieve[p]:
            sieve[p * p :: p] = bytearray(len(sieve[p * p :: p]))
    return [i for i in range(2, n + 1) if sieve[i]]


def next_prime(n: int) -> int:
    """Smallest prime > n."""
    k = n + 1
    if k <= 2:
        return 2
    if k % 2 == 0:
        k += 1
    while not is_prime(k):
        k += 2
    return k


@dataclass(frozen=True)
class FactoredInteger:
    """Sign and sorted (prime, exponent) pairs; value() multiplies back."""

    sign: int
    factors: tuple[tuple[int, int], ...]

    def value(self) -> int:
        v = self.sign
        for p, e in self.factors:
            v *= p**e
        return v

    def exponent(self, p: int) -> int:
        for q, e in self.factors:
            if q == p:
                return e
        return 0

    @property
    def primes(self) -> tuple[int, ...]:
        return tuple(p for p, _ in self.factors)

    def squarefree_part(self) -> int:
        v = self.sign
        for p, e in self.factors:
            if e % 2:
                v *= p
        return v


def _pollard_brent(n, rng):
    # Brent's cycle variant of Pollard rho; n odd composite, not a prime power
    while True:
        y = rng.randrange(1, n)
        c = rng.randrange(1, n)
        m = 128
        g = r = q = 1
        while g == 1:
            x = y
            for _ in range(r):
                y = (y * y + c) % n
            k = 0
            while k < r and g == 1:
                ys = y
                for _ in range(min(m, r - k)):
                    y = (y * y + c) % n
                    q = q * abs(x - y) % n
                g = math.gcd(q, n)
                k += m
            r *= 2
        if g == n:
            g = 1
            while g == 1:
                ys = (ys * ys + c) % n
                g = math.gcd(abs(x - ys), n)
        if g != n:
            return g


def factor_integer(n: int, trial_bound: int = 10000, seed: int = 1) -> FactoredInteger:
    """Full factorization: trial division then Pollard rho with rigorous
    primality testing of every reported prime (deterministic below 3.3e24)."""
    if n == 0:
        raise ValueError("cannot factor 0")
    sign = -1 if n < 0 else 1
    n = abs(n)
    fac: dict[int, int] = {}
    for p in (2, 3, 5):
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
    p = 7
    wheel = (4, 2, 4, 2, 4, 6, 2, 6)
    i = 0
    while p * p <= n and p <= trial_bound:
        while n % p == 0:
            fac[p] = fac.get(p, 0) + 1
            n //= p
        p += wheel[i]
        i = (i + 1) % 8
    rng = random.Random(seed)
    stack = [n] if n > 1 else []
    while stack:
        m = stack.pop()
        if m == 1:
            continue
        if is_prime(m):
            fac[m] = fac.get(m, 0) + 1
            continue
        root = _perfect_power(m)
        if root is not None:
            b, k = root
            stack.extend([b] * k)
            continue
        d = _pollard_brent(m, rng)
        stack.append(d)
        stack.append(m // d)
    return FactoredInteger(sign, tuple(sorted(fac.items())))


def _perfect_power(n):
    # returns (base, k) with base^k == n and k >= 2, or None
    for k in range(2, n.bit_length() + 1):
        b = round(n ** (1.0 / k))
        for cand in (b - 1, b, b + 1):
            if cand >= 2 and cand**k == n:
                return cand, k
    return None


def valuation(n: int, p: int) -> int:
    """Largest e with p^e | n (n != 0)."""
    if n == 0:
        raise ValueError("valuation of 0")
    e = 0
    n = abs(n)
    while n % p == 0:
        n //= p
        e += 1
    return e


def crt(residues, moduli) -> int:
    """Chinese remainder for pairwise coprime moduli."""
    x, m = 0, 1
    for r, mod in zip(residues, moduli):
        g = pow(m, -1, mod)
        x = x + m * ((r - x) * g % mod)
        m *= mod
    return x % m


# ---------------------------------------------------------------------------
# integer polynomials

def _trim(coeffs):
    c = list(coeffs)
    while c and c[-1] == 0:
        c.pop()
    return tuple(c)


@dataclass(frozen=True)
class IntPoly:
    """Dense univariate polynomial over Z, coefficients low degree first."""

    coeffs: tuple[int, ...]

    @staticmethod
    def of(*coeffs) -> "IntPoly":
        return IntPoly(_trim(coeffs))

    @staticmethod
    def from_list(coeffs) -> "IntPoly":
        return IntPoly(_trim(coeffs))

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1  # -1 for the zero polynomial

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    @property
    def lc(self) -> int:
        if not self.coeffs:
            raise ValueError("zero polynomial has no leading coefficient")
        return self.coeffs[-1]

    @property
    def is_monic(self) -> bool:
        return bool(self.coeffs) and self.coeffs[-1] == 1

    def __add__(self, other):
        a, b = self.coeffs, other.coeffs
        if len(a) < len(b):
            a, b = b, a
        out = list(a)
        for i, c in enumerate(b):
            out[i] += c
        return IntPoly(_trim(out))

    def __neg__(self):
        return IntPoly(tuple(-c for c in self.coeffs))

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        if isinstance(other, int):
            if other == 0:
                return IntPoly(())
            return IntPoly(tuple(c * other for c in self.coeffs))
        a, b = self.coeffs, other.coeffs
        if not a or not b:
            return IntPoly(())
        out = [0] * (len(a) + len(b) - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    out[i + j] += ai * bj
        return IntPoly(_trim(out))

    __rmul__ = __mul__

    def shift(self, k: int) -> "IntPoly":
        """Multiply by x^k."""
        if self.is_zero:
            return self
        return IntPoly((0,) * k + self.coeffs)

    def __call__(self, x):
        v = 0
        for c in reversed(self.coeffs):
            v = v * x + c
        return v

    def derivative(self) -> "IntPoly":
        return IntPoly(_trim(i * c for i, c in enumerate(self.coeffs) if i))

    def divmod_exact(self, other):
        """Euclidean division; requires every quotient step exact over Z
        (always true for monic divisors)."""
        if other.is_zero:
            raise ZeroDivisionError
        r = list(self.coeffs)
        d = other.degree
        lc = other.lc
        q = [0] * max(0, len(r) - d)
        for i in range(len(r) - d - 1, -1, -1):
            c = r[i + d]
            if c % lc != 0:
                raise ValueError("non-exact division")
            c //= lc
            q[i] = c
            if c:
                for j, oc in enumerate(other.coeffs):
                    r[i + j] -= c * oc
        return IntPoly(_trim(q)), IntPoly(_trim(r))

    def content(self) -> int:
        return math.gcd(*self.coeffs) if self.coeffs else 0

    def primitive(self) -> "IntPoly":
        c = self.content()
        return IntPoly(tuple(x // c for x in self.coeffs)) if c > 1 else self

    def compose_linear(self, a: int, b: int) -> "IntPoly":
        """f(a*x + b)."""
        out = IntPoly(())
        ax_b = IntPoly.of(b, a)
        for c in reversed(self.coeffs):
            out = out * ax_b + IntPoly.of(c)
        return out

    def reverse(self) -> "IntPoly":
        return IntPoly(_trim(reversed(self.coeffs)))

    def __repr__(self):
        if self.is_zero:
            return "IntPoly(0)"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                terms.append(f"{c}*x^{i}" if i else f"{c}")
        return "IntPoly(" + " + ".join(terms) + ")"


def resultant(f: IntPoly, g: IntPoly) -> int:
    """Resultant over Z via fraction-free (Bareiss) elimination of the
    Sylvester matrix.  Unconditionally correct; fine for degree <= 24."""
    if f.is_zero or g.is_zero:
        return 0
    m, n = f.degree, g.degree
    if m == 0:
        return f.coeffs[0] ** n
    if n == 0:
        return g.coeffs[0] ** m
    size = m + n
    # Sylvester matrix, rows of g first then rows of f is a convention choice;
    # use the standard layout: n rows of f-coefficients, m rows of g.
    mat = [[0] * size for _ in range(size)]
    fc = list(reversed(f.coeffs))
    gc = list(reversed(g.coeffs))
    for i in range(n):
        for j, c in enumerate(fc):
            mat[i][i + j] = c
    for i in range(m):
        for j, c in enumerate(gc):
            mat[n + i][i + j] = c
    return _bareiss_det(mat)


def _bareiss_det(mat):
    n = len(mat)
    m = [row[:] for row in mat]
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
            m[i][k] = 0
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def poly_discriminant(f: IntPoly) -> int:
    """disc(f) = (-1)^(d(d-1)/2) Res(f, f') / lc(f)."""
    d = f.degree
    if d < 1:
        raise ValueError("discriminant needs degree >= 1")
    if d == 1:
        return 1
    r = resultant(f, f.derivative())
    s = -1 if (d * (d - 1) // 2) % 2 else 1
    q, rem = divmod(s * r, f.lc)
    assert rem == 0
    return q


# ---------------------------------------------------------------------------
# polynomials over F_p (coefficient lists, low degree first, reduced mod p)

def pmod(f, p):
    """Reduce coefficient list mod p and trim."""
    c = [x % p for x in f]
    while c and c[-1] == 0:
        c.pop()
    return c


def pmod_mul(a, b, p):
    if not a or not b:
        return []
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                out[i + j] = (out[i + j] + ai * bj) % p
    while out and out[-1] == 0:
        out.pop()
    return out


def pmod_divmod(a, b, p):
    if not b:
        raise ZeroDivisionError
    r = list(a)
    db = len(b) - 1
    inv = pow(b[-1], -1, p)
    q = [0] * max(0, len(r) - db)
    for i in range(len(r) - db - 1, -1, -1):
        c = r[i + db] * inv % p
        q[i] = c
        if c:
            for j, bc in enumerate(b):
                r[i + j] = (r[i + j] - c * bc) % p
    while r and r[-1] == 0:
        r.pop()
    while q and q[-1] == 0:
        q.pop()
    return q, r


def pmod_gcd(a, b, p):
    a, b = list(a), list(b)
    while b:
        a, b = b, pmod_divmod(a, b, p)[1]
    if a:
        inv = pow(a[-1], -1, p)
        a = [c * inv % p for c in a]
    return a


def pmod_pow(base, e, mod, p):
    """base^e modulo the polynomial `mod`, coefficients mod p."""
    result = [1]
    base = pmod_divmod(base, mod, p)[1]
    while e:
        if e & 1:
            result = pmod_divmod(pmod_mul(result, base, p), mod, p)[1]
        base = pmod_divmod(pmod_mul(base, base, p), mod, p)[1]
        e >>= 1
    return result


def _pmod_deriv(f, p):
    return pmod([i * c for i, c in enumerate(f)][1:], p) if len(f) > 1 else []


def _pth_root_poly(f, p):
    # f is a polynomial in x^p; take p-th roots of coefficients (Frobenius)
    out = []
    q = len(f)
    for i in range(0, q, p):
        # coefficient of x^(i) goes to x^(i/p); c^(1/p) = c^(p^(e-1)) in F_p = c
        out.append(f[i])
    return out


def squarefree_decomposition(f, p):
    """Yun-type decomposition over F_p -> list of (factor, multiplicity)."""
    f = pmod(f, p)
    out = []
    if len(f) <= 1:
        return out
    inv = pow(f[-1], -1, p)
    f = [c * inv % p for c in f]

    def rec(g, mult):
        if len(g) <= 1:
            return
        dg = _pmod_deriv(g, p)
        if not dg:
            # g = h(x^p) = h(x)^p
            rec(_pth_root_poly(g, p), mult * p)
            return
        c = pmod_gcd(g, dg, p)
        w = pmod_divmod(g, c, p)[0]
        i = 1
        while len(w) > 1:
            y = pmod_gcd(w, c, p)
            z = pmod_divmod(w, y, p)[0]
            if len(z) > 1:
                out.append((z, mult * i))
            c = pmod_divmod(c, y, p)[0]
            w = y
            i += 1
        if len(c) > 1:
            rec(c, mult)

    rec(f, 1)
    return out


def _ddf(f, p):
    # distinct-degree factorization of a squarefree monic f; list of (product, d)
    out = []
    x = [0, 1]
    h = x[:]
    v = f[:]
    d = 0
    while len(v) - 1 > 2 * d:
        d += 1
        h = pmod_pow(h, p, v, p)
        g = pmod_gcd(pmod([a - b for a, b in zip_longest_sub(h, x)], p), v, p)
        if len(g) > 1:
            out.append((g, d))
            v = pmod_divmod(v, g, p)[0]
            h = pmod_divmod(h, v, p)[1]
    if len(v) > 1:
        out.append((v, len(v) - 1))
    return out


def zip_longest_sub(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0, b[i] if i < len(b) else 0) for i in range(n)]


def _edf(f, d, p, rng):
    # equal-degree splitting (Cantor-Zassenhaus); f squarefree monic, all
    # irreducible factors of degree d
    n = len(f) - 1
    if n == d:
        return [f]
    while True:
        a = [rng.randrange(p) for _ in range(n)]
        a = pmod(a, p)
        if len(a) <= 0:
            continue
        if p == 2:
            # trace map sum a^(2^i) for i < d
            t = a[:]
            acc = a[:]
            for _ in range(d - 1):
                acc = pmod_pow(acc, 2, f, 2)
                t = pmod([x + y for x, y in zip_longest_sub(t, acc)], 2)
            g = pmod_gcd(t, f, p)
        else:
            e = (p**d - 1) // 2
            b = pmod_pow(a, e, f, p)
            b = pmod([x - y for x, y in zip_longest_sub(b, [1])], p)
            g = pmod_gcd(b, f, p)
        if 0 < len(g) - 1 < n:
            h = pmod_divmod(f, g, p)[0]
            return _edf(g, d, p, rng) + _edf(h, d, p, rng)


def factor_mod_p(f, p, seed: int = 7):
    """Factor f over F_p -> sorted list of (monic factor coeffs, multiplicity).

    Distinct-degree then Cantor-Zassenhaus equal-degree splitting; the seed
    only affects the internal search path, never the result.
    """
    f = pmod(f, p)
    if len(f) <= 1:
        raise ValueError("constant polynomial")
    rng = random.Random((seed, p, tuple(f)).__hash__())
    out = []
    for g, mult in squarefree_decomposition(f, p):
        for h, d in _ddf(g, p):
            for irr in _edf(h, d, p, rng):
                out.append((tuple(irr), mult))
    out.sort(key=lambda t: (len(t[0]), t[0]))
    return out


def roots_mod_p(f, p):
    """Roots of f in F_p (each once, even if multiple)."""
    f = pmod(f, p)
    if not f:
        return list(range(p))
    if len(f) == 1:
        return []
    # gcd with x^p - x isolates the distinct linear part
    xp = pmod_pow([0, 1], p, f, p)
    g = pmod_gcd(pmod([a - b for a, b in zip_longest_sub(xp, [0, 1])], p), f, p)
    roots = []
    if len(g) - 1 >= 1:
        for fac, _ in factor_mod_p(g, p):
            if len(fac) == 2:
                roots.append((-fac[0]) * pow(fac[1], -1, p) % p)
    return sorted(roots)


def lift_root(f: IntPoly, p: int, r: int, k: int) -> int:
    """Hensel-lift a simple root r of f mod p to a root mod p^k."""
    pk = p
    fr = f.derivative()
    while pk < p**k:
        pk = min(pk * pk, p**k)
        d = fr(r) % pk
        r = (r - f(r) * pow(d, -1, pk)) % pk
    assert f(r) % p**k == 0
    return r


def legendre(a: int, p: int) -> int:
    """Legendre symbol (a/p) for odd prime p, values -1, 0, 1."""
    a %= p
    if a == 0:
        return 0
    t = pow(a, (p - 1) // 2, p)
    return 1 if t == 1 else -1
