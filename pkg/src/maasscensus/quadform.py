"""Class groups of real quadratic fields through binary quadratic forms.

Everything here is exact integer arithmetic on forms (a, b, c) of positive
nonsquare discriminant D = b^2 - 4ac.  Proper equivalence classes of
primitive forms make up the narrow class group; classes are tested equal by
comparing rho-cycles of reduced forms, and composed by Gauss's method after
moving to concordant representatives.  The fundamental unit comes from the
continued fraction of (1 + sqrt D)/2, which is also a wholly independent
check on the narrow-versus-wide question via the norm sign.

This engine deliberately shares nothing with the factor-base relation
machinery; the census uses the two against each other.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

import mpmath


def _isqrt(n):
    return math.isqrt(n)


def _check_disc(D: int):
    if D <= 0:
        raise ValueError("discriminant must be positive")
    if D % 4 not in (0, 1):
        raise ValueError("discriminant must be 0 or 1 mod 4")
    r = _isqrt(D)
    if r * r == D:
        raise ValueError("discriminant must not be a square")


def is_reduced(form, D: int) -> bool:
    """|sqrt(D) - 2|a|| < b < sqrt(D), in exact integer form."""
    a, b, c = form
    if b <= 0 or b * b >= D:
        return False
    if (2 * abs(a) + b) ** 2 <= D:
        return False
    if 2 * abs(a) > b and (2 * abs(a) - b) ** 2 >= D:
        return False
    return True


def rho(form, D: int):
    """One reduction/cycle step: (a,b,c) -> (c, r, (r^2-D)/(4c))."""
    a, b, c = form
    rt = _isqrt(D)
    m = 2 * abs(c)
    r0 = (-b) % m
    if abs(c) > rt:
        r = r0 - m if r0 > abs(c) else r0
    else:
        r = rt - ((rt - r0) % m)
    c2, rem = divmod(r * r - D, 4 * c)
    assert rem == 0
    return (c, r, c2)


def reduce_form(form, D: int):
    a, b, c = form
    assert b * b - 4 * a * c == D
    for _ in range(10 * (D.bit_length() + 4)):
        if is_reduced((a, b, c), D):
            return (a, b, c)
        a, b, c = rho((a, b, c), D)
    raise ArithmeticError("reduction did not terminate")


def cycle(form, D: int):
    """The full rho-cycle of a reduced form."""
    f0 = reduce_form(form, D)
    out = [f0]
    f = rho(f0, D)
    while f != f0:
        out.append(f)
        f = rho(f, D)
    return out


def class_label(form, D: int):
    """Canonical label of the proper equivalence class: lex-least in cycle."""
    return min(cycle(form, D))


def principal_form(D: int):
    b = _isqrt(D)
    if (b - D) % 2:
        b -= 1
    c = (b * b - D) // 4
    return reduce_form((1, b, c), D)


def _transform(form, M):
    """Right action of M = [[x, r],[y, s]] in SL2(Z) on the form."""
    a, b, c = form
    x, r, y, s = M
    assert x * s - r * y == 1
    a2 = a * x * x + b * x * y + c * y * y
    b2 = 2 * a * x * r + b * (x * s + r * y) + 2 * c * y * s
    c2 = a * r * r + b * r * s + c * s * s
    return (a2, b2, c2)


def _concordant_leading(form, coprime_to: int, D: int):
    """An equivalent form whose leading coefficient is coprime to the target
    and nonzero, found by scanning small primitive vectors."""
    a, b, c = form
    for box in (6, 12, 24, 48):
        for x in range(-box, box + 1):
            for y in range(-box, box + 1):
                if math.gcd(x, y) != 1:
                    continue
                v = a * x * x + b * x * y + c * y * y
                if v != 0 and math.gcd(v, coprime_to) == 1:
                    # complete (x, y) to SL2
                    g, r, s = _xgcd(x, y)
                    assert g == 1
                    M = (x, -s, y, r)
                    assert x * r - (-s) * y == 1
                    return _transform((a, b, c), M)
    raise ArithmeticError("no concordant representative found")


def _xgcd(a, b):
    x0, x1, y0, y1 = 1, 0, 0, 1
    while b:
        q, a, b = a // b, b, a % b
        x0, x1 = x1, x0 - q * x1
        y0, y1 = y1, y0 - q * y1
    if a < 0:
        a, x0, y0 = -a, -x0, -y0
    return a, x0, y0


def compose(f1, f2, D: int):
    """Gauss composition of proper classes via concordant representatives.

    Replace f2 by an equivalent form with leading coefficient coprime to
    a1; then B is determined by CRT and the composite is
    (a1*a2, B, (B^2-D)/(4 a1 a2)).  Returns a reduced representative.
    """
    a1, b1, c1 = reduce_form(f1, D)
    f2 = _concordant_leading(reduce_form(f2, D), 2 * a1, D)
    a2, b2, c2 = f2
    assert math.gcd(a1, a2) == 1
    # B = b1 mod 2a1, B = b2 mod 2a2; moduli share only the factor 2,
    # and b1 = b2 = D mod 2, so the system is solvable
    g, u, v = _xgcd(2 * a1, 2 * a2)
    assert g == 2 and (b2 - b1) % 2 == 0
    B = b1 + 2 * a1 * u * ((b2 - b1) // 2)
    mod = 2 * a1 * a2
    B %= mod
    assert (B - b1) % (2 * a1) == 0 and (B - b2) % (2 * a2) == 0
    a3 = a1 * a2
    c3, rem = divmod(B * B - D, 4 * a3)
    assert rem == 0
    return reduce_form((a3, B, c3), D)


def form_inverse(form, D: int):
    a, b, c = form
    return reduce_form((a, -b, c), D)


def _primitive(form) -> bool:
    a, b, c = form
    return math.gcd(math.gcd(a, b), c) == 1


def all_reduced_forms(D: int):
    """Every primitive reduced form of discriminant D."""
    _check_disc(D)
    rt = _isqrt(D)
    out = []
    b = rt if (rt - D) % 2 == 0 else rt - 1
    while b > 0:
        M4 = D - b * b
        assert M4 % 4 == 0
        M = M4 // 4
        u = 1
        while u * u <= M:
            if M % u == 0:
                for a in {u, M // u, -u, -(M // u)}:
                    c = -(M // a)
                    f = (a, b, c)
                    if is_reduced(f, D) and _primitive(f):
                        out.append(f)
            u += 1
        b -= 2
    return sorted(out)


@dataclass
class FormClassGroup:
    D: int
    h: int
    labels: list          # canonical cycle labels, principal first
    structure: tuple      # invariant factors d1 | d2 | ...
    unit_xy: tuple        # fundamental unit (x + y sqrt D)/2
    unit_norm: int        # +1 or -1
    regulator: float

    @property
    def narrow_equals_wide(self):
        return self.unit_norm == -1

    def p_rank(self, p: int) -> int:
        e = self.labels[0]
        cnt = sum(1 for lab in self.labels if _power_class(lab, p, self.D) == e)
        r = 0
        while p**r < cnt:
            r += 1
        assert p**r == cnt
        return r


def _power_class(label, n: int, D: int):
    result = class_label(principal_form(D), D)
    base = label
    while n:
        if n & 1:
            result = class_label(compose(result, base, D), D)
        base = class_label(compose(base, base, D), D)
        n >>= 1
    return result


def form_class_group(D: int) -> FormClassGroup:
    """The narrow class group of discriminant D, fully enumerated."""
    forms = all_reduced_forms(D)
    labels = []
    seen = set()
    for f in forms:
        if f in seen:
            continue
        cyc = cycle(f, D)
        seen.update(cyc)
        labels.append(min(cyc))
    labels.sort()
    e = class_label(principal_form(D), D)
    labels.remove(e)
    labels.insert(0, e)
    h = len(labels)
    structure = _structure_from_torsion(labels, h, D, e)
    x, y, norm, reg = fundamental_unit(D)
    return FormClassGroup(
        D=D, h=h, labels=labels, structure=structure,
        unit_xy=(x, y), unit_norm=norm, regulator=reg,
    )


def _structure_from_torsion(labels, h: int, D: int, e):
    """Invariant factors from torsion counts t(p^j) = #{x : x^(p^j) = e}."""
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
        j = 1
        prev = 1
        while True:
            t = sum(1 for lab in labels if _power_class(lab, p**j, D) == e)
            r = 0
            while p**r < t // prev:
                r += 1
            assert p**r * prev == t
            if r == 0:
                break
            ranks.append(r)
            prev = t
            j += 1
        # ranks[j-1] = number of cyclic p-factors of order >= p^j
        orders = []
        for idx, r in enumerate(ranks):
            nxt = ranks[idx + 1] if idx + 1 < len(ranks) else 0
            orders.extend([p ** (idx + 1)] * (r - nxt))
        parts[p] = sorted(orders)
    # merge p-parts into invariant factors d1 | d2 | ...
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


def three_rank(D: int) -> int:
    """3-rank of the narrow class group (= wide 3-rank; 3 is odd)."""
    forms = all_reduced_forms(D)
    e = class_label(principal_form(D), D)
    cnt = 0
    seen = set()
    for f in forms:
        if f in seen:
            continue
        cyc = cycle(f, D)
        seen.update(cyc)
        if _power_class(min(cyc), 3, D) == e:
            cnt += 1
    r = 0
    while 3**r < cnt:
        r += 1
    assert 3**r == cnt
    return r


# ---------------------------------------------------------------------------
# fundamental unit by continued fractions

def fundamental_unit(D: int):
    """Fundamental unit of the quadratic order of discriminant D.

    Returns (x, y, norm, regulator) with eps = (x + y sqrt D)/2 > 1 and
    N(eps) = norm.  Classical PQa: expand omega = (1+sqrt D)/2 (D odd) or
    sqrt(D/4) (D even), find the period of the tail, and read the unit off
    the convergent matrix of one full period.
    """
    _check_disc(D)
    if D % 2:
        R = D        # expand (1 + sqrt R)/2
        P, Q = 1, 2
    else:
        R = D // 4   # expand sqrt R; the order is Z[sqrt R]
        P, Q = 0, 1
    rt = _isqrt(R)
    seen = {}
    hist = []
    i = 0
    while (P, Q) not in seen:
        seen[(P, Q)] = i
        assert Q > 0
        a = (P + rt) // Q
        hist.append((P, Q, a))
        P2 = a * Q - P
        Q2, rem = divmod(R - P2 * P2, Q)
        assert rem == 0
        P, Q = P2, Q2
        i += 1
    j = seen[(P, Q)]
    k = i - j
    p, p1 = 1, 0
    q, q1 = 0, 1
    for (_, _, a) in hist[j:]:
        p, p1 = a * p + p1, p
        q, q1 = a * q + q1, q
    Pj, Qj, _ = hist[j]
    # eps = q * (Pj + sqrt R)/Qj + q1, written as (x + y sqrt D)/2
    num_rat = q * Pj + q1 * Qj
    x, rem1 = divmod(2 * num_rat, Qj)
    y_num = 2 * q if D % 2 else q
    y, rem2 = divmod(y_num, Qj)
    assert rem1 == 0 and rem2 == 0, "unit must lie in the order"
    norm = (-1) ** k
    check = x * x - D * y * y
    assert check == 4 * norm, (x, y, check)
    reg = float(mpmath.log((x + y * mpmath.sqrt(D)) / 2))
    assert reg > 0
    return x, y, norm, reg
