"""Quadratic towers over census cubics and their degree-12 fields.

A census cubic L with even class number carries quadratic extensions
unramified at every place, the infinite ones included.  Their Kummer
generators are the field elements alpha, taken modulo squares, that are
totally positive, generate the square of an ideal, and are congruent to
a square modulo 4.  This module finds one such alpha for every nonzero
2-torsion class: the sign conditions and the mod-4 conditions are both
linear over F2 in the exponents of the class generators and the
fundamental units, so a single kernel computation produces the whole
group, and every returned element is then re-verified exactly (ideal
equality, certified signs, square class mod 4).

Two independent generators alpha1, alpha2 spanning a Galois-stable plane
with irreducible action give the compositum K = L(sqrt alpha1, sqrt
alpha2), a totally real field of degree 12 whose Galois closure has the
rotation group of the tetrahedron: the cubic action permutes the three
quadratic subextensions, and no proper part is stable.  A defining
polynomial comes from a resultant against the cubic, using the primitive
element c1 sqrt(alpha1) + c2 sqrt(alpha2) with small integers c from a
fixed sequence, retried until the polynomial is squarefree.  Because the
quadratic layer is certified unramified, the discriminant of K is the
eighth power of the level with no computation on the big polynomial; the
splitting of the level itself is read off a locally maximal order.

Frobenius data for good p reduces the polynomial mod p.  The residue
degree pattern can only be twelve fixed points, six transpositions, or
four 3-cycles, and the square of the corresponding Maass form coefficient
mod 3 follows from the trace table of the binary tetrahedral group,
derived here by brute force over the 24 elements.
"""

import itertools
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction

from .classgroup import ClassGroupData, IncompleteRunError
from .exactarith import IntPoly, factor_mod_p, is_prime, poly_discriminant, primes_up_to
from .galmod import f2_module_decompose, fp_kernel, fp_rank, fp_solve, u2_block_basis
from .numfield import Ideal, NumberField, _p_maximal_order, prime_decomposition
from .rayclass import IntegrityError


class ConventionSensitiveError(ArithmeticError):
    """Narrow and wide 2-ranks disagree, so counting quadratic extensions
    by wide 2-torsion alone would be convention-dependent for this field."""


@dataclass(frozen=True)
class SelmerElement:
    """Kummer generator of an everywhere-unramified quadratic extension.

    alpha is totally positive with (alpha) the square of the witness
    ideal; combo records which 2-torsion basis classes it realizes.
    """

    alpha: tuple
    ideal_square_witness: Ideal
    totally_positive: bool
    combo: tuple = field(compare=False)


@dataclass(frozen=True)
class A4FieldData:
    """Degree-12 field of tetrahedral type over one census level."""

    degree12_poly: IntPoly
    base_cubic: NumberField = field(repr=False)
    submodule_label: int
    ell: int
    alphas: tuple = field(repr=False, compare=False)
    poly_disc: int = field(repr=False, compare=False)
    splitting: tuple = field(compare=False)


@dataclass(frozen=True)
class FrobeniusClassData:
    p: int
    a4_class: str
    trace_squared_mod3: int


# ---------------------------------------------------------------------------
# square classes modulo 4

class _Mod4Classes:
    """F2 coordinates on the odd residues mod 4 up to squares.

    A quadratic extension by the square root of an odd element is
    unramified above 2 exactly when the element is a square mod 4, and
    the class of x mod squares is linear in x over F2, so membership
    turns the 2-adic condition into matrix rows.
    """

    def __init__(self, nf):
        self.nf = nf
        n = nf.n
        inv = [list(t) for t in itertools.product(range(4), repeat=n)
               if nf.norm(list(t)) % 2 == 1]
        self.squares = {self._red(nf.mul(v, v)) for v in inv}
        one = self._red(nf.one())
        reps = {self._key(one): 0}
        elems = {0: list(one)}
        gens = 0
        for v in inv:
            if self._key(v) in reps:
                continue
            bit = 1 << gens
            gens += 1
            for mask, e in list(elems.items()):
                prod = list(self._red(nf.mul(e, v)))
                reps[self._key(prod)] = mask | bit
                elems[mask | bit] = prod
        self.dim = gens
        self._reps = reps

    def _red(self, v):
        return tuple(c % 4 for c in v)

    def _key(self, v):
        x = list(self._red(v))
        return min(self._red(self.nf.mul(x, list(s))) for s in self.squares)

    def bits(self, x):
        assert self.nf.norm(list(x)) % 2 == 1, "element is even"
        mask = self._reps[self._key(x)]
        return [(mask >> i) & 1 for i in range(self.dim)]

    def is_square_class(self, x):
        return not any(self.bits(x))


def _odd_representative(cg, vec):
    """Vector in the same ideal class supported away from 2.

    The mod-4 criterion needs an odd generator, so when the stored
    2-torsion vector touches primes over 2 a small breadth-first search
    over products of odd factor-base primes finds an equivalent one.
    """
    if all(cg.fb.prime_of_col(c) != 2 for c in vec):
        return dict(vec)
    target = cg.class_vector(vec)
    odd_cols = [c for c in range(cg.fb.ncols) if cg.fb.prime_of_col(c) != 2]
    single = {c: cg.class_vector({c: 1}) for c in odd_cols}
    zero = tuple([0] * len(target))
    seen = {zero: ()}
    queue = deque([zero])
    while queue:
        state = queue.popleft()
        path = seen[state]
        if len(path) >= 6:
            continue
        for c in odd_cols:
            ns = tuple((a + b) % d for a, b, d in
                       zip(state, single[c], cg.invariants))
            if ns in seen:
                continue
            seen[ns] = path + (c,)
            if ns == target:
                out = {}
                for col in seen[ns]:
                    out[col] = out.get(col, 0) + 1
                return out
            queue.append(ns)
    raise ArithmeticError("no odd representative of the class was found")


def selmer_unramified_quadratics(cg: ClassGroupData) -> list[SelmerElement]:
    """Kummer generators for every nontrivial everywhere-unramified
    quadratic extension of the field of cg.

    Returns 2^r - 1 elements for 2-rank r, ordered by the bitmask of
    their 2-torsion class combination, each verified exactly.  Raises
    ConventionSensitiveError when the narrow and wide 2-ranks disagree.
    """
    if not isinstance(cg, ClassGroupData) or cg.status != "certified":
        raise IncompleteRunError("a certified class group is required")
    nf = cg.nf
    torsion = cg.two_torsion_vectors()
    r = len(torsion)
    if r == 0:
        return []
    narrow = cg.narrow_two_rank()
    if narrow != r:
        raise ConventionSensitiveError(
            f"narrow 2-rank {narrow} differs from wide 2-rank {r}"
        )
    odd_reps = [_odd_representative(cg, t) for t in torsion]
    gammas = [
        cg.principal_generator({c: 2 * v for c, v in rep.items()})
        for rep in odd_reps
    ]
    assert all(g is not None for g in gammas)
    units = cg.fundamental_units() + [[-c for c in nf.one()]]
    mod4 = _Mod4Classes(nf)
    cols = []
    for x in gammas + units:
        sign_bits = [1 if s < 0 else 0 for s in nf.signs(x)]
        cols.append(sign_bits + mod4.bits(x))
    rows = [[col[i] for col in cols] for i in range(len(cols[0]))]
    kernel = fp_kernel(rows, 2)
    s_rows = [kb[:r] for kb in kernel]
    if len(kernel) != r or fp_rank(s_rows, 2) != r:
        raise IntegrityError(
            "solvable sign and mod-4 conditions do not match the 2-torsion: "
            f"kernel dimension {len(kernel)}, class projection rank "
            f"{fp_rank(s_rows, 2)}, expected {r}"
        )
    basis_alphas = []
    for i in range(r):
        target = [1 if j == i else 0 for j in range(r)]
        lam = fp_solve([list(c) for c in zip(*s_rows)], target, 2)
        assert lam is not None
        alpha = list(gammas[i])
        for t, l in enumerate(lam):
            if not l:
                continue
            for j, e in enumerate(kernel[t][r:]):
                if e:
                    alpha = list(nf.mul(alpha, units[j]))
        basis_alphas.append(alpha)
    out = []
    for mask in range(1, 2 ** r):
        combo = tuple((mask >> i) & 1 for i in range(r))
        alpha = nf.one()
        witness_vec = {}
        for i in range(r):
            if combo[i]:
                alpha = list(nf.mul(alpha, basis_alphas[i]))
                for c, v in odd_reps[i].items():
                    witness_vec[c] = witness_vec.get(c, 0) + v
        witness = cg.ideal_of_vector(witness_vec)
        if Ideal.principal(nf, alpha) != witness.power(2):
            raise IntegrityError("generator does not match its ideal witness")
        if any(s < 0 for s in nf.signs(alpha)):
            raise IntegrityError("generator is not totally positive")
        if not mod4.is_square_class(alpha):
            raise IntegrityError("generator is not a square modulo 4")
        out.append(SelmerElement(tuple(alpha), witness, True, combo))
    return out


# ---------------------------------------------------------------------------
# the Galois action on 2-torsion and the degree-12 field

def torsion_sigma_matrix(cg: ClassGroupData, sigma) -> list:
    """Matrix of the cubic automorphism on the 2-torsion basis, over F2."""
    torsion = cg.two_torsion_vectors()
    evpos = [j for j, d in enumerate(cg.invariants) if d % 2 == 0]
    assert len(evpos) == len(torsion)
    lookup = cg.fb.sigma_col_map(sigma, {})
    mat = []
    for t in torsion:
        image = {}
        for c, v in t.items():
            image[lookup(c)] = image.get(lookup(c), 0) + v
        y = cg.class_vector(image)
        row = []
        for j in evpos:
            half = cg.invariants[j] // 2
            if y[j] == 0:
                row.append(0)
            elif y[j] == half:
                row.append(1)
            else:
                raise IntegrityError("automorphism image is not 2-torsion")
        mat.append(row)
    return mat


_C_SEQUENCE = ((1, 1), (2, 1), (1, 2), (3, 1), (1, 3), (3, 2), (2, 3),
               (4, 1), (1, 4), (5, 2))


def _poly_mul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                if y:
                    out[i + j] += x * y
    return out


def _poly_sub(a, b):
    n = max(len(a), len(b))
    return [
        (a[i] if i < len(a) else 0) - (b[i] if i < len(b) else 0)
        for i in range(n)
    ]


def _poly_det(mat):
    if len(mat) == 1:
        return mat[0][0]
    out = [Fraction(0)]
    for j, top in enumerate(mat[0]):
        if top == [0] or not any(top):
            continue
        minor = [row[:j] + row[j + 1:] for row in mat[1:]]
        term = _poly_mul(top, _poly_det(minor))
        if j % 2:
            term = [-c for c in term]
        out = [x + y for x, y in
               zip(out + [Fraction(0)] * (len(term) - len(out)),
                   term + [Fraction(0)] * (len(out) - len(term)))]
    return out


def _resultant_minpoly(nf, alpha1, alpha2, c1, c2):
    """Minimal-polynomial candidate of c1 sqrt(a1) + c2 sqrt(a2) over Q.

    The primitive element satisfies a quartic over the cubic whose
    coefficients are quadratics in the cubic generator; the resultant
    against the defining cubic eliminates that generator.  Entries are
    x-polynomials with Fraction coefficients; the output is integral and
    monic because the element is an algebraic integer.
    """
    beta = nf.add(nf.mul_int(alpha1, c1 * c1), nf.mul_int(alpha2, c2 * c2))
    prod = nf.mul(alpha1, alpha2)
    q0 = nf.sub(nf.mul(beta, beta), nf.mul_int(prod, 4 * c1 * c1 * c2 * c2))
    b = nf.to_power_basis(beta)
    q = nf.to_power_basis(q0)
    # G(x, y) = x^4 - 2 beta(y) x^2 + q0(y), collected by powers of y
    g = [
        [q[0], Fraction(0), -2 * b[0], Fraction(0), Fraction(1)],
        [q[1], Fraction(0), -2 * b[1]],
        [q[2], Fraction(0), -2 * b[2]],
    ]
    f = [Fraction(c) for c in nf.f.coeffs]  # ascending, degree 3, monic
    rows = []
    for shift in range(2):
        row = [[Fraction(0)]] * shift
        row += [[f[3 - k]] for k in range(4)]
        row += [[Fraction(0)]] * (1 - shift)
        rows.append(row)
    for shift in range(3):
        row = [[Fraction(0)]] * shift
        row += [g[2], g[1], g[0]]
        row += [[Fraction(0)]] * (2 - shift)
        rows.append(row)
    det = _poly_det(rows)
    while det and not det[-1]:
        det.pop()
    assert len(det) == 13, "resultant degree is wrong"
    if det[-1] < 0:
        det = [-c for c in det]
    assert det[-1] == 1, "primitive element is not integral-monic"
    out = []
    for c in det:
        assert c.denominator == 1
        out.append(int(c))
    return IntPoly.from_list(out)


def _ell_local_splitting(f12: IntPoly, ell: int, disc_f: int):
    """Splitting shape of ell from an order maximal at ell only.

    Round 2 at the single prime ell avoids factoring the polynomial
    discriminant, whose non-ell part is index junk from the resultant.
    """
    basis_num, basis_den = _p_maximal_order(
        f12, ell, [[1 if i == j else 0 for j in range(12)] for i in range(12)], 1
    )
    from .numfield import _det_triangularized

    idx = basis_den ** 12 // abs(_det_triangularized(basis_num))
    shim = NumberField(f12, basis_num, basis_den, idx if idx > 1 else 1,
                       disc_f // (idx * idx))
    shim._build_table()
    decomp = prime_decomposition(shim, ell)
    shapes = sorted((P.e, P.f_deg) for P in decomp)
    return shapes


def a4_field(cg: ClassGroupData, selmer, submodule_index: int, sigma) -> A4FieldData:
    """Degree-12 tetrahedral field for one Galois-plane of Kummer generators.

    The 2-torsion module decomposes into k irreducible planes; the
    submodule index enumerates the 2^k - 1 diagonal planes in a fixed
    order.  The compositum of the two corresponding quadratic extensions
    is Galois over Q with the tetrahedral rotation group: the plane is
    stable with irreducible action, and both facts are certified on the
    class side, so the discriminant is the eighth power of the level by
    the unramifiedness certificates alone.
    """
    nf = cg.nf
    ell = nf.conductor_label
    assert ell is not None, "base field must be a labeled cyclic cubic"
    mat = torsion_sigma_matrix(cg, sigma)
    k, m = f2_module_decompose(mat)
    if m:
        raise IntegrityError("2-torsion has invariant classes under the action")
    if not 0 <= submodule_index < 2 ** k - 1:
        raise ValueError(f"submodule index out of range for k={k}")
    blocks = u2_block_basis(mat)
    cbits = [(submodule_index + 1 >> i) & 1 for i in range(k)]
    r = len(mat)

    def combine(which):
        w = [0] * r
        for i, c in enumerate(cbits):
            if c:
                w = [(a + b) % 2 for a, b in zip(w, blocks[i][which])]
        return w

    w1, w2 = combine(0), combine(1)
    masks = [sum(b << i for i, b in enumerate(w)) for w in (w1, w2)]
    assert masks[0] and masks[1] and masks[0] != masks[1]
    a1 = selmer[masks[0] - 1]
    a2 = selmer[masks[1] - 1]
    assert a1.combo == tuple(w1) and a2.combo == tuple(w2)
    for c1, c2 in _C_SEQUENCE:
        f12 = _resultant_minpoly(nf, list(a1.alpha), list(a2.alpha), c1, c2)
        disc_f = poly_discriminant(f12)
        if disc_f != 0:
            break
    else:
        raise ArithmeticError("no squarefree primitive element found")
    shapes = _ell_local_splitting(f12, ell, disc_f)
    if shapes != [(3, 1)] * 4:
        raise IntegrityError(f"level splits as {shapes}, not four cubed primes")
    return A4FieldData(
        degree12_poly=f12,
        base_cubic=nf,
        submodule_label=submodule_index,
        ell=ell,
        alphas=(a1.alpha, a2.alpha),
        poly_disc=disc_f,
        splitting=(3, 1, 4),
    )


# ---------------------------------------------------------------------------
# Frobenius classes and the mod-3 trace table

def _sl2_f3_trace_squares():
    """Trace data of the binary tetrahedral group by brute force.

    Enumerates the 24 determinant-one matrices over F3, groups them by
    the order of their image in the quotient by the center, and checks
    that the squared trace is constant on each class.
    """
    center = {((1, 0), (0, 1)), ((2, 0), (0, 2))}

    def mul(a, b):
        return (
            ((a[0][0] * b[0][0] + a[0][1] * b[1][0]) % 3,
             (a[0][0] * b[0][1] + a[0][1] * b[1][1]) % 3),
            ((a[1][0] * b[0][0] + a[1][1] * b[1][0]) % 3,
             (a[1][0] * b[0][1] + a[1][1] * b[1][1]) % 3),
        )

    table = {}
    for a, b, c, d in itertools.product(range(3), repeat=4):
        if (a * d - b * c) % 3 != 1:
            continue
        mat = ((a, b), (c, d))
        order, power = 1, mat
        while power not in center:
            power = mul(power, mat)
            order += 1
        tsq = ((a + d) * (a + d)) % 3
        table.setdefault(order, set()).add(tsq)
    assert table == {1: {1}, 2: {0}, 3: {1}}
    return {1: 1, 2: 0, 3: 1}


_TRACE_SQUARES = None


def _pattern_class(degrees):
    counts = {}
    for d in degrees:
        counts[d] = counts.get(d, 0) + 1
    if counts == {1: 12}:
        return "identity", 1
    if counts == {2: 6}:
        return "double-transposition", 2
    if counts == {3: 4}:
        return "three-cycle", 3
    return None, None


def frobenius_data(K: A4FieldData, p: int) -> FrobeniusClassData:
    """Frobenius class of a good prime from the residue degree pattern."""
    global _TRACE_SQUARES
    if not is_prime(p):
        raise ValueError("p must be prime")
    if K.poly_disc % p == 0:
        raise ArithmeticError(
            f"p={p} divides the polynomial discriminant: ramified or index prime"
        )
    degrees = []
    for g, e in factor_mod_p(list(K.degree12_poly.coeffs), p):
        assert e == 1
        degrees.append(len(g) - 1)
    name, order = _pattern_class(degrees)
    if name is None:
        raise IntegrityError(f"impossible residue pattern {sorted(degrees)} at {p}")
    if _TRACE_SQUARES is None:
        _TRACE_SQUARES = _sl2_f3_trace_squares()
    return FrobeniusClassData(p, name, _TRACE_SQUARES[order])


def frobenius_statistics(K: A4FieldData, bound: int = 1000) -> dict:
    """Class counts and densities over the good primes below the bound."""
    counts = {"identity": 0, "double-transposition": 0, "three-cycle": 0}
    total = 0
    for p in primes_up_to(bound):
        if K.poly_disc % p == 0:
            continue
        fr = frobenius_data(K, p)
        counts[fr.a4_class] += 1
        total += 1
    densities = {k: v / total for k, v in counts.items()} if total else {}
    return {"counts": counts, "total": total, "densities": densities}


def mod3_distinctness(fields: list) -> int:
    """Count of pairwise-distinct degree-12 fields for one level.

    Distinct fields have distinct residual projective representations,
    so this is the number of Maass forms that remain distinct mod 3.
    """
    if not fields:
        return 0
    ells = {K.ell for K in fields}
    assert len(ells) == 1, "fields belong to different levels"
    polys = {tuple(K.degree12_poly.coeffs) for K in fields}
    labels = {K.submodule_label for K in fields}
    assert len(polys) == len(fields) == len(labels)
    return len(fields)
