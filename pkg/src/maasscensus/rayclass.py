"""2-elementary ray class quotients over a fixed odd prime.

For a totally real field with certified class and unit data, this module
computes the Galois group of the maximal multiquadratic extension that is
unramified outside the primes over ell and unramified at every real
place, as an explicit F2-space: dimension, labeled generators, and the
induced order-3 action when the field carries one.

The presentation is small by design.  Generators are the invariant-factor
classes of the class group together with one ray generator per prime over
ell (the 2-part of the local unit group at an odd prime is a single F2
line, picked out by the quadratic residue symbol).  Relations say that
the d-th power of an order-d class is a principal ideal whose generator
has known symbols, and that global units land in the ray part with their
symbols.  Everything downstream is F2 row reduction.

These dimensions drive the second-family form count: for each cubic field
of discriminant ell, with sextic Galois closure L over F = Q(sqrt ell),
the multiplicity is k_L = (dim_L - dim_F)/2, cross-checked against the
semisimple decomposition of the quotient under the order-3 action, and
the count for ell is the sum of 2^{k_L} - 1.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .classgroup import ClassGroupData, class_group
from .exactarith import is_prime
from .fields import (
    DomainError,
    cubic_fields_of_discriminant,
    galois_closure_sextic,
    real_quadratic_field,
)
from .galmod import f2_module_decompose, fp_rref
from .numfield import Ideal, NumberField, prime_decomposition
from .quadform import three_rank


class DependencyError(RuntimeError):
    """A computation was invoked without its prerequisite data."""


class IntegrityError(ArithmeticError):
    """Two independent computations of the same quantity disagree."""


# ---------------------------------------------------------------------------
# residue symbols at the primes over ell

def _poly_reduce(v, g, p):
    out = [c % p for c in v]
    f = len(g) - 1
    for i in range(len(out) - 1, f - 1, -1):
        c = out[i]
        if c:
            out[i] = 0
            for j in range(f):
                out[i - f + j] = (out[i - f + j] - c * g[j]) % p
    if len(out) >= f:
        return out[:f]
    return out + [0] * (f - len(out))


def _poly_mul_mod(a, b, g, p):
    out = [0] * (len(a) + len(b) - 1)
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                if bj:
                    out[i + j] = (out[i + j] + ai * bj) % p
    return _poly_reduce(out, g, p)


def _poly_pow_mod(v, e, g, p):
    out = _poly_reduce([1], g, p)
    base = list(v)
    while e:
        if e & 1:
            out = _poly_mul_mod(out, base, g, p)
        base = _poly_mul_mod(base, base, g, p)
        e >>= 1
    return out


class EllResidues:
    """Reduction and quadratic symbols at the primes over one odd prime.

    Each prime P over ell contributes one F2 line to the 2-part of the
    local unit group: the order of (O/P^e)^x is N(P)^(e-1) (N(P)-1), and
    the power factor is odd, so raising the exponent never changes the
    2-elementary quotient.  The symbol map is the residue character of
    order 2, computed by exact arithmetic in O/P.
    """

    def __init__(self, nf: NumberField, ell: int, exponent: int = 1):
        if ell % 2 == 0 or not is_prime(ell):
            raise DomainError("odd prime modulus support required")
        if exponent < 1:
            raise DomainError("modulus exponent must be at least 1")
        if nf.basis_den % ell == 0:
            raise ArithmeticError("integral basis denominator meets ell")
        self.nf = nf
        self.ell = ell
        self.exponent = exponent
        self.primes = prime_decomposition(nf, ell)
        self._gmods = []
        for P in self.primes:
            if P.gen_poly is None:
                raise ArithmeticError("ell divides the index of the defining order")
            gm = [c % ell for c in P.gen_poly]
            assert gm[-1] == 1, "residue polynomial must be monic"
            self._gmods.append(gm)
        m = Ideal.whole_ring(nf)
        for P in self.primes:
            m = m * P.power(exponent)
        self.modulus = m
        self._den_inv = pow(nf.basis_den, -1, ell)

    def residue(self, P_index: int, coords):
        """Image of an integral element in O/P as a residue polynomial."""
        nf, ell = self.nf, self.ell
        n = nf.n
        pb = [0] * n
        for i, c in enumerate(coords):
            ci = c % ell
            if ci:
                row = nf.basis_num[i]
                for j in range(n):
                    pb[j] = (pb[j] + ci * row[j]) % ell
        pb = [x * self._den_inv % ell for x in pb]
        return _poly_reduce(pb, self._gmods[P_index], ell)

    def symbol(self, P_index: int, coords) -> int:
        """Quadratic residue symbol at one prime, as an F2 bit."""
        v = self.residue(P_index, coords)
        if not any(v):
            raise ArithmeticError("element meets the modulus")
        q = self.ell ** self.primes[P_index].f_deg
        s = _poly_pow_mod(v, (q - 1) // 2, self._gmods[P_index], self.ell)
        if s[0] == 1 and not any(s[1:]):
            return 0
        assert s[0] == self.ell - 1 and not any(s[1:])
        return 1

    def symbols(self, coords):
        return tuple(self.symbol(i, coords) for i in range(len(self.primes)))

    def sigma_perm(self, mat):
        """How an automorphism permutes the primes over ell."""
        hnfs = [P.hnf for P in self.primes]
        out = []
        for P in self.primes:
            out.append(hnfs.index(P.apply_matrix(mat).hnf))
        assert sorted(out) == list(range(len(out)))
        return out


# ---------------------------------------------------------------------------
# the quotient

@dataclass
class RayClass2Data:
    """2-elementary ray class quotient of one field at one modulus."""

    label: str
    quotient_dim: int
    class_dim: int                 # invariant-factor generators fed in
    ray_dim: int                   # primes over ell
    generators: list               # labels, class generators then ray ones
    sigma_matrix: list | None      # order-3 action on the quotient basis
    inertia_images: list = field(repr=False)  # quotient coords of each ray generator
    modulus: Ideal = field(repr=False)


def _lift_with_shifts(cg: ClassGroupData, vec):
    """Nonnegative representative of a factor-base vector, with receipts.

    Adds the relation row of a rational prime until every exponent is
    nonnegative and returns the multiplicities used, so callers can
    correct symbol bookkeeping for the extra principal factors.
    """
    out = {c: v for c, v in vec.items() if v}
    shifts = {}
    for col in sorted(out):
        if out[col] < 0:
            p = cg.fb.prime_of_col(col)
            free = cg.fb.free_row(p)
            assert free is not None, "free relation missing for a base prime"
            k = (-out[col] + free[col] - 1) // free[col]
            for c, e in free.items():
                out[c] = out.get(c, 0) + k * e
            shifts[p] = shifts.get(p, 0) + k
    assert all(v >= 0 for v in out.values())
    return {c: v for c, v in out.items() if v}, shifts


def _f2_mat_mul(a, b):
    n = len(a)
    return [[sum(a[i][t] & b[t][j] for t in range(n)) % 2 for j in range(n)]
            for i in range(n)]


def ray_class_2_elementary(cg: ClassGroupData, ell: int, *, sigma=None,
                           exponent: int = 1, label: str | None = None) -> RayClass2Data:
    """The 2-elementary ray class quotient mod the primes over ell.

    cg must be a certified class-group run for the field.  sigma, when
    given, is an order-3 automorphism matrix acting on the integral
    basis; the induced action on the quotient is computed and checked.
    """
    if not isinstance(cg, ClassGroupData):
        raise DependencyError("certified class and unit data required")
    if cg.status != "certified":
        raise DependencyError("class-group run is not certified")
    nf = cg.nf
    res = EllResidues(nf, ell, exponent)
    g = len(res.primes)
    ds = list(cg.invariants)
    gen_vecs = cg.invariant_generator_vectors()
    r = len(ds)
    assert len(gen_vecs) == r

    rows = []
    for i, (d, vec) in enumerate(zip(ds, gen_vecs)):
        x = cg.principal_generator({c: d * v for c, v in vec.items()})
        assert x is not None, "invariant power failed to be principal"
        row = [0] * (r + g)
        row[i] = d % 2
        for j, b in enumerate(res.symbols(x)):
            row[r + j] = b
        rows.append(row)
    units = cg.fundamental_units() + [[-c for c in nf.one()]]
    for u in units:
        row = [0] * (r + g)
        for j, b in enumerate(res.symbols(u)):
            row[r + j] = b
        rows.append(row)

    rref, pivots = fp_rref(rows, 2)
    free_cols = [c for c in range(r + g) if c not in pivots]

    def project(vecrow):
        v = [x % 2 for x in vecrow]
        for i, pc in enumerate(pivots):
            if v[pc]:
                v = [(a + b) % 2 for a, b in zip(v, rref[i])]
        return tuple(v[c] for c in free_cols)

    generators = [("class", i, d) for i, d in enumerate(ds)]
    generators += [("ray", j, ell) for j in range(g)]

    sigma_matrix = None
    if sigma is not None:
        lookup = cg.fb.sigma_col_map(sigma, {})
        perm = res.sigma_perm(sigma)
        images = []
        for i, vec in enumerate(gen_vecs):
            img = {lookup(c): v for c, v in vec.items()}
            coords = cg.class_vector(img)
            diff = dict(img)
            for k, a in enumerate(coords):
                if a:
                    for c, v in gen_vecs[k].items():
                        diff[c] = diff.get(c, 0) - a * v
            lifted, shifts = _lift_with_shifts(cg, diff)
            x = cg.principal_generator(lifted)
            assert x is not None
            sym = list(res.symbols(x))
            one = nf.one()
            for p, k in shifts.items():
                if k % 2:
                    psym = res.symbols([p * c for c in one])
                    sym = [(a + b) % 2 for a, b in zip(sym, psym)]
            row = [0] * (r + g)
            for k, a in enumerate(coords):
                row[k] = a % 2
            for j, b in enumerate(sym):
                row[r + j] = b
            images.append(row)
        for j in range(g):
            row = [0] * (r + g)
            row[r + perm[j]] = 1
            images.append(row)
        # the action must send the relation span into itself
        for rrow in rref:
            acc = [0] * (r + g)
            for c in range(r + g):
                if rrow[c]:
                    acc = [(a + b) % 2 for a, b in zip(acc, images[c])]
            assert not any(project(acc)), "action does not preserve relations"
        sigma_matrix = [list(project(images[c])) for c in free_cols]
        cube = _f2_mat_mul(sigma_matrix, _f2_mat_mul(sigma_matrix, sigma_matrix))
        ident = [[int(i == j) for j in range(len(free_cols))] for i in range(len(free_cols))]
        if cube != ident:
            raise IntegrityError("induced action does not have order dividing 3")

    inertia = []
    for j in range(g):
        e = [0] * (r + g)
        e[r + j] = 1
        inertia.append(project(e))

    return RayClass2Data(
        label=label if label is not None else f"disc {nf.disc}",
        quotient_dim=len(free_cols),
        class_dim=r,
        ray_dim=g,
        generators=generators,
        sigma_matrix=sigma_matrix,
        inertia_images=inertia,
        modulus=res.modulus,
    )


def quadratic_ray_dim_by_genus(ell: int) -> int:
    """Ray dimension of Q(sqrt ell) at its ramified prime, by sign arithmetic.

    For a prime ell = 1 mod 4 the class number is odd (one genus per
    class) and the fundamental unit has norm -1, so the whole dimension
    question reduces to whether the unit is a square modulo the ramified
    prime.  Its residue is a square root of -1, which is itself a square
    mod ell exactly when ell = 1 mod 8.
    """
    if ell % 4 != 1 or not is_prime(ell):
        raise DomainError("prime ell = 1 mod 4 required")
    return 1 if ell % 8 == 1 else 0


# ---------------------------------------------------------------------------
# the octahedral count

def k_L(ray_L: RayClass2Data, ray_F: RayClass2Data) -> int:
    """Multiplicity (dim_L - dim_F)/2, with the parity obligation enforced."""
    diff = ray_L.quotient_dim - ray_F.quotient_dim
    if diff < 0 or diff % 2:
        raise IntegrityError(
            f"dimension difference {diff} is not an even nonnegative integer")
    return diff // 2


def k_from_action(ray_L: RayClass2Data) -> int:
    """The same multiplicity from the semisimple decomposition of sigma."""
    if ray_L.sigma_matrix is None:
        raise DependencyError("an order-3 action is required")
    k, _ = f2_module_decompose(ray_L.sigma_matrix)
    return k


def octahedral_survey(ell: int, *, assume_grh: bool = False) -> dict:
    """Everything the census needs about one prime ell = 1 mod 4.

    Computes the quadratic field data, enumerates the cubic fields of
    discriminant ell with the cardinality cross-check (3^r3 - 1)/2 against
    an independent form-based 3-rank, and for each cubic runs the sextic
    closure pipeline to a pair of independently computed multiplicities.
    Any disagreement raises IntegrityError.
    """
    if ell % 4 != 1 or not is_prime(ell):
        raise DomainError("prime ell = 1 mod 4 required")
    F = real_quadratic_field(ell)
    cgF = class_group(F, assume_grh=assume_grh)
    r3 = three_rank(ell)
    r3_rel = sum(1 for d in cgF.invariants if d % 3 == 0)
    if r3 != r3_rel:
        raise IntegrityError(f"3-rank disagreement at {ell}: forms {r3}, relations {r3_rel}")
    cubics = cubic_fields_of_discriminant(ell)
    expected = (3**r3 - 1) // 2
    if len(cubics) != expected:
        raise IntegrityError(
            f"cubic field count at {ell}: found {len(cubics)}, 3-rank predicts {expected}")
    rayF = ray_class_2_elementary(cgF, ell, label=f"Q(sqrt {ell})")
    if rayF.quotient_dim != quadratic_ray_dim_by_genus(ell):
        raise IntegrityError(
            f"quadratic ray dimension at {ell}: engine {rayF.quotient_dim}, "
            f"genus arithmetic {quadratic_ray_dim_by_genus(ell)}")

    fields_out = []
    n_forms = 0
    for idx, cub in enumerate(cubics):
        nf6, mat3, _ = galois_closure_sextic(cub)
        cg6 = class_group(nf6, assume_grh=assume_grh)
        ray6 = ray_class_2_elementary(cg6, ell, sigma=mat3,
                                      label=f"closure {idx} of disc {ell}")
        k1 = k_L(ray6, rayF)
        k2, fixed = f2_module_decompose(ray6.sigma_matrix)
        if k1 != k2 or fixed != rayF.quotient_dim:
            raise IntegrityError(
                f"multiplicity disagreement at {ell} field {idx}: "
                f"dimension formula {k1}, decomposition {k2} with fixed part {fixed} "
                f"vs base dimension {rayF.quotient_dim}")
        fields_out.append({
            "cubic": list(cub.f.coeffs),
            "h": cg6.h,
            "invariants": list(cg6.invariants),
            "dim_L": ray6.quotient_dim,
            "k": k1,
        })
        n_forms += 2**k1 - 1

    return {
        "ell": ell,
        "r3": r3,
        "card_L": len(cubics),
        "h_F": cgF.h,
        "dim_F": rayF.quotient_dim,
        "fields": fields_out,
        "n_forms": n_forms,
        "assume_grh": assume_grh,
    }


def count_octahedral(ell: int, *, assume_grh: bool = False) -> int:
    """Number of second-family forms of level ell or ell^2."""
    return octahedral_survey(ell, assume_grh=assume_grh)["n_forms"]
