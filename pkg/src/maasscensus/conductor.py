"""Conductor exponents of tame projective representations.

A continuous projective representation of the rationals with finite image
G (here the rotation groups of the tetrahedron or octahedron) has a
conductor supported on the ramified primes.  At a tamely ramified prime p
the inertia image is cyclic of some order e_p, and the local exponent
m(p) of the conductor is pinned down by a small amount of splitting data:
m(p) = 0 exactly when e_p = 1, and for e_p >= 3 the exponent is 1
precisely when e_p divides p - 1.  The remaining case e_p = 2 is decided
by the decomposition group, which is then either cyclic (m = 1) or
dihedral (m = 2).

The decomposition group at p in the field cut out by the representation
is a subgroup D of G with a normal cyclic inertia subgroup of order e_p
and cyclic quotient of order f_p.  For most splitting shapes the
isomorphism type of D is forced, and this module resolves it by listing
the actual subgroups of the permutation groups rather than by a partial
table.  The one genuinely ambiguous shape is e = f = 2 inside the
octahedral group when inertia is generated by a product of two disjoint
transpositions: both the cyclic group of order 4 and the Klein group
contain such an involution, and callers must then say which one occurs.
When inertia is a single transposition every order 4 subgroup containing
it is elementary abelian, so that profile forces m = 2.
"""

from dataclasses import dataclass
from itertools import permutations

from .exactarith import is_prime
from .fields import DomainError


class WildRamificationError(ValueError):
    """Raised for p in {2, 3} with nontrivial inertia: the tame conductor
    rules do not apply there and this module refuses to guess."""


_GROUP_ORDER = {"A4": 12, "S4": 24}
_INERTIA_ORDERS = {"A4": (1, 2, 3), "S4": (1, 2, 3, 4)}


@dataclass(frozen=True)
class RamificationProfile:
    """Local data of a projective representation at a prime p.

    e_p is the order of the inertia image, decomposition_cyclic records
    whether the full decomposition image is cyclic, and projective_type
    names the global image, "A4" or "S4".
    """

    p: int
    e_p: int
    decomposition_cyclic: bool
    projective_type: str

    def __post_init__(self):
        if self.projective_type not in _GROUP_ORDER:
            raise DomainError(f"unknown projective type {self.projective_type!r}")
        if not is_prime(self.p):
            raise DomainError(f"{self.p} is not prime")
        if self.e_p not in _INERTIA_ORDERS[self.projective_type]:
            raise DomainError(
                f"inertia order {self.e_p} impossible in {self.projective_type}"
            )
        if self.e_p == 1 and not self.decomposition_cyclic:
            raise DomainError("unramified decomposition groups are cyclic")


def projective_conductor_exponent(profile: RamificationProfile) -> int:
    """Local conductor exponent m(p) of a tame projective representation.

    Unramified primes contribute 0.  For inertia of order at least 3 the
    exponent is 1 when that order divides p - 1 and 2 otherwise.  For
    inertia of order 2 it is 1 exactly when the decomposition group is
    cyclic.  Wild primes (2 and 3 with nontrivial inertia) are refused.
    """
    e = profile.e_p
    if e == 1:
        return 0
    if profile.p in (2, 3):
        raise WildRamificationError(
            f"p = {profile.p} with inertia order {e} is wildly ramified"
        )
    if e >= 3:
        return 1 if (profile.p - 1) % e == 0 else 2
    return 1 if profile.decomposition_cyclic else 2


# ---------------------------------------------------------------------------
# decomposition groups by honest subgroup enumeration

def _perm_mul(a, b):
    return tuple(a[b[i]] for i in range(4))


def _perm_order(a):
    ident = (0, 1, 2, 3)
    x, n = a, 1
    while x != ident:
        x = _perm_mul(x, a)
        n += 1
    return n


def _group_elements(projective_type):
    elems = list(permutations(range(4)))
    if projective_type == "A4":
        def sign(p):
            s = 1
            for i in range(4):
                for j in range(i + 1, 4):
                    if p[i] > p[j]:
                        s = -s
            return s

        elems = [p for p in elems if sign(p) == 1]
    return elems


def _closure(gens):
    seen = set(gens) | {(0, 1, 2, 3)}
    frontier = list(seen)
    while frontier:
        nxt = []
        for a in frontier:
            for b in list(seen):
                for c in (_perm_mul(a, b), _perm_mul(b, a)):
                    if c not in seen:
                        seen.add(c)
                        nxt.append(c)
        frontier = nxt
    return frozenset(seen)


def _subgroups(projective_type):
    elems = _group_elements(projective_type)
    out = set()
    for a in elems:
        out.add(_closure((a,)))
        for b in elems:
            out.add(_closure((a, b)))
    return out


def _is_cyclic(sub):
    return any(_perm_order(a) == len(sub) for a in sub)


def _involution_kind(a):
    # 2 moved points is a transposition, 4 a double transposition
    moved = sum(1 for i in range(4) if a[i] != i)
    return "transposition" if moved == 2 else "double_transposition"


def _decomposition_candidates(projective_type, e, f, inertia_class):
    """Subgroups that can serve as a decomposition group of shape (e, f).

    Requires a normal cyclic subgroup of order e meeting the requested
    inertia class, with cyclic quotient of order f.
    """
    found = []
    for sub in _subgroups(projective_type):
        if len(sub) != e * f:
            continue
        for c in sub:
            if _perm_order(c) != e:
                continue
            if e == 2 and inertia_class is not None:
                if _involution_kind(c) != inertia_class:
                    continue
            inertia = frozenset(_closure((c,)))
            if any(_perm_mul(_perm_mul(g, c), _invert(g)) not in inertia for g in sub):
                continue  # inertia must be normal in D
            if not _quotient_cyclic(sub, inertia):
                continue
            found.append(sub)
            break
    return found


def _invert(a):
    out = [0] * 4
    for i in range(4):
        out[a[i]] = i
    return tuple(out)


def _quotient_cyclic(sub, normal):
    order = len(sub) // len(normal)
    if order == 1:
        return True
    for x in sub:
        g, n = x, 1
        while g not in normal:
            g = _perm_mul(g, x)
            n += 1
        if n == order:
            return True
    return False


def ramification_profile_from_field(
    projective_type: str,
    p: int,
    e: int,
    f: int,
    g: int,
    *,
    inertia_class: str | None = None,
    decomposition_cyclic: bool | None = None,
) -> RamificationProfile:
    """Profile of p from its splitting shape (e, f, g) in the cut-out field.

    The field is Galois of degree 12 or 24, so every prime above p shares
    the ramification index e and residue degree f, and e * f * g must be
    the group order.  Cyclicity of the decomposition group is resolved by
    listing subgroups; for the octahedral shape e = f = 2 the class of
    the inertia involution ("transposition" or "double_transposition")
    narrows the candidates, and if they still disagree the caller must
    pass decomposition_cyclic explicitly.
    """
    order = _GROUP_ORDER.get(projective_type)
    if order is None:
        raise DomainError(f"unknown projective type {projective_type!r}")
    if min(e, f, g) < 1 or e * f * g != order:
        raise DomainError(f"splitting ({e}, {f}, {g}) does not fill degree {order}")
    if e not in _INERTIA_ORDERS[projective_type]:
        raise DomainError(f"inertia order {e} impossible in {projective_type}")
    candidates = _decomposition_candidates(projective_type, e, f, inertia_class)
    if not candidates:
        raise DomainError(
            f"no subgroup of {projective_type} has shape e={e}, f={f}"
        )
    verdicts = {_is_cyclic(sub) for sub in candidates}
    if decomposition_cyclic is None:
        if len(verdicts) > 1:
            raise DomainError(
                f"shape e={e}, f={f} in {projective_type} admits both cyclic and "
                "noncyclic decomposition groups; pass decomposition_cyclic"
            )
        decomposition_cyclic = verdicts.pop()
    elif decomposition_cyclic not in verdicts:
        raise DomainError(
            f"no shape e={e}, f={f} subgroup of {projective_type} has "
            f"cyclicity {decomposition_cyclic}"
        )
    return RamificationProfile(
        p=p,
        e_p=e,
        decomposition_cyclic=decomposition_cyclic,
        projective_type=projective_type,
    )
