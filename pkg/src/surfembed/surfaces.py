"""Closed-form invariants of the equivariant Seifert surfaces.

Three families live in the 3-sphere, all built from the Clifford torus:

* ``PLAIN`` -- p meridian disks of one solid torus and q of the other,
  banded together at their pq crossings; acted on by
  ``(z, w) -> (e^{2 pi i/p} z, e^{2 pi i/q} w)``.
* ``PLUS`` / ``MINUS`` -- the p disks banded to the annulus
  ``{arg z = q arg w}``, with the disk boundaries kept (``PLUS``) or
  reversed (``MINUS``); acted on by the order-pq rotation
  ``(z, w) -> (e^{2 pi i/p} z, e^{2 pi i/(pq)} w)``.

Rotation angles are ``Fraction`` multiples of a full turn.
"""
from __future__ import annotations

import enum
import re
from collections import Counter
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import (
    DegenerateSpec,
    IndexMismatch,
    InvalidFamily,
    NonIntegralGenus,
    UnsupportedVariant,
)
from .numtheory import gcd, is_prime, lcm, solve_congruence


class Variant(enum.Enum):
    PLAIN = "plain"
    PLUS = "plus"
    MINUS = "minus"

    @classmethod
    def parse(cls, text: "str | Variant") -> "Variant":
        if isinstance(text, Variant):
            return text
        try:
            return cls(text.lower())
        except ValueError:
            raise ValueError(f"unknown variant {text!r}; expected plain/plus/minus") from None


@dataclass(frozen=True)
class SurfaceSpec:
    p: int
    q: int
    variant: Variant = Variant.PLAIN

    def __post_init__(self):
        object.__setattr__(self, "variant", Variant.parse(self.variant))
        if not (isinstance(self.p, int) and isinstance(self.q, int)):
            raise DegenerateSpec("p and q must be integers")
        if self.p < 1 or self.q < 1:
            raise DegenerateSpec(f"p, q must be >= 1, got ({self.p}, {self.q})")
        if self.variant is Variant.MINUS and self.p == 1:
            # (1 - p) = 0: the torus-link slope and the rotation congruence collapse
            raise DegenerateSpec("the minus construction needs p >= 2")

    @property
    def twist(self) -> int:
        """Signed z-winding ``e`` of the boundary link: it is ``{e*arg z = q*arg w}``."""
        if self.variant is Variant.PLAIN:
            return self.p
        if self.variant is Variant.PLUS:
            return self.p + 1
        return 1 - self.p

    @property
    def d(self) -> int:
        """Number of components of the torus-link part of the boundary."""
        return gcd(abs(self.twist), self.q)

    @property
    def order(self) -> int:
        """Order of the acting rotation."""
        if self.variant is Variant.PLAIN:
            return lcm(self.p, self.q)
        return self.p * self.q

    @property
    def z_step(self) -> int:
        """The action rotates z by 1/z_step and w by 1/w_step of a turn."""
        return self.p

    @property
    def w_step(self) -> int:
        return self.q if self.variant is Variant.PLAIN else self.p * self.q

    def __str__(self):
        return f"S({self.p},{self.q},{self.variant.value})"


@dataclass(frozen=True)
class TopologicalType:
    genus: int
    d: int
    knot_type: tuple[int, int]
    has_core_boundary: bool
    euler_char: int
    slope_sign: int = 1

    @property
    def boundary_count(self) -> int:
        return self.d + (1 if self.has_core_boundary else 0)

    @property
    def unknotted(self) -> bool:
        return 1 in self.knot_type

    @property
    def homology_class(self) -> tuple[int, int]:
        """Class of one torus-link component in the basis (arg z, arg w)."""
        a, b = self.knot_type
        return (b, self.slope_sign * a)


def top_type(spec: SurfaceSpec) -> TopologicalType:
    p, q, d = spec.p, spec.q, spec.d
    if spec.variant is Variant.PLAIN:
        twice = p * q - p - q - d + 2
        chi = p + q - p * q
        core = False
    else:
        twice = p * q - p - d + 1
        chi = p - p * q
        core = True
    if twice < 0 or twice % 2:
        raise DegenerateSpec(f"{spec} has no valid genus ({twice}/2)")
    genus = twice // 2
    e = spec.twist
    knot = (abs(e) // d, q // d)
    out = TopologicalType(
        genus=genus,
        d=d,
        knot_type=knot,
        has_core_boundary=core,
        euler_char=chi,
        slope_sign=1 if e > 0 else -1,
    )
    assert out.euler_char == 2 - 2 * out.genus - out.boundary_count
    return out


@dataclass(frozen=True)
class Orbit:
    orbit_length: int
    component_count: int
    acting_power: int
    rotation: Fraction


@dataclass(frozen=True)
class RotationData:
    acting_order: int
    orbits: tuple[Orbit, ...]
    core_rotation: Fraction | None = None

    @property
    def component_total(self) -> int:
        return sum(o.component_count for o in self.orbits)


def rotation_integer(spec: SurfaceSpec) -> int:
    """The integer s with ``(e/d) * s = 1 (mod pq/d)`` for the +/- families."""
    if spec.variant is Variant.PLAIN:
        raise UnsupportedVariant("s is only defined for the plus/minus families")
    d = spec.d
    return solve_congruence(spec.twist // d, spec.p * spec.q // d)


def boundary_action(spec: SurfaceSpec) -> RotationData:
    """How the acting rotation permutes and turns the boundary circles."""
    n = spec.order
    if spec.variant is Variant.PLAIN:
        rot = Fraction(1, lcm(spec.p, spec.q))
        orbits = tuple(Orbit(1, 1, 1, rot) for _ in range(spec.d))
        return RotationData(n, orbits)
    d = spec.d
    s = rotation_integer(spec)
    rot = Fraction(d * s, spec.p * spec.q)
    return RotationData(n, (Orbit(d, d, d, rot),), core_rotation=Fraction(-1, spec.p * spec.q))


_SIG_RE = re.compile(r"^\s*\(\s*(\d+)\s*:\s*([\d\s,]*)\)\s*$")


@dataclass(frozen=True)
class OrbifoldSignature:
    """Quotient type ``(base_genus : n_1, ..., n_l)``, normalized.

    Indices equal to 1 are dropped and the rest are sorted descending, so
    equality of two signatures is equality of the quotient types.
    """

    base_genus: int
    indices: tuple[int, ...] = field(default=())

    def __post_init__(self):
        if self.base_genus < 0:
            raise ValueError("base genus must be nonnegative")
        idx = [int(i) for i in self.indices]
        if any(i < 1 for i in idx):
            raise ValueError(f"indices must be positive: {idx}")
        object.__setattr__(self, "indices", tuple(sorted((i for i in idx if i != 1), reverse=True)))

    @classmethod
    def parse(cls, text: str) -> "OrbifoldSignature":
        m = _SIG_RE.match(text)
        if not m:
            raise ValueError(f"cannot parse signature {text!r}; expected '(g:a,b,...)'")
        body = m.group(2).strip()
        idx = [int(t) for t in body.split(",") if t.strip()] if body else []
        return cls(int(m.group(1)), tuple(idx))

    def multiplicity(self, index: int) -> int:
        return Counter(self.indices)[index]

    @property
    def free(self) -> bool:
        return not self.indices

    def __str__(self):
        return f"({self.base_genus}:{','.join(map(str, self.indices))})"


def orbifold_type(spec: SurfaceSpec) -> OrbifoldSignature:
    """Quotient type of the capped surface under the extended action."""
    top_type(spec)
    p, q, d = spec.p, spec.q, spec.d
    if spec.variant is Variant.PLAIN:
        L = lcm(p, q)
        return OrbifoldSignature(0, (L,) * d + (p // d, q // d))
    return OrbifoldSignature(0, (p * q, p * q // d, q))


@dataclass(frozen=True)
class BorderedQuotient:
    disk_count: int
    singular_indices: tuple[int, ...]


def bordered_quotient(spec: SurfaceSpec) -> BorderedQuotient:
    """Quotient of the bordered plain surface: a sphere minus d disks with cone points."""
    if spec.variant is not Variant.PLAIN:
        raise UnsupportedVariant("bordered_quotient is only stated for the plain family")
    d = spec.d
    idx = tuple(sorted((i for i in (spec.p // d, spec.q // d) if i != 1), reverse=True))
    return BorderedQuotient(d, idx)


def rh_euler_defect(order: int, genus: int, sig: OrbifoldSignature) -> Fraction:
    """``(2 - 2g) - order * chi_orb``; zero iff Riemann-Hurwitz holds."""
    chi = Fraction(2 - 2 * sig.base_genus) - sum(1 - Fraction(1, n) for n in sig.indices)
    return (2 - 2 * genus) - order * chi


def rh_genus(order: int, sig: OrbifoldSignature) -> int:
    """Genus of the cyclic branched cover of degree ``order`` over ``sig``."""
    if order < 1:
        raise IndexMismatch(f"order must be positive, got {order}")
    bad = [n for n in sig.indices if order % n]
    if bad:
        raise IndexMismatch(f"indices {bad} do not divide order {order}")
    chi = Fraction(2 - 2 * sig.base_genus) - sum(1 - Fraction(1, n) for n in sig.indices)
    g = (2 - order * chi) / 2
    if g.denominator != 1 or g < 0:
        raise NonIntegralGenus(f"order {order} over {sig} gives genus {g}")
    return int(g)


@dataclass(frozen=True)
class FamilyRecord:
    p: int
    k: int
    order: int
    signature: OrbifoldSignature
    genus: int
    embed_dim: int
    dgf: int


def fstar_signature(p: int, k: int) -> OrbifoldSignature:
    idx = [p**k] * p
    for r in range(1, k - 1):
        idx += [p ** (k - r)] * (p - 1)
    idx.append(p)
    return OrbifoldSignature(0, tuple(idx))


def fstar_family(p: int, k: int) -> FamilyRecord:
    """The order-p^k maps whose minimal embedding dimension is 2k or 2k+1."""
    if not is_prime(p):
        raise InvalidFamily(f"p = {p} is not prime")
    if k < 3:
        raise InvalidFamily(f"k must be >= 3, got {k}")
    order = p**k
    genus2 = (k - 1) * (p - 1) * order - 2 * p ** (k - 1) + 2
    assert genus2 % 2 == 0
    dim = 2 * k if p == 2 else 2 * k + 1
    return FamilyRecord(
        p=p,
        k=k,
        order=order,
        signature=fstar_signature(p, k),
        genus=genus2 // 2,
        embed_dim=dim,
        dgf=dim,
    )
