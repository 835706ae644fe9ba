"""Bounds on the minimal dimension of a sphere receiving a smooth equivariant embedding.

A periodic map is recorded by its genus g, order n and quotient signature.
Lower bounds come from fixed-point arguments, each encoded as a rule
reading only ``(n, signature)``; upper bounds come from explicit models
(the surfaces of :mod:`surfembed.surfaces` capped in joins of spheres) and
from the prime-power families.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Callable

from .errors import Inconsistent, InvalidDatum, NotCovered, OutOfRange
from .numtheory import gcd, is_prime, prime_factors, prime_powers, valuation
from .surfaces import (
    OrbifoldSignature,
    SurfaceSpec,
    Variant,
    fstar_family,
    fstar_signature,
    rh_euler_defect,
)


@dataclass(frozen=True)
class MapDatum:
    genus: int
    order: int
    signature: OrbifoldSignature

    def __post_init__(self):
        if isinstance(self.signature, str):
            object.__setattr__(self, "signature", OrbifoldSignature.parse(self.signature))
        if self.genus < 0 or self.order < 1:
            raise InvalidDatum(f"need g >= 0 and n >= 1, got g={self.genus}, n={self.order}")
        bad = [i for i in self.signature.indices if self.order % i]
        if bad:
            raise InvalidDatum(f"indices {bad} do not divide n={self.order}")
        defect = rh_euler_defect(self.order, self.genus, self.signature)
        if defect:
            raise InvalidDatum(
                f"Riemann-Hurwitz fails for g={self.genus}, n={self.order}, {self.signature}: "
                f"defect {defect}"
            )

    @property
    def free(self) -> bool:
        return self.signature.free

    @property
    def indices(self) -> tuple[int, ...]:
        return self.signature.indices

    def __str__(self):
        return f"g={self.genus} n={self.order} {self.signature}"


class BoundKind(enum.Enum):
    LOWER = "LowerBound"
    UPPER = "UpperBound"
    EXACT = "Exact"


@dataclass(frozen=True)
class BoundResult:
    value: int
    kind: BoundKind
    provenance: tuple[str, ...]

    def __post_init__(self):
        if not self.provenance:
            raise ValueError("a bound needs at least one provenance tag")


# --- lower bounds -----------------------------------------------------------


@dataclass(frozen=True)
class SeqBound:
    k: int
    bound: int


def seq_bound(sig: OrbifoldSignature, n: int, p: int) -> SeqBound:
    """Nested fixed sets of f^(n/p^r): one sphere dimension pair per distinct p-level."""
    levels = {valuation(i, p) for i in sig.indices} - {0}
    k = len(levels)
    return SeqBound(k, 2 * k + (1 if sig.multiplicity(n) >= 3 else 0))


def _three_points(d: MapDatum) -> tuple[int, int] | None:
    """(a, b) when the singular indices are exactly n, a, b with a, b > 1.

    Only the singular points enter the fixed-point arguments, so the base
    genus is not consulted; free-orbit surgery leaves the result unchanged.
    """
    sig = d.signature
    if len(sig.indices) != 3 or sig.indices[0] != d.order:
        return None
    return sig.indices[1], sig.indices[2]


def _rule_three_points(d):
    return (4, "rule:three-branch-points") if _three_points(d) else None


def _rule_coprime(d):
    ab = _three_points(d)
    if ab and gcd(*ab) == 1:
        return 6, "rule:coprime-indices"
    return None


def _rule_large_ratio(d):
    ab = _three_points(d)
    if ab:
        n = d.order
        for a, b in (ab, ab[::-1]):
            if n == a > 2 * b > 2:
                return 6, "rule:large-index-ratio"
    return None


def _rule_equal(d):
    ab = _three_points(d)
    if ab and ab[0] == ab[1] == d.order:
        return 5, "rule:equal-indices"
    return None


def _rule_prime_powers(d):
    ab = _three_points(d)
    if not ab:
        return None
    a, b = ab
    only_a = any(b % P for P in prime_powers(a))
    only_b = any(a % Q for Q in prime_powers(b))
    if only_a and only_b:
        return 6, "rule:prime-power-divisibility"
    return None


_THREE_POINT_RULES: tuple[Callable, ...] = (
    _rule_three_points,
    _rule_coprime,
    _rule_large_ratio,
    _rule_equal,
    _rule_prime_powers,
)


def _lower_candidates(d: MapDatum) -> list[tuple[int, str]]:
    out = [(2, "baseline:sphere")] if d.genus == 0 else [(3, "baseline:surface-in-3-space")]
    for rule in _THREE_POINT_RULES:
        hit = rule(d)
        if hit:
            out.append(hit)
    for p in prime_factors(d.order):
        sb = seq_bound(d.signature, d.order, p)
        if sb.k:
            out.append((sb.bound, f"rule:nested-fixed-sets(p={p},k={sb.k})"))
    return out


def lower_bound(d: MapDatum) -> BoundResult:
    cands = _lower_candidates(d)
    best = max(v for v, _ in cands)
    return BoundResult(best, BoundKind.LOWER, tuple(t for v, t in cands if v == best))


# --- model table ------------------------------------------------------------


@dataclass(frozen=True)
class TableRow:
    row: int
    genus: Callable[[int], int]
    order: Callable[[int], int]
    indices: Callable[[int], tuple[int, ...]]
    model: Callable[[int], tuple[int, int, Variant]]
    bound: int
    parametric: bool = True

    def datum(self, h: int) -> "MapDatum":
        return MapDatum(self.genus(h), self.order(h), OrbifoldSignature(0, self.indices(h)))

    def spec(self, h: int) -> SurfaceSpec:
        return SurfaceSpec(*self.model(h))

    def valid_h(self, h: int) -> bool:
        """Row instance makes sense: positive genus and a valid model surface."""
        if not self.parametric and h != 0:
            return False
        if self.genus(h) < 1:
            return False
        p, q, var = self.model(h)
        return p >= 1 and q >= 1 and not (var is Variant.MINUS and p == 1)


P, M, X = Variant.PLAIN, Variant.PLUS, Variant.MINUS


def _fixed(row, g, n, idx, model, bound):
    return TableRow(row, lambda h: g, lambda h: n, lambda h: idx, lambda h: model, bound, parametric=False)


MODEL_TABLE: tuple[TableRow, ...] = (
    TableRow(1, lambda h: h, lambda h: 4 * h + 2, lambda h: (4 * h + 2, 2 * h + 1, 2),
             lambda h: (2, 2 * h + 1, P), 6),
    TableRow(2, lambda h: h, lambda h: 4 * h, lambda h: (4 * h, 4 * h, 2),
             lambda h: (2 * h, 2, X), 6),
    TableRow(3, lambda h: 3 * h, lambda h: 9 * h + 3, lambda h: (9 * h + 3, 3 * h + 1, 3),
             lambda h: (3, 3 * h + 1, P), 6),
    TableRow(4, lambda h: 3 * h + 1, lambda h: 9 * h + 6, lambda h: (9 * h + 6, 3 * h + 2, 3),
             lambda h: (3, 3 * h + 2, P), 6),
    TableRow(5, lambda h: 3 * h, lambda h: 9 * h, lambda h: (9 * h, 9 * h, 3),
             lambda h: (3 * h, 3, M), 6),
    TableRow(6, lambda h: 3 * h + 1, lambda h: 9 * h + 3, lambda h: (9 * h + 3, 9 * h + 3, 3),
             lambda h: (3 * h + 1, 3, M), 6),
    TableRow(7, lambda h: 3 * h + 2, lambda h: 9 * h + 6, lambda h: (9 * h + 6, 9 * h + 6, 3),
             lambda h: (3 * h + 2, 3, X), 6),
    _fixed(8, 6, 20, (20, 5, 4), (4, 5, P), 6),
    _fixed(9, 9, 28, (28, 7, 4), (4, 7, P), 6),
    _fixed(10, 10, 30, (30, 6, 5), (5, 6, P), 6),
    _fixed(11, 12, 36, (36, 9, 4), (4, 9, P), 6),
    _fixed(12, 4, 12, (12, 6, 4), (3, 4, X), 6),
    _fixed(13, 1, 3, (3, 3, 3), (3, 3, P), 5),
    _fixed(14, 1, 4, (4, 4, 2), (2, 4, P), 4),
    _fixed(15, 2, 6, (6, 6, 3), (2, 6, P), 4),
)

EXCEPTIONAL_ROW = 12


def _solve_h(row: TableRow, g: int) -> list[int]:
    if not row.parametric:
        return [0]
    # genus(h) is affine in h with positive slope
    g0, g1 = row.genus(0), row.genus(1)
    step = g1 - g0
    if (g - g0) % step:
        return []
    return [(g - g0) // step]


def table_matches(d: MapDatum) -> list[tuple[TableRow, int]]:
    """Rows (with their h) whose datum equals ``d`` after normalization."""
    if d.signature.base_genus != 0:
        return []
    out = []
    for row in MODEL_TABLE:
        for h in _solve_h(row, d.genus):
            if h < 0 or not row.valid_h(h):
                continue
            if row.order(h) == d.order and OrbifoldSignature(0, row.indices(h)) == d.signature:
                out.append((row, h))
    return out


# --- prime-power families ---------------------------------------------------


def _prime_power(n: int) -> tuple[int, int] | None:
    ps = prime_factors(n)
    if len(ps) != 1:
        return None
    return ps[0], valuation(n, ps[0])


def family_match(d: MapDatum) -> tuple[int, int] | None:
    """``(p, k)`` when ``d`` carries the starred order-p^k family signature.

    The base genus is ignored: surgery along free orbits raises it without
    changing the bounds.
    """
    pk = _prime_power(d.order)
    if pk is None or pk[1] < 3 or not is_prime(pk[0]):
        return None
    p, k = pk
    if d.signature.indices != fstar_signature(p, k).indices:
        return None
    return p, k


def _family_value(p: int, k: int) -> int:
    return 2 * k if p == 2 else 2 * k + 1


# --- upper bounds -----------------------------------------------------------


def _upper_candidates(d: MapDatum) -> list[tuple[int, str]]:
    out = []
    if d.genus == 0:
        out.append((2, "sphere:rotation"))
    if d.free:
        out.append((3, "free:nielsen"))
    for row, h in table_matches(d):
        out.append((row.bound, f"model-table:row{row.row}"))
    fam = family_match(d)
    if fam:
        out.append((_family_value(*fam), f"family:fstar(p={fam[0]},k={fam[1]})"))
    if d.genus == 2 and d.order == 6 and d.signature == OrbifoldSignature(0, (3, 3, 2, 2)):
        out.append((3, "known:genus2-order6-in-3-space"))
    if d.genus == 1 and d.order == 2:
        out.append((3, "known:torus-involution-in-3-space"))
    return out


def upper_bound(d: MapDatum) -> BoundResult:
    cands = _upper_candidates(d)
    if not cands:
        raise NotCovered(f"no construction covers {d}")
    best = min(v for v, _ in cands)
    return BoundResult(best, BoundKind.UPPER, tuple(t for v, t in cands if v == best))


def in_exact_range(d: MapDatum) -> bool:
    return (d.genus > 0 and d.order >= 3 * d.genus) or (d.genus == 1 and d.order == 2) or (
        family_match(d) is not None
    )


def dgf(d: MapDatum) -> BoundResult:
    """Exact minimal dimension, only where lower and upper bounds are known to meet."""
    if not in_exact_range(d):
        raise OutOfRange(f"{d} is outside the range where the value is determined")
    lo, up = lower_bound(d), upper_bound(d)
    if lo.value != up.value:
        raise Inconsistent(f"{d}: lower {lo.value} {lo.provenance} != upper {up.value} {up.provenance}")
    return BoundResult(lo.value, BoundKind.EXACT, lo.provenance + up.provenance)


@dataclass(frozen=True)
class DhatInterval:
    lower: int
    upper: int | None
    provenance: tuple[str, ...]

    def as_list(self) -> list:
        return [self.lower, self.upper]


def dhat_bounds(d: MapDatum) -> DhatInterval:
    """Interval for the minimal dimension with merely continuous embeddings allowed."""
    fam = family_match(d)
    if fam:
        v = _family_value(*fam)
        # the nested fixed-set argument is topological
        return DhatInterval(v, v, (f"family:fstar(p={fam[0]},k={fam[1]})", "topological:nested-fixed-sets"))
    base = 2 if d.genus == 0 else 3
    base_tag = "baseline:sphere" if d.genus == 0 else "baseline:surface-in-3-space"
    rows = table_matches(d)
    if rows:
        dval = min(r.bound for r, _ in rows)
        if dval == 6:
            if any(r.row == EXCEPTIONAL_ROW for r, _ in rows):
                return DhatInterval(base, 6, (base_tag, f"model-table:row{EXCEPTIONAL_ROW}"))
            tags = tuple(f"model-table:row{r.row}" for r, _ in rows)
            return DhatInterval(base, 4, (base_tag, "topological:cones-from-poles") + tags)
    try:
        up = upper_bound(d)
    except NotCovered:
        return DhatInterval(base, None, (base_tag,))
    return DhatInterval(base, up.value, (base_tag,) + up.provenance)


def enlarge(d: MapDatum, t: int) -> MapDatum:
    """Equivariant surgery along t free orbits: genus grows by n*t, the base by t."""
    if t < 0:
        raise ValueError("t must be nonnegative")
    sig = OrbifoldSignature(d.signature.base_genus + t, d.signature.indices)
    return MapDatum(d.genus + d.order * t, d.order, sig)


def family_datum(p: int, k: int) -> MapDatum:
    rec = fstar_family(p, k)
    return MapDatum(rec.genus, rec.order, rec.signature)
