"""Combinatorial model of the banded disk systems on the Clifford torus.

The torus is R^2/Z^2 with coordinates (arg z, arg w) measured in turns.
Each face boundary that lies on the torus is a straight closed curve.
Wherever curves from two different faces cross, a band is inserted; on
the boundary this is the oriented smoothing, so the strand arriving at a
crossing continues along the outgoing strand of the other curve.

Nothing here uses the closed-form genus or slope formulas: crossings are
found by solving the linear intersection equations exactly, and boundary
circles by following successors.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import MalformedComplex
from .numtheory import egcd
from .surfaces import SurfaceSpec, Variant, top_type

Vec = tuple[Fraction, Fraction]


@dataclass(frozen=True)
class Curve:
    label: str  # e.g. "D3", "E1", "A"
    family: str  # "D" (p-disks), "E" (q-disks), "A" (annulus edge on T)
    start: Vec
    direction: tuple[int, int]


@dataclass(frozen=True)
class Face:
    label: str
    euler_char: int
    curves: tuple[str, ...]


@dataclass(frozen=True)
class Strand:
    curve: str
    tail: int
    head: int
    displacement: tuple[Fraction, Fraction]


@dataclass
class SurgeryComplex:
    spec: SurfaceSpec
    mirror: bool
    curves: list[Curve]
    faces: list[Face]
    vertices: list[Vec]
    labels: list[tuple[int, int]]
    strands: list[Strand]
    successor: list[int]
    core_boundaries: int
    translation: Vec

    @property
    def band_count(self) -> int:
        return len(self.vertices)


@dataclass(frozen=True)
class BoundaryCycle:
    strand_count: int
    homology_class: tuple[int, int] | None
    strands: tuple[int, ...] = ()

    @property
    def is_core(self) -> bool:
        return self.homology_class is None


@dataclass(frozen=True)
class TraceResult:
    euler_char: int
    boundary_cycles: tuple[BoundaryCycle, ...]

    @property
    def component_count(self) -> int:
        return len(self.boundary_cycles)

    @property
    def link_cycles(self) -> tuple[BoundaryCycle, ...]:
        return tuple(c for c in self.boundary_cycles if not c.is_core)

    @property
    def genus(self) -> int:
        twice = 2 - self.euler_char - self.component_count
        if twice % 2:
            raise MalformedComplex(f"odd 2-2g-b: chi={self.euler_char}, b={self.component_count}")
        return twice // 2


def _mod1(x: Fraction) -> Fraction:
    return x - math.floor(x)


def _cross(u, v) -> Fraction:
    return u[0] * v[1] - u[1] * v[0]


def _crossings(c1: Curve, c2: Curve) -> list[tuple[Fraction, Fraction, Vec]]:
    """All (s, t, point) with c1(s) = c2(t) on the torus, s, t in [0, 1).

    Directions are primitive, so x lies on c2 iff (x - c2.start) x d2 is an
    integer; that is linear in s with slope D = d1 x d2, giving |D| roots.
    """
    d1, d2 = c1.direction, c2.direction
    D = _cross(d1, d2)
    if D == 0:
        return []
    off = (c1.start[0] - c2.start[0], c1.start[1] - c2.start[1])
    c0 = _cross(off, d2)
    _, u, w = egcd(d2[0], d2[1])
    out = []
    lo = math.ceil(c0) if D > 0 else math.floor(c0)
    for i in range(abs(D)):
        k = lo + i if D > 0 else lo - i
        s = Fraction(k - c0, D)
        assert 0 <= s < 1
        pt = (_mod1(c1.start[0] + s * d1[0]), _mod1(c1.start[1] + s * d1[1]))
        t = _mod1(u * (pt[0] - c2.start[0]) + w * (pt[1] - c2.start[1]))
        out.append((s, t, pt))
    return out


def _curves_and_faces(spec: SurfaceSpec, mirror: bool):
    p, q = spec.p, spec.q
    vdir = (0, -1) if spec.variant is Variant.MINUS else (0, 1)
    curves = [Curve(f"D{j}", "D", (Fraction(j, p), Fraction(0)), vdir) for j in range(p)]
    faces = [Face(f"D{j}", 1, (f"D{j}",)) for j in range(p)]
    if spec.variant is Variant.PLAIN:
        curves += [Curve(f"E{k}", "E", (Fraction(0), Fraction(k, q)), (1, 0)) for k in range(q)]
        faces += [Face(f"E{k}", 1, (f"E{k}",)) for k in range(q)]
        core = 0
        shift = (Fraction(1, p), Fraction(1, q))
    else:
        # torus edge of the annulus: arg z = q * arg w
        curves.append(Curve("A", "A", (Fraction(0), Fraction(0)), (q, 1)))
        faces.append(Face("A", 0, ("A",)))
        core = 1
        shift = (Fraction(1, p), Fraction(1, p * q))
    if mirror:
        # reflect arg w: the other surgery convention gives the mirror image
        curves = [Curve(c.label, c.family, (c.start[0], _mod1(-c.start[1])), (c.direction[0], -c.direction[1]))
                  for c in curves]
        shift = (shift[0], -shift[1])
    return curves, faces, core, shift


def build_complex(spec: SurfaceSpec, mirror: bool = False) -> SurgeryComplex:
    """Faces, band vertices and boundary strands for ``spec``.

    ``mirror=True`` uses the other equivariant surgery convention, whose
    result is the mirror image (arg w reflected).
    """
    top_type(spec)  # range check only
    curves, faces, core, shift = _curves_and_faces(spec, mirror)
    vertices: list[Vec] = []
    index: dict[Vec, int] = {}
    on_curve: dict[str, list[tuple[Fraction, int]]] = {c.label: [] for c in curves}
    for c1, c2 in itertools.combinations(curves, 2):
        if c1.family == c2.family:
            continue
        for s, t, pt in _crossings(c1, c2):
            if pt in index:
                raise MalformedComplex(f"triple point at {pt}")
            index[pt] = len(vertices)
            vertices.append(pt)
            on_curve[c1.label].append((s, index[pt]))
            on_curve[c2.label].append((t, index[pt]))

    strands: list[Strand] = []
    for c in curves:
        pts = sorted(on_curve[c.label])
        if not pts:
            raise MalformedComplex(f"curve {c.label} meets no other face")
        for i, (s, v) in enumerate(pts):
            s2, v2 = pts[(i + 1) % len(pts)]
            ds = s2 - s if i + 1 < len(pts) else s2 + 1 - s
            strands.append(Strand(c.label, v, v2, (ds * c.direction[0], ds * c.direction[1])))

    out_of: dict[tuple[int, str], int] = {}
    for i, st in enumerate(strands):
        out_of[(st.tail, st.curve)] = i
    curves_at: dict[int, list[str]] = {}
    for (v, lab) in out_of:
        curves_at.setdefault(v, []).append(lab)
    successor = []
    for st in strands:
        others = [lab for lab in curves_at[st.head] if lab != st.curve]
        if len(others) != 1:
            raise MalformedComplex(f"vertex {st.head} is not a simple crossing")
        successor.append(out_of[(st.head, others[0])])

    p, q = spec.p, spec.q
    labels = [(int(v[0] * p) % p, math.floor(v[1] * q)) for v in vertices]
    return SurgeryComplex(
        spec=spec,
        mirror=mirror,
        curves=curves,
        faces=faces,
        vertices=vertices,
        labels=labels,
        strands=strands,
        successor=successor,
        core_boundaries=core,
        translation=shift,
    )


def _cycles(cx: SurgeryComplex) -> list[list[int]]:
    n = len(cx.strands)
    if sorted(cx.successor) != list(range(n)):
        raise MalformedComplex("successor map is not a permutation")
    seen = [False] * n
    cycles = []
    for i in range(n):
        if seen[i]:
            continue
        cyc = []
        j = i
        while not seen[j]:
            seen[j] = True
            cyc.append(j)
            j = cx.successor[j]
        if j != i:
            raise MalformedComplex("successor trace did not close")
        cycles.append(cyc)
    return cycles


def trace(cx: SurgeryComplex) -> TraceResult:
    """Euler characteristic and boundary circles of the banded surface."""
    chi = sum(f.euler_char for f in cx.faces) - cx.band_count
    cycles = []
    for cyc in _cycles(cx):
        hx = sum(cx.strands[i].displacement[0] for i in cyc)
        hy = sum(cx.strands[i].displacement[1] for i in cyc)
        if hx.denominator != 1 or hy.denominator != 1:
            raise MalformedComplex("boundary cycle does not close on the torus")
        cycles.append(BoundaryCycle(len(cyc), (int(hx), int(hy)), tuple(cyc)))
    cycles += [BoundaryCycle(1, None) for _ in range(cx.core_boundaries)]
    return TraceResult(chi, tuple(cycles))


@dataclass(frozen=True)
class OrbitCheck:
    orbits: tuple[tuple[int, ...], ...]
    rotations: tuple[Fraction, ...]

    @property
    def orbit_lengths(self) -> list[int]:
        return sorted(len(o) for o in self.orbits)


def orbit_check(cx: SurgeryComplex) -> OrbitCheck:
    """Orbits of the torus-link cycles under the deck translation.

    ``rotations[i]`` is the fraction of a turn by which the power of the
    translation that returns orbit ``i`` to itself shifts each cycle
    along its own strand order.
    """
    cycles = _cycles(cx)
    tx, ty = cx.translation
    by_tail = {}
    for i, st in enumerate(cx.strands):
        fam = _family(cx, st.curve)
        by_tail[(cx.vertices[st.tail], fam)] = i
    image = []
    for st in cx.strands:
        v = cx.vertices[st.tail]
        w = (_mod1(v[0] + tx), _mod1(v[1] + ty))
        key = (w, _family(cx, st.curve))
        if key not in by_tail:
            raise MalformedComplex("translation does not preserve the strand set")
        image.append(by_tail[key])
    which = {}
    for ci, cyc in enumerate(cycles):
        for s in cyc:
            which[s] = ci
    cyc_perm = []
    for cyc in cycles:
        targets = {which[image[s]] for s in cyc}
        if len(targets) != 1:
            raise MalformedComplex("translation splits a boundary cycle")
        cyc_perm.append(targets.pop())

    orbits, rotations = [], []
    seen = set()
    for start in range(len(cycles)):
        if start in seen:
            continue
        orb = [start]
        seen.add(start)
        c = cyc_perm[start]
        while c != start:
            orb.append(c)
            seen.add(c)
            c = cyc_perm[c]
        orbits.append(tuple(orb))
        # apply the translation len(orb) times to the first strand of the cycle
        cyc = cycles[start]
        s = cyc[0]
        for _ in range(len(orb)):
            s = image[s]
        rotations.append(_mod1(Fraction(cyc.index(s), len(cyc))))
    return OrbitCheck(tuple(orbits), tuple(rotations))


def _family(cx: SurgeryComplex, label: str) -> str:
    return label[0]
