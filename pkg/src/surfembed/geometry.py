"""Numeric realization of the equivariant embeddings.

Coordinates: C^2 = R^4 as (Re z, Im z, Re w, Im w); the unit 3-sphere
holds the bordered surfaces.  Closed surfaces are obtained by capping the
boundary circles inside a join S^3 * S^a, whose ambient coordinates are
the 4 coordinates of C^2 followed by the a+1 coordinates of the second
factor.

The bordered surface itself is realized as a fiber of

    plain:  z^p - lam * w^q
    plus:   conj(z) * (z^(p+1) - lam * w^q)
    minus:  conj(z) * (conj(z)^(p-1) - lam * w^q)

i.e. the set ``{arg G = c}`` closed up by its zero set.  ``lam`` puts the
torus link on the Clifford torus ``|z| = |w|``.  Near the core of the
first solid torus the fiber is the p meridian disks; near the other core
it is the q meridian disks (plain) or the annulus ``{arg z = q arg w}``
(plus/minus).  Each fiber is exactly invariant under the acting rotation,
and its boundary is exactly the standard torus-link parameterization.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .errors import InvalidComponent, MissingAction, NoPlan, PoleSingularity
from .numtheory import egcd
from .surfaces import SurfaceSpec, Variant, boundary_action, top_type

SQRT_HALF = math.sqrt(0.5)
TWO_PI = 2.0 * math.pi
FIBER_ANGLE = 0.5 * math.pi  # keeps every sample off the projection pole

CORE = "o"


@dataclass(frozen=True)
class PointC2:
    z: complex
    w: complex

    def as_real(self) -> np.ndarray:
        return np.array([self.z.real, self.z.imag, self.w.real, self.w.imag])

    def norm(self) -> float:
        return math.sqrt(abs(self.z) ** 2 + abs(self.w) ** 2)


def tau_apply(a: int, b: int, pt: PointC2) -> PointC2:
    """Rotate z by 1/a and w by 1/b of a full turn."""
    return PointC2(pt.z * np.exp(1j * TWO_PI / a), pt.w * np.exp(1j * TWO_PI / b))


def stereographic(pt: PointC2) -> np.ndarray:
    u, v, x, y = pt.as_real()
    if abs(1.0 + u) < 1e-14:
        raise PoleSingularity("(-1, 0) has no stereographic image")
    return np.array([v, x, y]) / (1.0 + u)


def stereographic_array(pts: np.ndarray) -> np.ndarray:
    """Row-wise projection of (N, 4) points; rows at the pole become nan."""
    den = 1.0 + pts[:, 0]
    with np.errstate(divide="ignore", invalid="ignore"):
        out = pts[:, 1:4] / den[:, None]
    out[np.abs(den) < 1e-14] = np.nan
    return out


# --- boundary circles -------------------------------------------------------


def bezout_pair(spec: SurfaceSpec) -> tuple[int, int]:
    """``(a, b)`` with ``a*q - b*e = d``, ``e`` the signed z-winding of the link."""
    d, x, y = egcd(spec.q, spec.twist)
    assert d == spec.d
    return x, -y


@dataclass(frozen=True)
class CirclePhases:
    """``theta -> (r_z e^{i(wz theta + cz)}, r_w e^{i(ww theta + cw)})``."""

    wz: int
    cz: float
    ww: int
    cw: float
    rz: float = SQRT_HALF
    rw: float = SQRT_HALF

    def __call__(self, theta) -> np.ndarray:
        theta = np.asarray(theta, dtype=float)
        az = self.wz * theta + self.cz
        aw = self.ww * theta + self.cw
        return np.stack(
            [self.rz * np.cos(az), self.rz * np.sin(az), self.rw * np.cos(aw), self.rw * np.sin(aw)],
            axis=-1,
        )


def component_phases(spec: SurfaceSpec, component_id) -> CirclePhases:
    tt = top_type(spec)
    if component_id == CORE:
        if not tt.has_core_boundary:
            raise InvalidComponent(f"{spec} has no core boundary")
        return CirclePhases(0, 0.0, -1, 0.0, rz=0.0, rw=1.0)
    if not isinstance(component_id, (int, np.integer)) or not 0 <= component_id < tt.d:
        raise InvalidComponent(f"component {component_id!r} not in 0..{tt.d - 1} or {CORE!r}")
    d = spec.d
    a, b = bezout_pair(spec)
    l = int(component_id)
    return CirclePhases(
        spec.q // d, TWO_PI * ((b * l) % d) / d, spec.twist // d, TWO_PI * ((a * l) % d) / d
    )


def boundary_param(spec: SurfaceSpec, component_id, theta: float) -> PointC2:
    """Point at parameter ``theta`` on a boundary circle of the bordered surface.

    ``component_id`` is ``0..d-1`` for the torus-link components or ``"o"``
    for the core circle ``(0, e^{-i theta})`` of the plus/minus families.
    """
    x = component_phases(spec, component_id)(theta)
    return PointC2(complex(x[0], x[1]), complex(x[2], x[3]))


def boundary_ids(spec: SurfaceSpec) -> list:
    tt = top_type(spec)
    return list(range(tt.d)) + ([CORE] if tt.has_core_boundary else [])


def locate(spec: SurfaceSpec, component_id, pt: PointC2, tol: float = 1e-9) -> float | None:
    """Parameter of ``pt`` on the given circle, or None if it is not on it."""
    ph = component_phases(spec, component_id)
    if component_id == CORE:
        if abs(pt.z) > tol:
            return None
        return (-math.atan2(pt.w.imag, pt.w.real)) % TWO_PI
    target = pt.as_real()
    arg_z = math.atan2(pt.z.imag, pt.z.real)
    cands = [(arg_z - ph.cz + TWO_PI * j) / ph.wz for j in range(ph.wz)]
    best = min(cands, key=lambda t: float(np.linalg.norm(ph(t) - target)))
    if np.linalg.norm(ph(best) - target) > tol:
        return None
    return best % TWO_PI


def _wrap_half(x: float) -> float:
    """Reduce a number of turns into (-1/2, 1/2]."""
    y = x - math.floor(x)
    return y - 1.0 if y > 0.5 else y


def rotation_estimate(spec: SurfaceSpec, component_id, power: int | None = None,
                      samples: int = 7) -> float:
    """Measured parameter shift (in turns, within (-1/2, 1/2]) of the acting map.

    ``power`` defaults to the smallest power of the acting rotation that
    maps the component to itself, found by trial.
    """
    component_phases(spec, component_id)
    if power is None:
        power = _stabilizing_power(spec, component_id)
    shifts = []
    for theta in np.linspace(0.1, TWO_PI - 0.3, samples):
        pt = boundary_param(spec, component_id, theta)
        for _ in range(power):
            pt = tau_apply(spec.z_step, spec.w_step, pt)
        t2 = locate(spec, component_id, pt)
        if t2 is None:
            raise InvalidComponent(f"power {power} moves component {component_id} off itself")
        shifts.append(_wrap_half((t2 - theta) / TWO_PI))
    spread = max(abs(_wrap_half(s - shifts[0])) for s in shifts)
    if spread > 1e-9:
        raise InvalidComponent(f"shift is not constant along component {component_id}")
    return shifts[0]


def _stabilizing_power(spec: SurfaceSpec, component_id) -> int:
    pt0 = boundary_param(spec, component_id, 0.37)
    pt = pt0
    for k in range(1, spec.order + 1):
        pt = tau_apply(spec.z_step, spec.w_step, pt)
        if locate(spec, component_id, pt) is not None:
            return k
    raise InvalidComponent("no power of the action preserves the component")


# --- joins ------------------------------------------------------------------


def join_point(x: Sequence[float], y: Sequence[float], t: float) -> np.ndarray:
    """Point ``x cos(pi t/2) + y sin(pi t/2)`` of the join, x-block first."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    c, s = math.cos(0.5 * math.pi * t), math.sin(0.5 * math.pi * t)
    return np.concatenate([c * x, s * y])


def _join_rows(x: np.ndarray, y: np.ndarray, t: np.ndarray) -> np.ndarray:
    """Vectorized join of row arrays ``x`` (N, a) and ``y`` (N, b) at ``t`` (N,)."""
    t = np.asarray(t, dtype=float)
    x = np.broadcast_to(x, (t.size, x.shape[-1]))
    y = np.broadcast_to(y, (t.size, y.shape[-1]))
    c = np.cos(0.5 * np.pi * t)[:, None]
    s = np.sin(0.5 * np.pi * t)[:, None]
    return np.concatenate([c * x, s * y], axis=1)


def rotation_block(turn: float) -> np.ndarray:
    c, s = math.cos(TWO_PI * turn), math.sin(TWO_PI * turn)
    return np.array([[c, -s], [s, c]])


def tau_matrix(a: int, b: int) -> np.ndarray:
    m = np.zeros((4, 4))
    m[:2, :2] = rotation_block(1.0 / a)
    m[2:, 2:] = rotation_block(1.0 / b)
    return m


def factor_matrix(dim: int, turn: Fraction) -> np.ndarray:
    """Action on the second join factor S^dim: rotation about its last axis."""
    m = np.eye(dim + 1)
    if dim >= 1:
        m[:2, :2] = rotation_block(float(turn))
    elif turn % 1:
        raise ValueError("S^0 factor only admits the trivial action here")
    return m


def block_sum(*blocks: np.ndarray) -> np.ndarray:
    n = sum(b.shape[0] for b in blocks)
    out = np.zeros((n, n))
    i = 0
    for b in blocks:
        k = b.shape[0]
        out[i:i + k, i:i + k] = b
        i += k
    return out


# --- plans ------------------------------------------------------------------


@dataclass(frozen=True)
class Cap:
    boundary_id: object
    cap_kind: str  # pole_cone | equator_annulus_cap | offset_disk_cap
    anchor: tuple[float, ...]


@dataclass(frozen=True)
class EmbeddingPlan:
    spec: SurfaceSpec
    join_factors: tuple[int, ...]
    caps: tuple[Cap, ...]
    smooth: bool
    provenance: str
    factor_turn: Fraction = Fraction(0)
    # for offset-disk caps on a single orbit: the caps are images of cap 0
    orbit_caps: bool = False

    @property
    def ambient_dim(self) -> int:
        return sum(self.join_factors) + len(self.join_factors) - 1

    def action_matrix(self) -> np.ndarray:
        s = self.spec
        return block_sum(tau_matrix(s.z_step, s.w_step), factor_matrix(self.join_factors[1], self.factor_turn))


def _equator(dim: int, turn: float) -> np.ndarray:
    """Point of the second factor at angle ``turn`` on its first coordinate circle."""
    x = np.zeros(dim + 1)
    if dim == 0:
        x[0] = 1.0 if turn == 0 else -1.0
    else:
        x[0], x[1] = math.cos(TWO_PI * turn), math.sin(TWO_PI * turn)
    return x


def _pole(dim: int, south: bool = False) -> np.ndarray:
    x = np.zeros(dim + 1)
    x[-1] = -1.0 if south else 1.0
    return x


def _orbit_labels(spec: SurfaceSpec) -> list[int]:
    """Label of the component tau^i(K_0) for i = 0..d-1."""
    d = spec.d
    step = -1 if spec.variant is Variant.PLUS else 1
    return [(step * i) % d for i in range(d)]


def _smooth_plan(spec: SurfaceSpec) -> EmbeddingPlan | None:
    tt = top_type(spec)
    ba = boundary_action(spec)
    d = tt.d
    if spec.variant is Variant.PLAIN:
        if tt.unknotted:
            dim = 0 if d == 2 else 1
            caps = tuple(
                Cap(l, "offset_disk_cap", tuple(_equator(dim, Fraction(l, d)))) for l in range(d)
            )
            prov = "offset-disk capping in S^3*S^0" if dim == 0 else "offset-disk capping in S^3*S^1"
            return EmbeddingPlan(spec, (3, dim), caps, True, prov + "; smoothing along free seams")
        if d == 1:
            rot = ba.orbits[0].rotation
            caps = (Cap(0, "equator_annulus_cap", tuple(_pole(2))),)
            return EmbeddingPlan(spec, (3, 2), caps, True,
                                 "equator-annulus capping in S^3*S^2; smoothing along free seams",
                                 factor_turn=rot)
        return None
    core_cap = Cap(CORE, "pole_cone", tuple(_pole(2)))
    if d == 1:
        rot = ba.orbits[0].rotation
        caps = (core_cap, Cap(0, "equator_annulus_cap", tuple(_pole(2))))
        return EmbeddingPlan(spec, (3, 2), caps, True,
                             "pole cone + equator-annulus capping in S^3*S^2; smoothing along free seams",
                             factor_turn=rot)
    if tt.unknotted:
        labels = _orbit_labels(spec)
        caps = (core_cap,) + tuple(
            Cap(labels[i], "offset_disk_cap", tuple(_equator(2, Fraction(i, d)))) for i in range(d)
        )
        return EmbeddingPlan(spec, (3, 2), caps, True,
                             "pole cone + offset-disk capping in S^3*S^2; smoothing along free seams",
                             factor_turn=Fraction(1, d), orbit_caps=True)
    return None


def _topological_plan(spec: SurfaceSpec) -> EmbeddingPlan | None:
    ids = boundary_ids(spec)
    if len(ids) > 2:
        return None
    caps = tuple(Cap(cid, "pole_cone", (1.0,) if i == 0 else (-1.0,)) for i, cid in enumerate(ids))
    return EmbeddingPlan(spec, (3, 0), caps, False, "cones from the two points of S^0 (not smooth)")


def embedding_plans(spec: SurfaceSpec) -> list[EmbeddingPlan]:
    """Every plan available for ``spec``: the smooth one first, then the topological S^4 one."""
    return [pl for pl in (_smooth_plan(spec), _topological_plan(spec)) if pl is not None]


def embedding_plan(spec: SurfaceSpec) -> EmbeddingPlan:
    """The smooth join-capping plan for ``spec``."""
    pl = _smooth_plan(spec)
    if pl is None:
        tt = top_type(spec)
        raise NoPlan(f"{spec}: boundary has {tt.d} components of knot type {tt.knot_type}")
    return pl


@dataclass(frozen=True)
class FamilyPlan:
    p: int
    k: int
    starred: bool
    join_factors: tuple[int, ...]
    rotation_orders: tuple[object, ...]

    @property
    def ambient_dim(self) -> int:
        return sum(self.join_factors) + len(self.join_factors) - 1


def family_plan(p: int, k: int, starred: bool = True) -> FamilyPlan:
    """Dimension record of the iterated-join embeddings of the order p^k families.

    Unstarred (k > 1): S^3 * S^1 * ... * S^1 (k-1 circles) with action
    ``tau_{1,p^k} + tau_p + ... + tau_{p^(k-1)}``.  Starred (k > 2): the
    circles carry ``tau_{p^2}, ..., tau_{p^(k-1)}`` and a trivial last factor,
    which is an S^0 when p = 2.
    """
    if starred:
        if k < 3:
            raise ValueError("starred family needs k >= 3")
        orders = [f"tau_{{{p},{p**k}}}"] + [p**r for r in range(2, k)] + [1]
        factors = [3] + [1] * (k - 2) + [0 if p == 2 else 1]
    else:
        if k < 2:
            raise ValueError("family needs k >= 2")
        orders = [f"tau_{{1,{p**k}}}"] + [p**r for r in range(1, k)]
        factors = [3] + [1] * (k - 1)
    return FamilyPlan(p, k, starred, tuple(factors), tuple(orders))


# --- sampling ---------------------------------------------------------------


ImageFn = Callable[[np.ndarray, np.ndarray], tuple[str, np.ndarray, np.ndarray]]
EvalFn = Callable[[np.ndarray, np.ndarray], np.ndarray]


@dataclass
class Patch:
    patch_id: str
    evaluate: EvalFn
    image: ImageFn
    on_s3: bool = False


@dataclass
class PointCloud:
    plan: EmbeddingPlan | None
    dim: int
    resolution: int
    patches: list[Patch]
    points: np.ndarray
    params: np.ndarray
    patch_index: np.ndarray
    action: np.ndarray | None
    action_description: dict = field(default_factory=dict)

    def patch(self, pid: str) -> Patch:
        for pa in self.patches:
            if pa.patch_id == pid:
                return pa
        raise KeyError(pid)

    def patch_ids(self) -> list[str]:
        return [pa.patch_id for pa in self.patches]


def _fiber_gamma(spec: SurfaceSpec, phi: np.ndarray, dprime: np.ndarray) -> np.ndarray:
    """arg(1 + rho(phi) e^{i dprime}) for dprime in [-pi, pi], continuous inside.

    On the edges dprime = +-pi the signed zero picks the one-sided limit,
    and at the zero of the fiber function the limit along |z| = |w| is used.
    """
    e = abs(spec.twist)
    lam = 2.0 ** (0.5 * (spec.q - e))
    c, s = np.cos(phi) ** e, lam * np.sin(phi) ** spec.q
    edge = np.abs(np.abs(dprime) - np.pi) < 1e-15
    im = np.where(edge, np.copysign(0.0, dprime), s * np.sin(dprime))
    re = c + s * np.cos(dprime)
    out = np.arctan2(im, re)
    sing = edge & (np.abs(re) < 1e-12)
    return np.where(sing, np.sign(dprime) * 0.5 * np.pi, out)


def _sheet_eval(spec: SurfaceSpec, j: int, k: int) -> EvalFn:
    """Patch of the fiber with arg z near 2 pi j/p and q*arg(w) - e*arg(z) near 2 pi k."""
    p, q, e = spec.p, spec.q, spec.twist
    sigma = -1 if spec.variant is Variant.MINUS else 1

    def f(u, v):
        phi = 0.5 * np.pi * np.asarray(u, dtype=float)
        dprime = np.pi * (2.0 * np.asarray(v, dtype=float) - 1.0)
        gam = _fiber_gamma(spec, phi, dprime)
        alpha = sigma * (FIBER_ANGLE - gam) / p + TWO_PI * j / p
        beta = (dprime + np.pi + TWO_PI * k + e * alpha) / q
        c, s = np.cos(phi), np.sin(phi)
        return np.stack([c * np.cos(alpha), c * np.sin(alpha), s * np.cos(beta), s * np.sin(beta)], axis=-1)

    return f


def _sheet_image(spec: SurfaceSpec, j: int, k: int) -> ImageFn:
    p, q, e = spec.p, spec.q, spec.twist
    # the action moves psi = (delta + 2 pi k)/q by a whole number of 2 pi/q steps
    step = Fraction(q, spec.w_step) - Fraction(e, p)
    if j == p - 1:
        step += e
    assert step.denominator == 1
    target = f"sheet{(j + 1) % p}_{(k + int(step)) % q}"

    def g(u, v):
        return target, u, v

    return g


def _pad(rows: np.ndarray, dim: int) -> np.ndarray:
    out = np.zeros((rows.shape[0], dim + 1))
    out[:, : rows.shape[1]] = rows
    return out


def _core_annulus(ph: CirclePhases) -> tuple[Callable, Callable]:
    """Great circle C and the projection annulus A(r, theta) from C to the circle ``ph``."""
    if abs(ph.ww) == 1:
        circ = CirclePhases(ph.wz, ph.cz, ph.ww, ph.cw, rz=0.0, rw=1.0)

        def ann(r, theta):
            x = CirclePhases(ph.wz, ph.cz, ph.ww, ph.cw, rz=1.0, rw=1.0)(theta)
            x[:, :2] *= np.sin(0.25 * np.pi * r)[:, None]
            x[:, 2:] *= np.cos(0.25 * np.pi * r)[:, None]
            return x
    elif abs(ph.wz) == 1:
        circ = CirclePhases(ph.wz, ph.cz, ph.ww, ph.cw, rz=1.0, rw=0.0)

        def ann(r, theta):
            x = CirclePhases(ph.wz, ph.cz, ph.ww, ph.cw, rz=1.0, rw=1.0)(theta)
            x[:, :2] *= np.cos(0.25 * np.pi * r)[:, None]
            x[:, 2:] *= np.sin(0.25 * np.pi * r)[:, None]
            return x
    else:
        raise NoPlan("offset-disk cap needs an unknotted component")
    return circ, ann


def _cap_patches(plan: EmbeddingPlan) -> list[Patch]:
    spec = plan.spec
    fdim = plan.join_factors[1]
    ba = boundary_action(spec)
    patches: list[Patch] = []
    link_turn = ba.orbits[0].rotation if ba.orbits else Fraction(0)

    def same_patch(pid, dv):
        return lambda u, v: (pid, u, v + dv)

    for i, cap in enumerate(plan.caps):
        cid = cap.boundary_id
        ph = component_phases(spec, cid)
        dv = float(ba.core_rotation) if cid == CORE else float(link_turn)
        if cap.cap_kind == "pole_cone":
            apex = np.asarray(cap.anchor, dtype=float) if fdim == 0 else _pole(fdim)
            pid = f"cone_{cid}"

            def ev(u, v, ph=ph, apex=apex):
                return _join_rows(ph(TWO_PI * v), apex[None, :], u)

            patches.append(Patch(pid, ev, same_patch(pid, dv)))
        elif cap.cap_kind == "equator_annulus_cap":
            turn = float(plan.factor_turn)

            def ev_a(u, v, ph=ph):
                theta = TWO_PI * v
                eq = _pad(np.stack([np.cos(theta), np.sin(theta)], axis=-1), fdim)
                return _join_rows(ph(theta), eq, u)

            def ev_h(u, v):
                theta = TWO_PI * v
                c, s = np.cos(0.5 * np.pi * u), np.sin(0.5 * np.pi * u)
                pts = np.stack([c * np.cos(theta), c * np.sin(theta), -s], axis=-1)
                return np.concatenate([np.zeros((pts.shape[0], 4)), pts], axis=1)

            patches.append(Patch(f"annulus_{cid}", ev_a, same_patch(f"annulus_{cid}", turn)))
            patches.append(Patch(f"hemisphere_{cid}", ev_h, same_patch(f"hemisphere_{cid}", turn)))
        elif cap.cap_kind == "offset_disk_cap":
            patches += _offset_patches(plan, i, cap, ph, dv)
        else:
            raise ValueError(f"unknown cap kind {cap.cap_kind}")
    return patches


def _offset_patches(plan: EmbeddingPlan, i: int, cap: Cap, ph: CirclePhases, dv: float) -> list[Patch]:
    spec = plan.spec
    fdim = plan.join_factors[1]
    if plan.orbit_caps:
        # cap i is the image of cap 0 under the i-th power of the action
        k = plan.caps.index(cap) - 1
        base_cap = plan.caps[1]
        ph0 = component_phases(spec, base_cap.boundary_id)
        x0 = np.asarray(base_cap.anchor, dtype=float)
        mat = np.linalg.matrix_power(plan.action_matrix(), k)
        n_orbit = len(plan.caps) - 1
        nxt = f"capdisk_{(k + 1) % n_orbit}", f"capband_{(k + 1) % n_orbit}"
        wrap = k == n_orbit - 1
        shift = dv if wrap else 0.0
        tag = k
    else:
        ph0, x0, mat = ph, np.asarray(cap.anchor, dtype=float), None
        tag = cap.boundary_id
        nxt = f"capdisk_{tag}", f"capband_{tag}"
        shift = dv
    circ, ann = _core_annulus(ph0)

    def disk(u, v):
        theta = TWO_PI * v
        # [x0, C(theta)]_t for t in [0, 1/2], S^3 block first
        pts = _join_rows(circ(theta), x0[None, :], 1.0 - 0.5 * u)
        return pts if mat is None else pts @ mat.T

    def band(u, v):
        theta = TWO_PI * v
        pts = _join_rows(ann(u, theta), x0[None, :], 0.5 - 0.5 * u)
        return pts if mat is None else pts @ mat.T

    return [
        Patch(f"capdisk_{tag}", disk, lambda u, v: (nxt[0], u, v + shift)),
        Patch(f"capband_{tag}", band, lambda u, v: (nxt[1], u, v + shift)),
    ]


def surface_patches(spec: SurfaceSpec, dim: int = 3) -> list[Patch]:
    """The pq fiber patches realizing the bordered surface, padded into R^(dim+1)."""
    top_type(spec)
    out = []
    for j in range(spec.p):
        for k in range(spec.q):
            f = _sheet_eval(spec, j, k)

            def ev(u, v, f=f):
                return _pad(f(u, v), dim)

            out.append(Patch(f"sheet{j}_{k}", ev, _sheet_image(spec, j, k), on_s3=True))
    return out


def sample_patches(patches: list[Patch], resolution: int, dim: int, action: np.ndarray | None,
                   plan: EmbeddingPlan | None = None, description: dict | None = None) -> PointCloud:
    if resolution < 1:
        raise ValueError("resolution must be positive")
    g = np.linspace(0.0, 1.0, resolution + 1)
    uu, vv = np.meshgrid(g, g, indexing="ij")
    u, v = uu.ravel(), vv.ravel()
    pts, params, idx = [], [], []
    for k, pa in enumerate(patches):
        x = pa.evaluate(u, v)
        pts.append(x)
        params.append(np.stack([u, v], axis=-1))
        idx.append(np.full(u.size, k))
    return PointCloud(
        plan=plan,
        dim=dim,
        resolution=resolution,
        patches=patches,
        points=np.concatenate(pts),
        params=np.concatenate(params),
        patch_index=np.concatenate(idx),
        action=action,
        action_description=description or {},
    )


def sample_embedding(plan: EmbeddingPlan, resolution: int) -> PointCloud:
    """Sample every surface sheet and cap patch of ``plan`` on a (res+1)^2 grid."""
    m = plan.ambient_dim
    patches = surface_patches(plan.spec, m) + _cap_patches(plan)
    desc = {
        "s3": [plan.spec.z_step, plan.spec.w_step],
        "factor": plan.join_factors[1],
        "factor_turn": str(plan.factor_turn),
    }
    return sample_patches(patches, resolution, m, plan.action_matrix(), plan, desc)


def equivariance_residual(cloud: PointCloud, action: np.ndarray | None = None) -> float:
    """max |rho(e(x)) - e(f(x))| over the sampled parameters x."""
    rho = cloud.action if action is None else action
    if rho is None:
        raise MissingAction("point cloud carries no action")
    worst = 0.0
    for k, pa in enumerate(cloud.patches):
        sel = cloud.patch_index == k
        u, v = cloud.params[sel, 0], cloud.params[sel, 1]
        tgt, u2, v2 = pa.image(u, v)
        moved = cloud.points[sel] @ rho.T
        expect = cloud.patch(tgt).evaluate(u2, v2)
        worst = max(worst, float(np.max(np.linalg.norm(moved - expect, axis=1))))
    return worst


def min_separation(cloud: PointCloud) -> float:
    """Smallest distance between interior samples lying on different patches."""
    from scipy.spatial import cKDTree

    u, v = cloud.params[:, 0], cloud.params[:, 1]
    inner = (u > 0) & (u < 1) & (v > 0) & (v < 1)
    pts = cloud.points[inner]
    lab = cloud.patch_index[inner]
    if len(set(lab.tolist())) < 2:
        return float("inf")
    tree = cKDTree(pts)
    k = min(16, len(pts))
    dist, nb = tree.query(pts, k=k)
    other = lab[nb] != lab[:, None]
    if not other.any():
        return float("inf")
    return float(dist[other].min())


# --- export -----------------------------------------------------------------


def write_point_cloud(cloud: PointCloud, path) -> None:
    """Rows ``patch_id u v x1 ... xm``."""
    ids = cloud.patch_ids()
    with open(path, "w", encoding="utf-8") as fh:
        for k, (u, v), x in zip(cloud.patch_index, cloud.params, cloud.points):
            coords = " ".join(f"{c:.17g}" for c in x)
            fh.write(f"{ids[k]} {u:.17g} {v:.17g} {coords}\n")


def read_point_cloud(path) -> list[tuple[str, float, float, np.ndarray]]:
    rows = []
    with open(path, encoding="utf-8") as fh:
        for line in fh:
            parts = line.split()
            rows.append((parts[0], float(parts[1]), float(parts[2]), np.array([float(t) for t in parts[3:]])))
    return rows


def write_obj(cloud: PointCloud, path) -> int:
    """Stereographic image of the S^3 patches as an OBJ mesh; returns the face count."""
    n = cloud.resolution + 1
    lines = []
    faces = []
    base = 1
    for k, pa in enumerate(cloud.patches):
        if not pa.on_s3:
            continue
        pts = cloud.points[cloud.patch_index == k][:, :4]
        xyz = stereographic_array(pts)
        for x in xyz:
            lines.append("v " + " ".join(f"{c:.12g}" for c in x))
        ok = np.isfinite(xyz).all(axis=1).reshape(n, n)
        for i in range(n - 1):
            for j in range(n - 1):
                if ok[i, j] and ok[i + 1, j] and ok[i + 1, j + 1] and ok[i, j + 1]:
                    a = base + i * n + j
                    faces.append(f"f {a} {a + n} {a + n + 1} {a + 1}")
        base += n * n
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("\n".join(lines + faces) + "\n")
    return len(faces)
