"""Equivariant embeddings of periodic surface maps into spheres."""

__version__ = "0.1.0"

from .errors import SurfembedError
from .surfaces import (
    OrbifoldSignature,
    SurfaceSpec,
    Variant,
    boundary_action,
    fstar_family,
    orbifold_type,
    rh_genus,
    top_type,
)
from .classification import MapDatum, dgf, dhat_bounds, lower_bound, upper_bound

__all__ = [
    "__version__",
    "SurfembedError",
    "OrbifoldSignature",
    "SurfaceSpec",
    "Variant",
    "boundary_action",
    "fstar_family",
    "orbifold_type",
    "rh_genus",
    "top_type",
    "MapDatum",
    "dgf",
    "dhat_bounds",
    "lower_bound",
    "upper_bound",
]
