"""Reeb functions on simplicial complexes, flat functions and semialgebraic examples."""

__version__ = "0.1.0"

from .complex import (  # noqa: E402
    SimplicialComplex,
    Subcomplex,
    barycentric_subdivision,
    builtin,
    derived_neighborhood,
    is_closed_pseudomanifold,
    link,
    star,
)
from .construct import build_pl_reeb, glue_pl, reparameterize, spine  # noqa: E402
from .errors import InputError, ParseError, ReebForgeError, RetriesExhausted  # noqa: E402
from .homology import duality_betti_check, homology, smith_normal_form  # noqa: E402
from .plmap import PLMap  # noqa: E402
from .verify import classify_vertex, genus_bound, heegaard_bound, verify_reeb  # noqa: E402

__all__ = [
    "__version__",
    "SimplicialComplex",
    "Subcomplex",
    "PLMap",
    "barycentric_subdivision",
    "builtin",
    "derived_neighborhood",
    "is_closed_pseudomanifold",
    "link",
    "star",
    "build_pl_reeb",
    "glue_pl",
    "reparameterize",
    "spine",
    "homology",
    "smith_normal_form",
    "duality_betti_check",
    "verify_reeb",
    "classify_vertex",
    "heegaard_bound",
    "genus_bound",
    "ReebForgeError",
    "InputError",
    "ParseError",
    "RetriesExhausted",
]
