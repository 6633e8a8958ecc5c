"""Lee homology, the s-invariant and cobordism maps for knot diagrams."""

from .diagram import (BraidWord, DiagramError, PlanarDiagram, connected_sum, from_braid,
                      mirror, parse_braid, parse_pd)
from .homology import s_invariant, width
from .signature import braid_signature

__version__ = "0.1.0"

__all__ = ["BraidWord", "DiagramError", "PlanarDiagram", "braid_signature", "connected_sum",
           "from_braid", "mirror", "parse_braid", "parse_pd", "s_invariant", "width",
           "__version__"]
