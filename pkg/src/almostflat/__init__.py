"""Topological invariants of flat and almost-flat 4-manifolds from group data.

The first Betti number comes from abelianizing a presentation (Smith
normal form of the relation matrix) or from the rank of the
holonomy-fixed lattice; b2 and the intersection form follow from it.
"""

__version__ = "0.1.0"

from .linalg import (  # noqa: E402
    IntMatrix,
    SNFResult,
    determinant,
    hermite_normal_form,
    kernel_basis,
    rank,
    smith_normal_form,
)
from .grouppres import (  # noqa: E402
    AbelianInvariants,
    Presentation,
    Word,
    abelian_invariants,
    first_betti,
    parse_presentation,
    relation_matrix,
)
from .crystal import (  # noqa: E402
    AlmostBieberbachDescriptor,
    CrystalGroup,
    betti_via_holonomy,
    enumerate_point_group,
    fixed_sublattice_rank,
    underlying_betti,
)
from .forms import (  # noqa: E402
    Hyperbolic,
    Other,
    SymForm,
    Zero,
    classify,
    equivalent_small,
    hyperbolic,
    is_even,
    is_unimodular,
    signature,
    torus_form_oracle,
)
from .classify import ManifoldReport, analyze, b2_from_b1, form_from_b1  # noqa: E402
