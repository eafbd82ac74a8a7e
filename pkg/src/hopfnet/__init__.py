"""Detect and demonstrate Hopf bifurcations in mass action reaction networks."""

__version__ = "0.1.0"

from .criteria import (  # noqa: E402
    ConvexCoordinates,
    CriterionOutcome,
    Verdict,
    convex_jacobian,
    criterion1,
    criterion2_rank_aware,
    criterion2_search,
    hopf_scan,
    realize_system,
    verify_outcome,
)
from .dynamics import (  # noqa: E402
    OpenParameters,
    fit_rate_constants,
    jacobian,
    open_jacobian,
    open_rhs,
    rate_vector,
    rhs,
)
from .fluxcone import extreme_rays, flux_from_weights, membership  # noqa: E402
from .network import (  # noqa: E402
    Network,
    conservation_basis,
    fully_open_extension,
    kinetic_matrix,
    parse_network,
    render_network,
    stoichiometric_matrix,
)
from .simulate import detect_oscillation, hopf_demo, integrate  # noqa: E402
from .spectral import classify, d_instability_search, is_p0_minus, theorem1_hypotheses  # noqa: E402
