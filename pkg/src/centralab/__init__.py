"""Centralizers, double centralizers and Smiley-type containment checks for complex matrices."""

__version__ = "0.1.0"

from .adcalc import (  # noqa: E402
    LiftedOperator,
    ad_apply,
    ad_lift,
    ad_power_apply,
    centralizer,
    double_centralizer,
    multiplier_lift,
    randomized_set_centralizer,
    symmetrized_ad_kernel,
)
from .certify import SmileyCertificate, certify_smiley  # noqa: E402
from .decomp import CanonicalDecomposition, jordan_chevalley, nilpotency_order  # noqa: E402
from .hulls import commutant, pol_hull, star_algebra_hull, vn_hull  # noqa: E402
from .numlin import (  # noqa: E402
    DEFAULT_TOL,
    OperatorSubspace,
    ToleranceConfig,
    containment_residual,
    kernel_basis,
    orthonormalize,
    subspace_contains,
    subspace_intersect,
)

__all__ = [
    "CanonicalDecomposition", "DEFAULT_TOL", "LiftedOperator", "OperatorSubspace",
    "SmileyCertificate", "ToleranceConfig", "ad_apply", "ad_lift", "ad_power_apply",
    "centralizer", "certify_smiley", "commutant", "containment_residual",
    "double_centralizer", "jordan_chevalley", "kernel_basis", "multiplier_lift",
    "nilpotency_order", "orthonormalize", "pol_hull", "randomized_set_centralizer",
    "star_algebra_hull", "subspace_contains", "subspace_intersect",
    "symmetrized_ad_kernel", "vn_hull",
]
