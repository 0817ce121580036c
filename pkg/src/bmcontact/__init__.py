"""Computations with contact structures that carry b^m singularities along a hypersurface."""

from .chart import Chart, ChartError, chart
from .exterior import (BForm, BMultiVector, ChartMap, d, decompose, ext_d, interior, lie_bracket,
                       lie_derivative, parse_form, pullback, reassemble, schouten, wedge)
from .contact import (ContactReport, PointClass, classify_point, contact_coeff, convexity_classify,
                      hamiltonian_field, is_contact, reeb, reeb_zero_clusters, theta_form)
from .jacobi import (JacobiPair, bjacobi_transversality, jacobi_from_contact, jacobi_via_liouville,
                     leaf_classify, liouville_contract, poissonize, reeb_orthogonality_check, symplectize)
from .profiles import ProfileFn, build_profile
from .sampling import GridConfig
from .singular import (convergence_report, desingularize, folded_check, folded_from_vertical,
                       orientation_obstruction_check, singularize)

__version__ = "0.1.0"

__all__ = [
    "BForm", "BMultiVector", "Chart", "ChartError", "ChartMap", "ContactReport", "GridConfig",
    "JacobiPair", "PointClass", "ProfileFn", "bjacobi_transversality", "build_profile", "chart",
    "classify_point", "contact_coeff", "convergence_report", "convexity_classify", "d", "decompose",
    "desingularize", "ext_d", "folded_check", "folded_from_vertical", "hamiltonian_field", "interior",
    "is_contact", "jacobi_from_contact", "jacobi_via_liouville", "leaf_classify", "lie_bracket",
    "lie_derivative", "liouville_contract", "orientation_obstruction_check", "parse_form", "poissonize",
    "pullback", "reassemble", "reeb", "reeb_orthogonality_check", "reeb_zero_clusters", "schouten",
    "singularize", "symplectize", "theta_form", "wedge",
]
