"""Bergman orthogonal polynomials on circular multiply connected domains.

The domain is the open unit disk with finitely many disjoint closed disks
removed.  Two independent routes compute the monic orthogonal polynomials:
an exact-moment Gram/Cholesky oracle at extended precision and a layer
series over the semigroup generated by the hole reflections.
"""
from .errors import CMCDError, InvalidDomain
from .geometry import CircularDomain, Disk, validate
from .moebius import (AssumptionReport, CompositionFamily, MoebiusMap, check_assumption,
                      enumerate_family, m_of_r, mu_of_r)
from .moments import gram, kappa_defect, moment, orthopoly
from .polynomial import MonicPolynomial
from .series import series_orthopoly
from .kernel import kernel_eval, m_kernel_eval, reproduce_check
from .asymptotics import chi_n, exterior_expansion, kappa_expansion, theta
from .zeros import EmpiricalZeroMeasure, angular_uniformity, roots, two_circle_limit

__version__ = "0.1.0"

__all__ = [
    "CMCDError", "InvalidDomain", "CircularDomain", "Disk", "validate",
    "AssumptionReport", "CompositionFamily", "MoebiusMap", "check_assumption",
    "enumerate_family", "m_of_r", "mu_of_r", "gram", "kappa_defect", "moment",
    "orthopoly", "MonicPolynomial", "series_orthopoly", "kernel_eval",
    "m_kernel_eval", "reproduce_check", "chi_n", "exterior_expansion",
    "kappa_expansion", "theta", "EmpiricalZeroMeasure", "angular_uniformity",
    "roots", "two_circle_limit",
]
