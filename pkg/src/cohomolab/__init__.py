"""Twisted cohomology of groups acting on cell complexes, higher Kazhdan
constants and certified stability of vanishing under deformations."""

from .analysis import (
    CohomologyReport,
    SubspaceBasis,
    closeness,
    cohomology,
    deformation_bound,
    kazhdan_constant,
    kernel_closeness_bound,
    laplacian_criterion,
    sufficient_epsilon,
    weil_rigidity_check,
)
from .cochain import codifferential, laplacian
from .complex import EquivariantComplex, complex_preset, presentation_complex
from .presentation import GroupPresentation, GroupRingElement, Word, fox_derivative, preset
from .rep import (
    DeformationSpec,
    Representation,
    character_rep,
    circle_discretization,
    circle_mode_flatten,
    random_deformation,
    trivial_rep,
)

__version__ = "0.1.0"
