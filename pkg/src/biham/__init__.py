"""biham: alternative Hamiltonian descriptions (classical and quantum) and
phase-space quantum mechanics.

Subsystems
----------
- linalg, polynomials, constants: shared exact and floating substrates
- lineardyn: the Hamiltonian inverse problem for linear vector fields
- structures: admissible (g, J, omega) triples, compatible Hermitian pairs,
  pseudo-Hermitian metrics, nonlinear charts
- recursion: Nijenhuis torsion, recursion operators, Schouten brackets
- gqm: finite-level geometric quantum mechanics
- wigner, moyal: the Weyl-Wigner-Moyal engine with deformed products
- cli, reports, plotting: the batch front-end
"""

__version__ = "0.1.0"

from .constants import ModelConstants
from .linalg import Spectrum, commutant_basis, spectral_decompose
from .lineardyn import (
    ConstantSymplectic,
    HamiltonianHierarchy,
    LinearVectorField,
    QuadraticHamiltonian,
    commutant_deformation,
    factorize,
    hamiltonicity_test,
    hierarchy,
    lie_deformed_structure,
)
from .polynomials import PhasePolynomial, poisson_bracket_poly
from .structures import (
    AdmissibleTriple,
    HermitianForm,
    NonlinearChart,
    compatibility_analysis,
    complete_triple,
    invariant_hermitian_check,
    nonlinear_chart,
    pencil_fields,
    pseudo_hermitian_metric,
    realify,
)
from .recursion import (
    AlgebraEndomorphism,
    PolyBivector,
    TensorField11,
    algebra_torsion,
    derivation_test,
    hochschild_star,
    invariant_chain,
    nijenhuis_torsion,
    recursion_from_pair,
    schouten_bracket,
)
from .gqm import (
    BlochTensors,
    DeformedFock,
    GnsRepresentation,
    PureState,
    bloch_geometry,
    deformed_fock,
    gns_construct,
    k_deformed_algebra,
    momentum_map,
    quadratic_bracket_check,
    superpose,
    transition_probability,
)
from .wigner import (
    GridFunction,
    KernelOperator,
    PhaseGrid,
    WignerFunction,
    classical_kms_check,
    mehler_gibbs_kernel,
    oscillator_gibbs_wigner,
    phase_point_frame,
    symplectic_fourier,
    weyl_map,
    wigner_transform,
)
from .moyal import (
    CircleFunction,
    circle_deformed_bracket,
    classical_deformed_bracket,
    moyal_bracket,
    moyal_product,
)
