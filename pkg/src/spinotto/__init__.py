"""Four-stroke quantum Otto engine simulator for a coupled two-spin medium.

The working-medium state lives in five expectation values (a
:class:`BlochVector`); branch evolutions are completely positive affine maps
(:mod:`spinotto.propagators`); their one-period product has a unique fixed
point, the limit cycle, whose spectrum and thermodynamics are analyzed in
:mod:`spinotto.engine`; entropy and distance diagnostics live in
:mod:`spinotto.measures`; :mod:`spinotto.cli` is the batch CSV front end.
"""

from .algebra import (
    BlochVector,
    EnergyBasisTransform,
    SpectralInfo,
    energy_basis_transform,
    energy_populations,
    matrix_function,
    matrix_log,
    matrix_sqrt,
    reconstruct_density,
    thermal_state,
    to_energy_basis,
    vn_eigenvalues,
)
from .engine import (
    CycleBranch,
    CyclePropagator,
    CycleSpec,
    CycleSpectrum,
    LimitCycleReport,
    NonUniqueLimitCycleError,
    SingularSystemError,
    ThermoLedger,
    TrajectorySample,
    compose_cycle,
    energy,
    iterate,
    limit_cycle,
    spectrum,
    thermo_ledger,
    trajectory,
)
from .measures import (
    DistanceIntermediates,
    conditional_entropy,
    conditional_entropy_closed_form,
    distance_intermediates,
    energy_conditional_entropy,
    energy_entropy,
    measurement_entropy,
    quantum_distance,
    quantum_distance_closed_form,
    vn_entropy,
    wootters_energy_distance,
)
from .propagators import (
    AdiabatParams,
    AdiabatSingularityError,
    AffinePropagator,
    BathParams,
    IsochoreParams,
    WeiNormanAngles,
    WeiNormanPath,
    adiabat_propagator,
    adiabat_propagator_direct,
    bath_rates,
    compose,
    identity_propagator,
    isochore_propagator,
    wei_norman_alphas,
)

__version__ = "0.1.0"
