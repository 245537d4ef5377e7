"""Two qubits coupled to a parametrically driven oscillator, solved in the adiabatic regime.

Modules
-------
specfun      Laguerre/Hermite kernels and displaced-squeezed overlaps
qmat         density-matrix helpers (entropies, partial traces, distances)
model        parameters, Bogoliubov frame and adiabatic energy levels
dynamics     evolution of the adiabatic expansion and reduced density matrices
observables  coherence, discord, concurrence, Bell reconstruction, quadratures, Q-function
oracle       dense brute-force Hamiltonian used as the numerical reference
acceptance   the acceptance checks shared by tests and the CLI
"""

from .dynamics import (
    EvolutionState,
    InitialState,
    TruncationError,
    evolve,
    initial_coefficients,
    oscillator_rdm,
    qubit_osc_rdm,
    single_qubit_rdms,
    two_qubit_rdm,
)
from .model import (
    ModelParams,
    SpectralCollapseError,
    UnsupportedConfigurationError,
    adiabatic_levels,
    adiabatic_spectrum,
    build_frame,
    revival_time_estimate,
)

__version__ = "0.1.0"
