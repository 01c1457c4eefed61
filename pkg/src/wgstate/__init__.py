"""Simulation toolkit for tunable-weight two-qubit photonic graph states.

The package covers the full software side of the experiment: Jones-
calculus propagation through the generation train, construction of the
ideal weighted graph state, projective measurement and coincidence
counting, sixteen-setting maximum-likelihood tomography, phase sensing
against the quantum Cramer-Rao bound with exhaustive Pauli and
differential-evolution general-axis measurement searches, and the
bin-bootstrap statistics pipeline.
"""

__version__ = "0.1.0"

from .qmath import (DensityMatrix, NonPhysicalStateError, PureState2Q,
                    concurrence, expectation, fidelity, tensor, trace_distance)
from .optics import (EulerAngles, RotationAxis, WaveplateKind, WaveplateTriple,
                     euler_to_waveplates, euler_unitary, phase_aligned_distance,
                     rotation_gate, rotation_waveplates, to_lab_angle,
                     waveplate_jones, waveplate_jones_lab)
from .stategen import (DegeneratePostselectionError, GenerationConfig,
                       GenerationResult, NoiseModel, apply_noise,
                       canonical_config, mzi_phase_condition,
                       simulate_generation, weighted_graph_state)
from .measurement import (CountRecord, Observable, ProjectorSetting,
                          TomographySetting, WaveplateSolverError,
                          general_axis_observable, outcome_probabilities,
                          pauli_observable, simulate_counts,
                          solve_projector_waveplates, tomography_settings)
from .metrology import (DerivativeVanishesError, SearchConfig, SearchError,
                        SensingConfig, SensingResult, encoding_unitary,
                        general_axis_search, limits, pauli_search,
                        qfi_closed_form, qfi_numeric, sense)
from .stats import (BinnedCounts, BootstrapConfig, BootstrapResult,
                    CosineFitError, DegenerateDataError, FitResult,
                    bootstrap_derivative, bootstrap_expectation,
                    bootstrap_ratio, bootstrap_variance, cosine_fit,
                    visibility)
from .tomography import (ReconstructionError, ReconstructionReport,
                         TomographyDataset, mle_reconstruct,
                         monte_carlo_report, read_dataset_csv,
                         simulate_tomography, write_dataset_csv)

__all__ = [name for name in dir() if not name.startswith("_")]
