"""Numerical model of an integrated weak-value-amplification interferometer.

Modules
-------
waveguide       slab TE modes, group velocity, overlaps, thermo-optics
grating         Bragg-grating transfer matrices and dispersion
interferometer  joint path/mode state propagation and dark-port readouts
metrology       Fisher information and Cramer-Rao bounds
noise           bias offset, random-walk drift, Allan deviation, thermal drift
config, io, cli scenario files, CSV/JSON output, command line
"""
from .errors import (BandGapError, ConfigError, ConvergenceError, CutoffError,
                     DivergentInformationError, GridTooCoarseError, InsufficientDataError,
                     NotGuidingError, ResolutionError, UndefinedSignalError, WVAError)
from .grating import (GratingComponent, GratingResponse, GratingSpec, double_grating,
                      fundamental_matrix, grating_phase_dispersion, grating_spectrum,
                      infinite_grating_response, single_grating, thin_layer_matrix)
from .interferometer import (DarkPortProfile, JointState, ModePair, ReadoutConfig,
                             dark_port_state, displacement_signal, mode_ratio_signal, propagate,
                             simulate_frequency_readout)
from .metrology import (PrecisionReport, PrecisionScenario, crb_frequency, displacement_fisher,
                        fisher_two_outcome, photon_rate, precision_report, qfi, sensitivity)
from .noise import (BiasModel, DriftTrajectory, ThermalDriftModel, allan_comparison,
                    allan_deviation, biased_estimate, biased_readout, drift_rate_std,
                    random_walk_bias, simulate_drift_experiment, thermal_drift)
from .waveguide import (C_LIGHT, TEModeSolution, ThermoOpticModel, WaveguideGeometry,
                        evaluate_mode, mode_overlap_alpha, native_group_velocity, solve_te_modes,
                        thermo_optic_slope)

__version__ = "0.1.0"
