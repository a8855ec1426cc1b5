"""Doppler shift and oscillator offset separation for OFDM downlinks.

Reference signals at two or more frequency positions of a carrier each give a
composite frequency estimate; because Doppler scales with absolute frequency
and oscillator offset does not, a small least-squares solve separates them.
"""
from .channel import ChannelConfig, TapSpec, apply_channel, add_noise, apply_sampling_drift, realize
from .errors import ConfigurationError, EstimationError, InputError, NtnDopplerError
from .estimator import EstimatorConfig, JointEstimate, PositionMeasurement, estimate
from .kernels import BACKEND
from .ofdm import OfdmConfig, demodulate, ici_profile, modulate
from .refsig import PositionSet, ReferenceSignalSpec, extract_position, generate

__version__ = "0.1.0"
