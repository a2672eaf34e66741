"""Polar-coded error correction for MLC NAND flash pages."""
from .flash_channel import FlashModel, WearState, hard_boundaries, raw_error_probability
from .mapping import MappingScheme, direct_scheme, gray_scheme
from .polar import PolarCode, construct, encode, sc_decode
from .binary_sc import binary_sc_decode
from .boundary_opt import Boundaries, practical_smmi
from .llr_engine import quantized_llr_table
from .precheck import DecoderKind, PrecheckThresholds, decode_page
from .simulator import SimConfig, run_sweep

__version__ = "0.1.0"
