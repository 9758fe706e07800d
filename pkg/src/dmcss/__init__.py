"""Dual-mode chirp spread spectrum modem and BER simulation harness."""

from .baselines import (
    DCRK,
    DMCSS,
    EPSK,
    GCSS,
    LORA,
    SSK_ICS,
    BaselineSymbol,
    Scheme,
    SchemeId,
    SskVariant,
    UnsupportedSchemeError,
    scheme_bits_per_symbol,
    spectral_efficiency,
)
from .channels import ChannelSpec, sigma_for_ebn0
from .css_core import (
    DmCssSymbol,
    Slope,
    SpreadingFactor,
    bits_to_symbol,
    down_chirp,
    inner_product,
    modulate,
    symbol_energy,
    symbol_to_bits,
    unchirped_symbol,
    up_chirp,
)
from .detectors import DetectionResult, correlation_detect, dechirp, detect_dm_css
from .simharness import (
    BerPoint,
    RequiredSnrResult,
    SweepConfig,
    required_snr_at_target,
    run_ber_point,
    run_sweep,
)

__version__ = "0.1.0"
