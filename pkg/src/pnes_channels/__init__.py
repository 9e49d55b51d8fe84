"""Lossy two-mode photon-number channels: joint statistics, threshold decoding and capacities."""

__version__ = "0.1.0"

from .info import (
    Moments,
    SymbolTable,
    correlation_index,
    mandel_q,
    marginals,
    moments,
    mutual_information,
)
from .joint import CutoffError, JointDistribution
from .loss import (
    ChannelParams,
    correlation_after_loss,
    joint_tmc,
    joint_tth,
    joint_twb,
    kraus_element,
    lossy_joint,
    thinning_oracle,
)
from .protocol import (
    CapacityResult,
    ThresholdSet,
    asymmetry_sweep,
    capacity,
    capacity_sweep,
    coincidence_curvature,
    decode,
    symbol_table,
)
from .states import (
    PhotonProfile,
    StateKind,
    TthSpec,
    auto_cutoff,
    ideal_joint,
    lambda_for_mean,
    tmc_coefficients,
    twb_coefficients,
    x_for_mean,
)
