"""Secrecy rates of round-trip transmission with echoed, encrypted probes.

Modules
-------
channel_model
    Channel containers, power scaling, sampling and the one-way baseline.
gsteep
    Gaussian probing over MIMO links.
psteep
    PSK probing over single-antenna links.
msteep
    Shared probing for multiple access.
mc_oracle
    Monte Carlo protocol simulation.
cli
    Command-line front end.
"""

from .channel_model import (
    ChannelSet,
    PowerConfig,
    ScaledChannelSet,
    channel_strength_ratio_alpha,
    classic_wtc_difference,
    classic_wtc_rate,
    classic_wtc_terms,
    sample_channels,
    scale_channels,
)
from .errors import (
    BoundNotApplicableError,
    ConfigError,
    ConsistencyError,
    InvalidArgumentError,
    RatioUndefinedError,
    SingularChannelError,
    SteepError,
    UnsupportedConfigurationError,
)
from .gsteep import SecrecyBreakdown, SisoSnr, gsteep_secrecy_rate, secret_key_capacity

__version__ = "0.1.0"
