"""Slot-level Monte Carlo simulator of mmWave downlink scheduling under human blockage.

Modules
-------
blockage
    Four-state blockage traces driven by Poisson blocker arrivals.
channel
    Link budget, SNR and outage-gated Shannon rate.
predictor
    Noisy received-power prediction and blockage detection.
schedulers
    PF, MaxMin and blockage-aware PF policies.
engine
    Drops and Monte Carlo campaigns over scenario grids.
metrics
    ECDF, percentiles, mean rate and Jain's index.
config, cli
    Configuration files, result files and the ``mmwsim`` command.
"""
from .blockage import (
    AttenuationTrace,
    BlockageParams,
    ChannelState,
    arrival_times,
    generate_trace,
    trace_from_arrivals,
)
from .channel import (
    LinkBudget,
    UeGeometry,
    feasible_rate,
    instantaneous_rate,
    noise_power,
    received_power,
    snr,
)
from .engine import (
    DropResult,
    ScenarioConfig,
    ScenarioGrid,
    ScenarioPoint,
    build_channel,
    place_ues,
    run_campaign,
    run_drop,
    schedule_drop,
)
from .exceptions import (
    ConfigError,
    EmptyTraceError,
    GeometryError,
    MmwsimError,
    ParameterError,
    SchedulingError,
)
from .metrics import MetricsReport, build_report, ecdf, jain_index, mean_rate, percentile
from .predictor import PredictionParams, detect_blockage, predict_window
from .schedulers import (
    POLICIES,
    PredictedWindow,
    SchedulerState,
    bapf_schedule_window,
    maxmin_select,
    pf_select,
    schedule_slot,
    update_avg,
)

__version__ = "0.1.0"
