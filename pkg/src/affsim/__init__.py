"""Slotted-time scheduling and simulation for wireless layer dissemination
under an additive interference-weight model."""

from .core import (
    AffectanceMatrix,
    CapacityError,
    Characterization,
    ConstraintError,
    InstanceError,
    LayerTopology,
    Schedule,
    SelectivityReport,
    UnknownLinkError,
    brute_force_max_avg_affectance,
    brute_force_min_selective,
    characterize,
    encode_radio_network,
    is_selected,
    is_successful,
    max_avg_affectance_w,
    schedule_from_text,
    schedule_to_text,
    total_affectance,
    verify_selective,
)
from .engine import (
    ProtocolSpec,
    RunRecord,
    SweepRow,
    replay_first_success,
    run_adaptive,
    run_schedule,
    summarize,
    sweep,
    write_csv,
)
from .protocols import (
    DecayState,
    PartialAssignment,
    RandomizedParams,
    ScheduleError,
    decay_period,
    decay_step,
    deterministic_schedule,
    exact_selection_probability,
    mc_selection_probability,
    randomized_schedule,
    receiver_partition,
    sinr_step,
)
from .scenario import (
    OfficeGridSpec,
    generate_office_layer,
    generate_random_instance,
    generate_rn_instance,
    load_instance,
    office_affectance,
    save_instance,
    sinr_defaults,
)

__all__ = [name for name in dir() if not name.startswith("_")]
