"""Perfect simulation of chains with complete connections by regeneration."""

from .core import (
    UNBOUNDED,
    ArrayField,
    FunctionKernel,
    SpecificationKernel,
    ThresholdSchedule,
    UniformField,
    schedule_level,
    uniform_at,
)
from .engine import (
    RegenerationRecord,
    RenewalReport,
    WindowSample,
    reconstruct,
    renewal_scan,
    sample_window,
    tau_direct,
    tau_window,
)
from .errors import (
    Aborted,
    BoundVacuous,
    ConfigError,
    DominanceViolation,
    InfeasibleK0,
    Reducible,
    RegenSimError,
    ScheduleExhausted,
    TailUnavailable,
)
from .house_of_cards import (
    RegimeReport,
    RhoTable,
    house_of_cards_paths,
    impatience_bound,
    loss_of_memory_bound,
    regime_report,
    return_frequencies,
    rho_table,
    simulate_W,
    tau_tail_bound,
)
from .models import (
    BinaryARSpec,
    CallableTail,
    CustomLink,
    DaryState,
    FiniteOrderSpec,
    GeometricTail,
    LinearLink,
    LogisticLink,
    PowerTail,
    ar_minorant,
    ar_remainder,
    ar_schedule,
    dary_perfect_marginal,
    dary_step,
    dary_trajectory,
)
from .oracle import (
    StationaryLaw,
    brute_force_phi,
    compare_distributions,
    exact_stationary,
    random_finite_order_spec,
)
from .partition import LayerLayout, layout, locate

__version__ = "0.1.0"
