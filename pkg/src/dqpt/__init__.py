"""Loschmidt echoes and dynamical singularities of quenched two-band lattice
models on finite rings threaded by a twist flux."""
from .band_models import (
    QWZ,
    SSH,
    Creutz,
    CustomModel,
    DVector,
    LongRangeSSH,
    Quench,
    band_energy,
    d_vector,
    inner_product,
    lambda_k,
    le_mode,
)
from .critical import (
    CriticalPair,
    CriticalSet,
    asymptotic_le,
    constraint_residual,
    critical_flux,
    critical_set,
    critical_times,
    qwz_critical_pairs,
    qwz_t1_interval,
    solve_critical_momenta,
)
from .ed import EDQuench, ed_rate_function
from .errors import (
    BasisTooLargeError,
    DegenerateModeError,
    DqptError,
    GroundStateDegeneracyError,
    NoCriticalMomentumError,
    NotAvailableError,
    QuadratureError,
)
from .loschmidt import (
    MomentumGrid,
    RateSeries,
    lambda_max_vs_flux,
    local_maxima,
    loschmidt_echo,
    make_grid,
    rate_function,
    refined_peaks,
    size_sweep,
)
from .thermo import thermo_rate, thermo_series

__version__ = "0.1.0"

__all__ = [
    "QWZ",
    "SSH",
    "Creutz",
    "CustomModel",
    "DVector",
    "LongRangeSSH",
    "Quench",
    "band_energy",
    "d_vector",
    "inner_product",
    "lambda_k",
    "le_mode",
    "CriticalPair",
    "CriticalSet",
    "asymptotic_le",
    "constraint_residual",
    "critical_flux",
    "critical_set",
    "critical_times",
    "qwz_critical_pairs",
    "qwz_t1_interval",
    "solve_critical_momenta",
    "BasisTooLargeError",
    "DegenerateModeError",
    "DqptError",
    "GroundStateDegeneracyError",
    "NoCriticalMomentumError",
    "NotAvailableError",
    "QuadratureError",
    "MomentumGrid",
    "RateSeries",
    "lambda_max_vs_flux",
    "local_maxima",
    "loschmidt_echo",
    "make_grid",
    "rate_function",
    "refined_peaks",
    "size_sweep",
    "EDQuench",
    "ed_rate_function",
    "thermo_rate",
    "thermo_series",
]
