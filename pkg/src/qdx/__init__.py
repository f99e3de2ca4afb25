"""Wavepacket spreading, transfer matrices and trace-map band structure for
the Fibonacci Hamiltonian, with the closed-form spreading bounds they are
compared against."""
from .errors import (
    BandCountMismatch, BoxCapExceeded, ConfigError, DegenerateFit, DomainError, GridTooCoarse,
    OutOfRangeError, QdxError, RootCountMismatch, SchemaError, SeriesTooShort, TolUnreachable,
)
from .lattice import LatticeWindow, PotentialSpec, apply_hamiltonian, potential_array, spectral_bound
from .transfer import (
    TransferMatrix, fibonacci_matrix, fibonacci_number, power_law_fit, transfer_matrix,
    window_max_norm,
)
from .tracemap import (
    BandSet, box_dimension, band_scaling, c_histogram, lambda_zero, real_bands, trace_sequence,
    triple_intersection,
)
from .dynamics import (
    WavePacket, evolve, moment, outside_probability, parseval_average, propagate_series,
    resolvent_vector, time_average,
)
from .bounds import (
    BoundReport, CouplingConstants, coupling_constants, lemma2_rhs, sandwich_report,
    spreading_profile, theorem1_rhs, transport_exponents,
)

__version__ = "0.1.0"
