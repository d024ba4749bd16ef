"""Spectral, distance and identifiability diagnostics."""

from .alignment import AlignmentReport, gte_alignment
from .distance import ConcentrationPoint, MinMaxStats, concentration_curve, minmax_ratio, minmax_stats
from .spectrum import (
    CSV_HEADER,
    SpectrumReport,
    covariance,
    effective_rank,
    log_spectrum,
    participation_ratio,
    spectrum_report,
    symmetric_evd,
    write_spectrum_csv,
)

__all__ = [
    "covariance",
    "symmetric_evd",
    "effective_rank",
    "participation_ratio",
    "log_spectrum",
    "SpectrumReport",
    "spectrum_report",
    "write_spectrum_csv",
    "CSV_HEADER",
    "minmax_ratio",
    "minmax_stats",
    "MinMaxStats",
    "concentration_curve",
    "ConcentrationPoint",
    "gte_alignment",
    "AlignmentReport",
]
