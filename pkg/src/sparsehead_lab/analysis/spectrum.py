"""Covariance eigen-spectra and effective rank."""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from ..autodiff import Tensor
from ..errors import ContractError, DimensionError, InsufficientDataError, NumericError

logger = logging.getLogger(__name__)

SYMMETRY_TOL = 1e-8
OFF_DIAGONAL_TOL = 1e-10
MAX_SWEEPS = 100
RANK_EPS_REL = 1e-6
LOG_FLOOR = 1e-12
CSV_HEADER = ("index", "sigma_r", "log10_sigma_r", "sigma_z", "log10_sigma_z")


def _array(v: Tensor | np.ndarray) -> np.ndarray:
    return v.data if isinstance(v, Tensor) else np.asarray(v, dtype=np.float64)


def covariance(v: Tensor | np.ndarray) -> np.ndarray:
    """Sample covariance of the rows of ``v`` with the 1/(n-1) normalization."""
    data = _array(v)
    if data.ndim != 2:
        raise DimensionError(f"covariance needs a 2-D array, got {data.shape}")
    n = data.shape[0]
    if n < 2:
        raise InsufficientDataError(f"covariance needs at least 2 rows, got {n}")
    centered = data - data.mean(axis=0)
    cov = centered.T @ centered / (n - 1)
    return (cov + cov.T) / 2


def _off_norm(a: np.ndarray) -> float:
    off = a - np.diag(np.diag(a))
    return float(np.sqrt(np.sum(off * off)))


def symmetric_evd(c: Tensor | np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """
    Eigen-decomposition of a symmetric matrix by cyclic Jacobi rotations.

    Returns eigenvalues sorted descending and the matching eigenvectors as
    columns.

    Raises:
        ContractError: If the matrix is not symmetric within 1e-8
        NumericError: If 100 sweeps do not bring the off-diagonal norm below
            max(1e-10, 1e-15·‖C‖_F)
    """
    a = np.array(_array(c), dtype=np.float64)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise DimensionError(f"symmetric_evd needs a square matrix, got {a.shape}")
    if np.max(np.abs(a - a.T), initial=0.0) > SYMMETRY_TOL:
        raise ContractError("symmetric_evd input is not symmetric")

    n = a.shape[0]
    a = (a + a.T) / 2
    v = np.eye(n)
    # 1e-10 absolute sits below float64 rounding once ‖C‖_F exceeds about 1e5.
    tol = max(OFF_DIAGONAL_TOL, 1e-15 * float(np.linalg.norm(a)))

    sweeps = 0
    while _off_norm(a) >= tol:
        if sweeps == MAX_SWEEPS:
            raise NumericError(f"Jacobi did not converge in {MAX_SWEEPS} sweeps (off-norm {_off_norm(a):.3e})")
        sweeps += 1
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                cos = 1.0 / math.sqrt(t * t + 1.0)
                sin = t * cos

                row_p, row_q = a[p].copy(), a[q].copy()
                a[p], a[q] = cos * row_p - sin * row_q, sin * row_p + cos * row_q
                col_p, col_q = a[:, p].copy(), a[:, q].copy()
                a[:, p], a[:, q] = cos * col_p - sin * col_q, sin * col_p + cos * col_q
                a[p, q] = a[q, p] = 0.0

                vec_p, vec_q = v[:, p].copy(), v[:, q].copy()
                v[:, p], v[:, q] = cos * vec_p - sin * vec_q, sin * vec_p + cos * vec_q

    logger.debug(f"Jacobi EVD of {n}x{n} converged in {sweeps} sweeps")
    values = np.diag(a).copy()
    order = np.argsort(-values, kind="stable")
    return values[order], v[:, order]


def effective_rank(sigma: np.ndarray, eps_rel: float = RANK_EPS_REL) -> tuple[int, float]:
    """
    (threshold count, entropy effective rank) of a descending spectrum.

    Small negative eigenvalues from round-off are treated as zero. An
    all-zero spectrum gives (0, 0.0).
    """
    s = np.clip(np.asarray(sigma, dtype=np.float64), 0.0, None)
    if s.size == 0 or s[0] <= 0:
        return 0, 0.0
    count = int(np.count_nonzero(s > eps_rel * s[0]))
    p = s[s > 0] / s.sum()
    return count, float(np.exp(-np.sum(p * np.log(p))))


def participation_ratio(sigma: np.ndarray) -> float:
    """(Σσ)² / Σσ²; 0 for an all-zero spectrum."""
    s = np.clip(np.asarray(sigma, dtype=np.float64), 0.0, None)
    denom = float(np.sum(s * s))
    return float(np.sum(s)) ** 2 / denom if denom > 0 else 0.0


def log_spectrum(sigma: np.ndarray) -> np.ndarray:
    return np.log10(np.clip(sigma, 0.0, None) + LOG_FLOOR)


@dataclass(frozen=True)
class SpectrumReport:
    """Covariances of representations and embeddings with their spectra."""
    c_r: np.ndarray
    c_z: np.ndarray
    sigma_r: np.ndarray
    sigma_z: np.ndarray

    @property
    def rank_r(self) -> tuple[int, float]:
        return effective_rank(self.sigma_r)

    @property
    def rank_z(self) -> tuple[int, float]:
        return effective_rank(self.sigma_z)

    @property
    def log10_sigma_r(self) -> np.ndarray:
        return log_spectrum(self.sigma_r)

    @property
    def log10_sigma_z(self) -> np.ndarray:
        return log_spectrum(self.sigma_z)

    def summary(self) -> dict[str, Any]:
        count_r, erank_r = self.rank_r
        count_z, erank_z = self.rank_z
        return {
            "rank_r": count_r,
            "erank_r": erank_r,
            "pr_r": participation_ratio(self.sigma_r),
            "rank_z": count_z,
            "erank_z": erank_z,
            "pr_z": participation_ratio(self.sigma_z),
        }


def spectrum_report(r: Tensor | np.ndarray, z: Tensor | np.ndarray) -> SpectrumReport:
    """Covariance spectra of representations ``r`` and embeddings ``z``."""
    c_r = covariance(r)
    c_z = covariance(z)
    sigma_r, _ = symmetric_evd(c_r)
    sigma_z, _ = symmetric_evd(c_z)
    return SpectrumReport(c_r=c_r, c_z=c_z, sigma_r=sigma_r, sigma_z=sigma_z)


def write_spectrum_csv(report: SpectrumReport, path: str | Path) -> None:
    """One row per eigenvalue index; the shorter spectrum is padded with empty fields."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    rows = max(len(report.sigma_r), len(report.sigma_z))
    log_r, log_z = report.log10_sigma_r, report.log10_sigma_z

    def cells(values: np.ndarray, logs: np.ndarray, i: int) -> list[str]:
        return [repr(float(values[i])), repr(float(logs[i]))] if i < len(values) else ["", ""]

    with open(path, "w", newline="", encoding="utf-8") as f:
        writer = csv.writer(f, lineterminator="\n")
        writer.writerow(CSV_HEADER)
        for i in range(rows):
            writer.writerow([str(i), *cells(report.sigma_r, log_r, i), *cells(report.sigma_z, log_z, i)])
    logger.info(f"Wrote spectrum CSV {path} ({rows} rows)")
