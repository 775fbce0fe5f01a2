"""Spectral initialization: the weighted second-moment matrix and projected
power iterations.

The matrix V = (1/m) sum_i y_i (a_i a_i^T - I) has expectation nu * x x^T, so
power iterations interleaved with projection onto the prior's range recover
the signal direction.  The starting vector is the column of the shifted
matrix (1/m) sum_i y_i a_i a_i^T with the largest diagonal entry.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigurationError
from .links import MeasurementSet
from .priors import GenerativePrior, ProjectionConfig, project


@dataclass
class SpectralMatrix:
    v: np.ndarray             # n x n, exactly symmetric
    m_used: int
    diag_shifted: np.ndarray  # diagonal of (1/m) sum_i y_i a_i a_i^T
    ybar: float


@dataclass
class PowerState:
    iterate: np.ndarray
    t: int
    correlation: float | None = None
    error: float | None = None


def build_spectral_matrix(data: MeasurementSet) -> SpectralMatrix:
    a = data.sensing
    y = data.observations
    m = data.m
    shifted = a.T @ (a * y[:, None]) / m
    # Exact symmetry by construction: mirror the upper triangle.
    shifted = np.triu(shifted) + np.triu(shifted, 1).T
    ybar = float(y.mean())
    v = shifted - ybar * np.eye(data.n)
    return SpectralMatrix(v=v, m_used=m, diag_shifted=np.diag(shifted).copy(), ybar=ybar)


def shifted_matrix(spec: SpectralMatrix) -> np.ndarray:
    """(1/m) sum_i y_i a_i a_i^T, i.e. V + ybar * I."""
    return spec.v + spec.ybar * np.eye(spec.v.shape[0])


def initial_vector(spec: SpectralMatrix, shifted_full: np.ndarray) -> np.ndarray:
    """Column of the shifted matrix at the largest diagonal entry, normalized.

    Ties break to the lowest index (argmax convention); an all-zero column
    falls back to e_1.
    """
    j = int(np.argmax(spec.diag_shifted))
    col = np.array(shifted_full[:, j], dtype=float)
    nc = np.linalg.norm(col)
    if nc == 0:
        col = np.zeros(shifted_full.shape[0])
        col[0] = 1.0
        return col
    return col / nc


def projected_power(spec: SpectralMatrix, prior: GenerativePrior, w0, t1: int,
                    proj_cfg: ProjectionConfig | None = None, seed=0,
                    truth=None) -> list[PowerState]:
    """Run t1 projected power iterations w <- P_G(V w) from w0 (normalized,
    not pre-projected).  Returns the trajectory including the initial state.
    Correlation and error are recorded when the ground truth is supplied."""
    if t1 < 1:
        raise ConfigurationError("t1 must be >= 1")
    w = np.asarray(w0, dtype=float)
    w = w / np.linalg.norm(w)
    states = [_power_state(w, 0, truth)]
    warm = None
    for t in range(1, t1 + 1):
        res = project(prior, spec.v @ w, proj_cfg, seed=[_as_int(seed), t], warm_start=warm)
        if proj_cfg is not None and proj_cfg.latent_init == "warm-start":
            warm = res.latent
        w = res.point
        states.append(_power_state(w, t, truth))
    return states


def _power_state(w, t, truth):
    if truth is None:
        return PowerState(iterate=w, t=t)
    return PowerState(iterate=w, t=t, correlation=float(truth @ w),
                      error=float(np.linalg.norm(w - truth)))


def _as_int(seed):
    if isinstance(seed, (int, np.integer)):
        return int(seed)
    return int(np.random.SeedSequence(list(seed)).generate_state(1)[0])
