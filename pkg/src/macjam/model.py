"""Domain types and closed-form building blocks for jamming a training-based MAC.

All powers are linear and normalized to unit noise variance; dB appears only at
the configuration boundary (see :mod:`macjam.scenario`).  Each user's Rayleigh
channel has unit variance and is estimated by LMMSE from that user's
non-overlapping pilot symbols, so the estimate quality depends only on the
effective pilot SNR after jamming.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

__all__ = [
    "UserParams",
    "SystemConfig",
    "JammerBudget",
    "JammerAllocation",
    "EstimationQuality",
    "phase_jam_powers",
    "lmmse_quality",
    "alpha_beta_gamma",
    "objective_rho",
    "rho_from_estimation",
    "rho_value",
]

# Allocation vectors must sum to 1 within this tolerance before renormalization.
ALLOC_SUM_TOL = 1e-6


def _require_finite(name: str, value: float) -> float:
    value = float(value)
    if not math.isfinite(value):
        raise ValueError(f"{name} must be finite, got {value!r}")
    return value


def _require_int(name: str, value) -> int:
    if isinstance(value, bool) or not isinstance(value, (int, np.integer)):
        raise ValueError(f"{name} must be an integer, got {value!r}")
    return int(value)


@dataclass(frozen=True)
class UserParams:
    """Per-user transmit parameters: pilot power, data power, pilot length.

    ``train_power * train_len`` is the user's pilot energy; it must be positive,
    otherwise the user has no channel estimate and contributes pure
    interference, a regime this model does not cover.  ``data_power`` may be
    zero (a silent user).
    """

    train_power: float
    data_power: float
    train_len: int

    def __post_init__(self):
        p_t = _require_finite("train_power", self.train_power)
        p_d = _require_finite("data_power", self.data_power)
        t_t = _require_int("train_len", self.train_len)
        if p_t <= 0.0:
            raise ValueError(f"train_power must be > 0, got {p_t}")
        if p_d < 0.0:
            raise ValueError(f"data_power must be >= 0, got {p_d}")
        if t_t < 1:
            raise ValueError(f"train_len must be >= 1, got {t_t}")
        object.__setattr__(self, "train_power", p_t)
        object.__setattr__(self, "data_power", p_d)
        object.__setattr__(self, "train_len", t_t)


@dataclass(frozen=True)
class SystemConfig:
    """Block structure of the legitimate system: block length and user list.

    The block of ``block_len`` symbols starts with the users' non-overlapping
    training windows (``total_train_len`` symbols in total) and ends with the
    shared data phase of ``data_len`` symbols.
    """

    block_len: int
    users: tuple[UserParams, ...]

    def __post_init__(self):
        t = _require_int("block_len", self.block_len)
        users = tuple(self.users)
        if len(users) < 1:
            raise ValueError("users must contain at least one user")
        for u in users:
            if not isinstance(u, UserParams):
                raise ValueError(f"users entries must be UserParams, got {type(u).__name__}")
        t_t = sum(u.train_len for u in users)
        if t_t >= t:
            raise ValueError(
                f"total training length {t_t} must be smaller than block_len {t}"
            )
        object.__setattr__(self, "block_len", t)
        object.__setattr__(self, "users", users)

    @property
    def n_users(self) -> int:
        return len(self.users)

    @property
    def total_train_len(self) -> int:
        return sum(u.train_len for u in self.users)

    @property
    def data_len(self) -> int:
        return self.block_len - self.total_train_len

    def train_power_vec(self) -> np.ndarray:
        return np.array([u.train_power for u in self.users], dtype=float)

    def data_power_vec(self) -> np.ndarray:
        return np.array([u.data_power for u in self.users], dtype=float)

    def train_len_vec(self) -> np.ndarray:
        return np.array([u.train_len for u in self.users], dtype=float)


@dataclass(frozen=True)
class JammerBudget:
    """Average jamming power over the whole block (linear, unit-noise scale)."""

    avg_power: float

    def __post_init__(self):
        p = _require_finite("avg_power", self.avg_power)
        if p < 0.0:
            raise ValueError(f"avg_power must be >= 0, got {p}")
        object.__setattr__(self, "avg_power", p)


@dataclass(frozen=True)
class JammerAllocation:
    """Energy-ratio split: one ratio per user's training window plus one for data.

    Construction renormalizes the nonnegative input to sum exactly to one, but
    rejects inputs whose sum is off by more than ``ALLOC_SUM_TOL`` so caller
    bugs are not silently masked.
    """

    zeta_t: tuple[float, ...]
    zeta_d: float

    def __post_init__(self):
        zt = [float(z) for z in self.zeta_t]
        zd = float(self.zeta_d)
        vals = zt + [zd]
        if len(zt) < 1:
            raise ValueError("zeta_t must contain at least one entry")
        for i, z in enumerate(vals):
            if not math.isfinite(z) or z < 0.0:
                name = "zeta_d" if i == len(zt) else f"zeta_t[{i}]"
                raise ValueError(f"{name} must be finite and >= 0, got {z!r}")
        total = math.fsum(vals)
        if abs(total - 1.0) > ALLOC_SUM_TOL:
            raise ValueError(
                f"allocation ratios must sum to 1 (got {total!r}, tolerance {ALLOC_SUM_TOL})"
            )
        vals = [z / total for z in vals]
        # Pin the largest coordinate so the renormalized sum is exactly 1.0.
        top = max(range(len(vals)), key=lambda i: vals[i])
        for _ in range(3):
            excess = math.fsum(vals) - 1.0
            if excess == 0.0:
                break
            vals[top] -= excess
        object.__setattr__(self, "zeta_t", tuple(vals[:-1]))
        object.__setattr__(self, "zeta_d", vals[-1])

    @property
    def n_users(self) -> int:
        return len(self.zeta_t)

    def zeta_t_vec(self) -> np.ndarray:
        return np.array(self.zeta_t, dtype=float)

    def as_vector(self) -> np.ndarray:
        """All ratios as one vector, training entries first, data entry last."""
        return np.array(self.zeta_t + (self.zeta_d,), dtype=float)


@dataclass(frozen=True)
class EstimationQuality:
    """Variance split of a unit-variance channel into estimate and error parts."""

    est_var: float
    err_var: float

    def __post_init__(self):
        est = _require_finite("est_var", self.est_var)
        err = _require_finite("err_var", self.err_var)
        if not (0.0 <= est < 1.0):
            raise ValueError(f"est_var must lie in [0, 1), got {est}")
        if not (0.0 < err <= 1.0):
            raise ValueError(f"err_var must lie in (0, 1], got {err}")
        if abs(est + err - 1.0) > 1e-12:
            raise ValueError(f"est_var + err_var must equal 1, got {est + err!r}")
        object.__setattr__(self, "est_var", est)
        object.__setattr__(self, "err_var", err)


def phase_jam_powers(
    alloc: JammerAllocation, cfg: SystemConfig, budget: JammerBudget
) -> tuple[np.ndarray, float]:
    """Per-phase jamming powers induced by an energy-ratio allocation.

    Returns ``(train_jam_powers, data_jam_power)`` where user k's training
    window is jammed with power ``zeta_t[k] * P_w * T / T_t_k`` and the data
    phase with ``zeta_d * P_w * T / T_d``.  The phase energies always add back
    up to the total budget energy ``P_w * T``.
    """
    if alloc.n_users != cfg.n_users:
        raise ValueError(
            f"allocation has {alloc.n_users} training ratios but config has {cfg.n_users} users"
        )
    t_d = cfg.data_len
    if t_d <= 0:
        raise ValueError("config has no data phase")
    energy = budget.avg_power * cfg.block_len
    p_wt = alloc.zeta_t_vec() * energy / cfg.train_len_vec()
    p_wd = alloc.zeta_d * energy / t_d
    return p_wt, p_wd


def lmmse_quality(user: UserParams, train_jam_power: float) -> EstimationQuality:
    """LMMSE estimate/error variances for a pilot observed under jamming.

    With effective pilot SNR ``s = train_power / (1 + train_jam_power) *
    train_len`` the estimate variance is ``s / (1 + s)`` and the error variance
    ``1 / (1 + s)``.
    """
    jam = _require_finite("train_jam_power", train_jam_power)
    if jam < 0.0:
        raise ValueError(f"train_jam_power must be >= 0, got {jam}")
    s = user.train_power / (1.0 + jam) * user.train_len
    return EstimationQuality(est_var=s / (1.0 + s), err_var=1.0 / (1.0 + s))


def alpha_beta_gamma(
    alloc: JammerAllocation, cfg: SystemConfig, budget: JammerBudget
) -> tuple[np.ndarray, np.ndarray, float]:
    """Constituents of the jammer's objective, straight from the ratio form.

    For each user, with ``q_k = 1 + zeta_t_k * P_w * T / T_t_k``,

        alpha_k = (P_d_k P_t_k T_t_k / q_k) / (1 + P_t_k T_t_k / q_k)
        beta_k  = P_d_k / (1 + P_t_k T_t_k / q_k)

    and ``gamma = 1 / (1 + zeta_d * P_w * T / T_d)``.  ``alpha_k`` falls and
    ``beta_k`` rises as the training jamming share grows.
    """
    if alloc.n_users != cfg.n_users:
        raise ValueError(
            f"allocation has {alloc.n_users} training ratios but config has {cfg.n_users} users"
        )
    p_t = cfg.train_power_vec()
    p_d = cfg.data_power_vec()
    t_t = cfg.train_len_vec()
    energy = budget.avg_power * cfg.block_len
    q = 1.0 + alloc.zeta_t_vec() * energy / t_t
    alphas = (p_d * p_t * t_t / q) / (1.0 + p_t * t_t / q)
    betas = p_d / (1.0 + p_t * t_t / q)
    gamma = 1.0 / (1.0 + alloc.zeta_d * energy / cfg.data_len)
    return alphas, betas, gamma


def objective_rho(
    alloc: JammerAllocation, cfg: SystemConfig, budget: JammerBudget
) -> float:
    """Effective-SINR scalar the jammer minimizes; both rate bounds increase in it."""
    alphas, betas, gamma = alpha_beta_gamma(alloc, cfg, budget)
    return float(gamma * alphas.sum() / (1.0 + gamma * betas.sum()))


def rho_from_estimation(
    alloc: JammerAllocation, cfg: SystemConfig, budget: JammerBudget
) -> float:
    """Same scalar as :func:`objective_rho`, via the estimation-variance route.

    Composes :func:`phase_jam_powers` and :func:`lmmse_quality` and assembles
    the post-detection SINR from the variance split.  Kept as a deliberately
    independent code path; the algebraic identity with :func:`objective_rho`
    is enforced by tests.
    """
    p_wt, p_wd = phase_jam_powers(alloc, cfg, budget)
    p_d_eff = cfg.data_power_vec() / (1.0 + p_wd)
    num = 0.0
    den = 1.0
    for k, user in enumerate(cfg.users):
        quality = lmmse_quality(user, float(p_wt[k]))
        num += p_d_eff[k] * quality.est_var
        den += p_d_eff[k] * quality.err_var
    return num / den


def rho_value(
    zeta_t, zeta_d, cfg: SystemConfig, budget: JammerBudget
) -> np.ndarray:
    """Vectorized objective over raw ratio arrays (no allocation validation).

    ``zeta_t`` has shape ``(..., K)`` and ``zeta_d`` shape ``(...)``; the two
    broadcast together.  Used by the optimizer for grids and line searches.
    """
    zt = np.asarray(zeta_t, dtype=float)
    zd = np.asarray(zeta_d, dtype=float)
    p_t = cfg.train_power_vec()
    p_d = cfg.data_power_vec()
    t_t = cfg.train_len_vec()
    energy = budget.avg_power * cfg.block_len
    q = 1.0 + zt * energy / t_t
    s = p_t * t_t / q
    num = (p_d * s / (1.0 + s)).sum(axis=-1)
    den = (p_d / (1.0 + s)).sum(axis=-1)
    gamma = 1.0 / (1.0 + zd * energy / cfg.data_len)
    return gamma * num / (1.0 + gamma * den)
