"""Least-squares decay fits: ``C_N ~ N^-a`` against ``C_N ~ (log N)^-b``."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ..errors import ConfigError

POWER_LAW = "PowerLaw"
LOG_POWER = "LogPower"
MODELS = (POWER_LAW, LOG_POWER)


@dataclass(frozen=True)
class DecayFit:
    model: str
    exponent: float
    intercept: float
    residual: float       # RMS of the log-residuals


def fit_decay(N, C, model: str = POWER_LAW) -> DecayFit:
    """Fit ``log C`` linearly in ``log N`` (PowerLaw) or ``log log N`` (LogPower).

    The exponent is the negated slope, so a decaying series has a positive one.
    Zero values carry no information on a log scale and are dropped.
    """
    if model not in MODELS:
        raise ConfigError(f"unknown model {model!r}")
    N = np.asarray(N, dtype=float)
    C = np.asarray(C, dtype=float)
    keep = (C > 0) & (N > math.e)
    if keep.sum() < 2:
        raise ConfigError("need at least two positive points with N > e")
    x = np.log(N[keep])
    if model == LOG_POWER:
        x = np.log(x)
    y = np.log(C[keep])
    slope, icpt = np.polyfit(x, y, 1)
    res = y - (slope * x + icpt)
    return DecayFit(model, float(-slope), float(icpt), float(np.sqrt(np.mean(res ** 2))))


def compare_models(N, C) -> dict:
    """Both fits plus the model with the smaller residual."""
    fits = {m: fit_decay(N, C, m) for m in MODELS}
    best = min(MODELS, key=lambda m: fits[m].residual)
    return {"fits": fits, "preferred": best}


def decay_rate(N, C) -> float:
    """Power-law exponent, the common yardstick when comparing two series."""
    return fit_decay(N, C, POWER_LAW).exponent
