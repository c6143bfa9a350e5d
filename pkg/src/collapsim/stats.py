"""Goodness-of-fit and interval helpers used by the experiment reports."""
from __future__ import annotations

import warnings

import numpy as np
from scipy import stats
from statsmodels.stats.proportion import proportion_confint


class SmallExpectedCountWarning(UserWarning):
    pass


def wilson_interval(successes: int, trials: int, confidence: float = 0.95):
    if trials < 1 or not 0 <= successes <= trials:
        raise ValueError(f"need 0 <= successes <= trials, trials >= 1; "
                         f"got {successes}/{trials}")
    if not 0 < confidence < 1:
        raise ValueError("confidence must lie in (0, 1)")
    low, high = proportion_confint(successes, trials, alpha=1 - confidence,
                                   method="wilson")
    # statsmodels can land a few ulps off the exact endpoints
    low = 0.0 if successes == 0 else float(low)
    high = 1.0 if successes == trials else float(high)
    return low, high


def chi_square_test(observed, expected_probs):
    """Pearson goodness-of-fit against ``expected_probs``; returns (stat, p)."""
    obs = np.asarray(observed, dtype=float)
    probs = np.asarray(expected_probs, dtype=float)
    if obs.ndim != 1 or obs.shape != probs.shape or obs.size < 2:
        raise ValueError("need >= 2 matching categories")
    if np.any(probs < 0) or not np.isclose(probs.sum(), 1.0):
        raise ValueError("expected probabilities must be >= 0 and sum to 1")
    expected = probs * obs.sum()
    if np.any(expected < 5):
        warnings.warn("expected count below 5; chi-square approximation is poor",
                      SmallExpectedCountWarning, stacklevel=2)
    res = stats.chisquare(obs, expected)
    return float(res.statistic), float(res.pvalue)
