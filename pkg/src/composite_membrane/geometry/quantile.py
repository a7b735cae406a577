"""
Measure-constrained sublevel sets (the "bathtub" projection).
"""

import logging
from typing import Tuple

import numpy as np

from ..exceptions import InvalidInputError
from .domain import DomainMask
from .fields import ScalarField

logger = logging.getLogger(__name__)


def quantile_weights(values: np.ndarray, weights: np.ndarray, A: float) -> Tuple[float, np.ndarray]:
    """
    Fill measure ``A`` with the lowest values first.

    Ties are broken by position in the flattened (row-major) order; the last
    admitted cell may be admitted fractionally so the admitted measure equals
    ``A``. Returns the cut level and the admitted weight per entry.
    """
    flat_values = np.asarray(values, dtype=float).ravel()
    flat_weights = np.asarray(weights, dtype=float).ravel()
    candidates = np.flatnonzero(flat_weights > 0)
    if candidates.size == 0:
        raise InvalidInputError("quantile over an empty region")
    total = float(flat_weights[candidates].sum())
    slack = 1e-12 * max(total, 1.0)
    if A < -slack or A > total + slack:
        raise InvalidInputError(f"target measure A={A!r} outside [0, {total!r}]")
    A = min(max(A, 0.0), total)

    order = candidates[np.argsort(flat_values[candidates], kind="stable")]
    cumulative = np.cumsum(flat_weights[order])
    k = int(min(np.searchsorted(cumulative, A, side="left"), order.size - 1))

    admitted = np.zeros_like(flat_weights)
    admitted[order[:k]] = flat_weights[order[:k]]
    before = cumulative[k - 1] if k > 0 else 0.0
    admitted[order[k]] = min(max(A - before, 0.0), flat_weights[order[k]])
    level = float(flat_values[order[k]])
    return level, admitted.reshape(np.shape(weights))


def weighted_quantile(u: ScalarField, mask: DomainMask, A: float) -> Tuple[float, DomainMask]:
    """
    Sublevel set of ``u`` with measure ``A`` inside ``mask``.

    Returns ``(c, D)`` with ``D = {u < c}`` plus a deterministic part of
    ``{u = c}``; ``measure(D) == A`` up to rounding.
    """
    c, admitted = quantile_weights(u.values, mask.weights, A)
    D = DomainMask(mask.grid, admitted > 0, admitted)
    logger.debug("Quantile at A=%.6g: c=%.10g, |D|=%.6g", A, c, D.measure)
    return c, D
