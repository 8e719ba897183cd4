# SPDX-License-Identifier: Apache-2.0
# SPDX-FileCopyrightText: 2026 The kreinsum Authors

"""Gauss-Legendre quadrature rules on intervals and half-lines."""

from __future__ import annotations

import logging
from functools import lru_cache
from typing import Callable

import numpy as np
from numpy.polynomial.legendre import leggauss
from numpy.typing import ArrayLike, NDArray

logger = logging.getLogger(__name__)

Rule = tuple[NDArray[np.float64], NDArray[np.float64]]


@lru_cache(maxsize=64)
def _reference_rule(order: int) -> Rule:
    nodes, weights = leggauss(order)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def gauss_legendre(a: float, b: float, order: int) -> Rule:
    """Gauss-Legendre nodes and weights on ``[a, b]``."""
    t, w = _reference_rule(order)
    half = 0.5 * (b - a)
    return 0.5 * (a + b) + half * t, half * w


def composite_gauss_legendre(breaks: ArrayLike, order: int) -> Rule:
    """Gauss-Legendre rule of the given order on every panel between consecutive breaks."""
    breaks = np.unique(np.asarray(breaks, dtype=float))
    if breaks.size < 2:
        return np.empty(0), np.empty(0)
    t, w = _reference_rule(order)
    mid = 0.5 * (breaks[1:] + breaks[:-1])
    half = 0.5 * (breaks[1:] - breaks[:-1])
    nodes = (mid[:, None] + half[:, None] * t[None, :]).ravel()
    weights = (half[:, None] * w[None, :]).ravel()
    return nodes, weights


def panel_breaks(lo: float, hi: float, width: float, extra: ArrayLike | None = None) -> NDArray[np.float64]:
    """Uniform panel breaks of at most ``width`` on ``[lo, hi]``, merged with extra points."""
    count = max(1, int(np.ceil((hi - lo) / width)))
    breaks = np.linspace(lo, hi, count + 1)
    if extra is not None:
        extra = np.asarray(extra, dtype=float)
        breaks = np.concatenate([breaks, extra[(extra > lo) & (extra < hi)]])
    return np.unique(breaks)


def half_line_rule(
    a: float,
    rate: float,
    direction: int = 1,
    order: int = 16,
    panels: int = 24,
    spread: float = 2.0,
) -> Rule:
    """Rule for integrands decaying like ``exp(-rate * |x - a|)`` on a half-line.

    Panels of width ``spread / rate`` cover the bulk; the remainder is mapped to
    ``(0, t_max]`` by ``t = exp(-rate * |x - a|)`` and integrated with Gauss-Legendre.
    ``direction`` is +1 for ``[a, inf)`` and -1 for ``(-inf, a]``.
    """
    if rate <= 0:
        raise ValueError(f"decay rate must be positive, got {rate}")
    span = panels * spread / rate
    bulk_x, bulk_w = composite_gauss_legendre(np.linspace(0.0, span, panels + 1), order)
    t_max = np.exp(-rate * span)
    t, tw = gauss_legendre(0.0, t_max, order)
    tail_x = -np.log(t) / rate
    tail_w = tw / (rate * t)
    offsets = np.concatenate([bulk_x, tail_x])
    weights = np.concatenate([bulk_w, tail_w])
    return a + direction * offsets, weights


def integrate(func: Callable[[NDArray[np.float64]], ArrayLike], rule: Rule) -> complex:
    """Apply a rule to a vectorized integrand."""
    nodes, weights = rule
    return complex(np.sum(weights * np.asarray(func(nodes))))
