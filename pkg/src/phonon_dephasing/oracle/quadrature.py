"""Panel-adaptive Gauss-Legendre quadrature for oscillatory integrands.

The caller supplies panel edges sized to the local oscillation period; each
panel is integrated with a 24-point rule and checked against a 20-point rule.
Panels whose discrepancy is too large are bisected. Per-panel results are
combined with ``math.fsum`` in panel order, so the total does not depend on
how panels were distributed over worker threads.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from scipy.special import roots_legendre

_EPS = np.finfo(float).eps
_HIGH, _LOW = 24, 20
# elements per vectorised evaluation chunk
_CHUNK_ELEMENTS = 1_500_000
_ROUNDOFF_FACTOR = 1000


class QuadratureError(RuntimeError):
    """Adaptive refinement exhausted its panel budget."""

    def __init__(self, message, value=None, error=None):
        super().__init__(message)
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureConfig:
    """Tolerances and truncation policy for the oracle integrals.

    ``cutoff_ratio`` sets the truncation of semi-infinite wave-number
    integrals: the domain ends where the integrand envelope falls below this
    fraction of its peak.
    """

    rel_tol: float = 1e-9
    abs_tol: float = 0.0
    max_subdivisions: int = 400_000
    cutoff_ratio: float = 1e-16
    workers: int = 1

    def __post_init__(self):
        if not self.rel_tol > 0 or self.abs_tol < 0:
            raise ValueError("rel_tol must be positive and abs_tol non-negative")
        if not 0 < self.cutoff_ratio < 1:
            raise ValueError("cutoff_ratio must lie in (0, 1)")
        if self.max_subdivisions < 1 or self.workers < 1:
            raise ValueError("max_subdivisions and workers must be >= 1")


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float
    panels: int = 0
    cutoff: float = math.inf


@lru_cache(maxsize=None)
def gauss_legendre(n):
    """Cached Gauss-Legendre nodes and weights on [-1, 1]."""
    nodes, weights = roots_legendre(n)
    nodes.setflags(write=False)
    weights.setflags(write=False)
    return nodes, weights


def _panel_sums(f, lo, hi, m):
    """Integrate ``f`` over each panel with both rules.

    ``f`` maps a 1-D node array to values of shape ``(m, nodes)`` (or
    ``(nodes,)`` when ``m == 1``); it may instead return ``(values, node_err)``
    where ``node_err`` bounds the absolute error of each value.
    """
    mid = 0.5 * (hi + lo)
    half = 0.5 * (hi - lo)
    out = []
    extra = 0.0
    for n in (_HIGH, _LOW):
        nodes, weights = gauss_legendre(n)
        u = (mid[:, None] + half[:, None] * nodes[None, :]).ravel()
        res = f(u)
        node_err = None
        if isinstance(res, tuple):
            res, node_err = res
        vals = np.reshape(res, (m, len(lo), n))
        w = half[:, None] * weights[None, :]
        integral = np.einsum("mpn,pn->mp", vals, w)
        magnitude = np.einsum("mpn,pn->mp", np.abs(vals), w)
        if node_err is not None and n == _HIGH:
            extra = np.einsum("mpn,pn->mp", np.reshape(node_err, (m, len(lo), n)), w)
        out.append((integral, magnitude))
    (hi_int, hi_mag), (lo_int, _) = out
    err = np.abs(hi_int - lo_int) + 50 * _EPS * hi_mag + extra
    return hi_int, err, hi_mag


def _evaluate(f, lo, hi, m, workers):
    per_chunk = max(1, _CHUNK_ELEMENTS // (m * (_HIGH + _LOW)))
    bounds = [(i, min(i + per_chunk, len(lo))) for i in range(0, len(lo), per_chunk)]

    def run(b):
        return _panel_sums(f, lo[b[0]:b[1]], hi[b[0]:b[1]], m)

    if workers > 1 and len(bounds) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts = list(pool.map(run, bounds))
    else:
        parts = [run(b) for b in bounds]
    if not parts:
        return np.zeros((m, 0)), np.zeros((m, 0)), np.zeros((m, 0))
    return tuple(np.concatenate([p[i] for p in parts], axis=1) for i in range(3))


def integrate_panels(f, edges, cfg: QuadratureConfig, m=1, tail_error=0.0, joint=False):
    """Adaptive panel integration of ``f`` over ``[edges[0], edges[-1]]``.

    Parameters
    ----------
    f : callable
        Vectorised integrand, see :func:`_panel_sums`. With ``m > 1`` it
        returns ``m`` integrands at once (one row each) sharing the nodes.
    edges : array_like
        Increasing panel boundaries.
    cfg : QuadratureConfig
    m : int
        Number of simultaneous integrands.
    tail_error : float or array_like
        Bound on the truncated remainder, added to the reported error.
    joint : bool
        Judge every row against one shared tolerance, at least ``rel_tol``
        times the largest integral of ``|f|``. Meant for rows that are parts
        of one quantity (real and imaginary parts) which may cancel to zero.

    Returns
    -------
    list of QuadResult
        One result per integrand row.
    """
    edges = np.asarray(edges, dtype=float)
    lo, hi = edges[:-1], edges[1:]
    if len(lo) > cfg.max_subdivisions:
        raise QuadratureError(
            f"panel budget {cfg.max_subdivisions} exhausted by the initial {len(lo)} panels"
        )
    values, errors, mags = _evaluate(f, lo, hi, m, cfg.workers)
    tail_error = np.broadcast_to(np.asarray(tail_error, dtype=float), (m,))

    while True:
        totals = np.array([math.fsum(row) for row in values])
        err_tot = errors.sum(axis=1) + tail_error
        # integrals cancelling towards zero cannot beat the roundoff floor
        floor = _ROUNDOFF_FACTOR * _EPS * mags.sum(axis=1)
        target = np.maximum.reduce([np.full(m, cfg.abs_tol), cfg.rel_tol * np.abs(totals), floor])
        if joint:
            target = np.full(m, max(target.max(), cfg.rel_tol * mags.sum(axis=1).max()))
        failing = err_tot > target
        if not failing.any():
            break
        if len(lo) >= cfg.max_subdivisions:
            worst = int(np.argmax(err_tot - target))
            raise QuadratureError(
                f"panel budget {cfg.max_subdivisions} exhausted; achieved error "
                f"{err_tot[worst]:.3g} vs target {target[worst]:.3g}",
                value=float(totals[worst]),
                error=float(err_tot[worst]),
            )
        hopeless = failing & (tail_error > target)
        if hopeless.any():
            worst = int(np.argmax(np.where(hopeless, err_tot - target, -np.inf)))
            raise QuadratureError(
                f"truncation remainder {tail_error[worst]:.3g} exceeds target "
                f"{target[worst]:.3g}; lower cutoff_ratio",
                value=float(totals[worst]),
                error=float(err_tot[worst]),
            )
        # refine panels carrying more than their share of the remaining budget
        share = ((target - tail_error) / len(lo))[:, None]
        split = np.any((errors > share) & failing[:, None], axis=0)
        if not split.any():
            split = np.zeros(len(lo), dtype=bool)
            split[int(np.argmax(errors[failing].max(axis=0)))] = True
        mid = 0.5 * (lo[split] + hi[split])
        new_lo = np.concatenate([lo[split], mid])
        new_hi = np.concatenate([mid, hi[split]])
        new_vals, new_errs, new_mags = _evaluate(f, new_lo, new_hi, m, cfg.workers)
        keep = ~split
        lo = np.concatenate([lo[keep], new_lo])
        hi = np.concatenate([hi[keep], new_hi])
        values = np.concatenate([values[:, keep], new_vals], axis=1)
        errors = np.concatenate([errors[:, keep], new_errs], axis=1)
        mags = np.concatenate([mags[:, keep], new_mags], axis=1)
        order = np.argsort(lo, kind="stable")
        lo, hi = lo[order], hi[order]
        values, errors, mags = values[:, order], errors[:, order], mags[:, order]

    return [
        QuadResult(float(totals[i]), float(err_tot[i]), panels=len(lo), cutoff=float(edges[-1]))
        for i in range(m)
    ]


def oscillation_edges(upper, omega, scale):
    """Panel boundaries on ``[0, upper]``.

    Panels are no wider than two periods ``4*pi/omega`` of the fastest
    oscillation, which both rules resolve to roundoff, and no wider than
    half the local envelope scale ``scale + u``, where ``scale`` is the smallest structural length of the
    envelope near the origin.
    """
    limit = 4 * math.pi / omega if omega > 0 else math.inf
    edges = [0.0]
    u = 0.0
    while u < upper:
        width = 0.5 * (scale + u)
        if width >= limit:
            break
        u = min(upper, u + width)
        edges.append(u)
    if u < upper:
        n = int(math.ceil((upper - u) / limit))
        edges.extend(np.linspace(u, upper, n + 1)[1:].tolist())
    return np.asarray(edges)
