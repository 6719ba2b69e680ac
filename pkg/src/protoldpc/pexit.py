"""Protograph EXIT analysis: per-edge mutual-information tracking.

The update equations follow the multiplicity convention of the basematrix:
an entry b counts b parallel edges, and the edge's own variable (check) node
contributes b - 1 self-copies to the incoming sum. Since the self term
appears with weight b - 1 and the full column (row) sum has weight b, every
update reduces to "column/row total minus one copy of self", which keeps the
sweep O(e*f) regardless of multiplicities.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numba
import numpy as np

from . import infotheory
from .errors import BracketError, NumericError, ParameterError
from .protograph import Basematrix
from .surrogate import SurrogateSet

_RESOLUTION_DB = 0.01


@dataclass(frozen=True)
class PexitState:
    """Final message state of one analysis run (entries for b=0 stay 0)."""

    i_vc: np.ndarray
    i_cv: np.ndarray
    i_app: np.ndarray
    iteration: int


@dataclass(frozen=True)
class PexitResult:
    converged: bool
    iterations: int
    app_history: np.ndarray  # min_k I_APP_k after each iteration
    state: PexitState


@numba.njit(cache=True, nogil=True)
def _pexit_kernel(b, sigma_col, max_iter, eps, jsig, jval, jinv_val, jinv_sig):
    e, f = b.shape
    i_vc = np.zeros((e, f))
    i_cv = np.zeros((e, f))
    i_app = np.zeros(f)
    hist = np.empty(max_iter)
    status = 0
    iters = max_iter
    for it in range(max_iter):
        # variable to check: column totals minus one self copy, plus channel
        for k in range(f):
            tot = sigma_col[k] * sigma_col[k]
            for l in range(e):
                if b[l, k] > 0:
                    x = np.interp(i_cv[l, k], jinv_val, jinv_sig)
                    tot += b[l, k] * x * x
            for l in range(e):
                if b[l, k] > 0:
                    x = np.interp(i_cv[l, k], jinv_val, jinv_sig)
                    arg = tot - x * x
                    if arg < 0.0:
                        arg = 0.0
                    i_vc[l, k] = np.interp(math.sqrt(arg), jsig, jval)
        # check to variable: row totals of the complementary information
        for l in range(e):
            tot = 0.0
            for k in range(f):
                if b[l, k] > 0:
                    x = np.interp(1.0 - i_vc[l, k], jinv_val, jinv_sig)
                    tot += b[l, k] * x * x
            for k in range(f):
                if b[l, k] > 0:
                    x = np.interp(1.0 - i_vc[l, k], jinv_val, jinv_sig)
                    arg = tot - x * x
                    if arg < 0.0:
                        arg = 0.0
                    i_cv[l, k] = 1.0 - np.interp(math.sqrt(arg), jsig, jval)
        # a-posteriori information per variable node
        min_app = 1.0
        for k in range(f):
            tot = sigma_col[k] * sigma_col[k]
            for l in range(e):
                if b[l, k] > 0:
                    x = np.interp(i_cv[l, k], jinv_val, jinv_sig)
                    tot += b[l, k] * x * x
            i_app[k] = np.interp(math.sqrt(tot), jsig, jval)
            if i_app[k] < min_app:
                min_app = i_app[k]
        hist[it] = min_app
        if math.isnan(min_app):
            status = -1
            iters = it + 1
            break
        if min_app >= 1.0 - eps:
            status = 1
            iters = it + 1
            break
    return status, iters, hist, i_vc, i_cv, i_app


def _sigma_columns(a: Basematrix, s: SurrogateSet) -> np.ndarray:
    levels = np.asarray(a.bit_map)
    if levels.max() > s.m:
        raise ParameterError(
            f"bit map uses level {levels.max()} but the surrogate set has {s.m} levels"
        )
    return np.asarray(s.sigma_ch, dtype=float)[levels - 1]


def pexit_run(
    a: Basematrix, s: SurrogateSet, max_iter: int = 2000, eps: float = 1e-7
) -> PexitResult:
    """Run the full analysis and keep the per-iteration progress trace."""
    if max_iter < 1:
        raise ParameterError(f"max_iter must be >= 1, got {max_iter!r}")
    if not 0.0 < eps < 1.0:
        raise ParameterError(f"eps must lie in (0, 1), got {eps!r}")
    tab = infotheory.j_tables()
    status, iters, hist, i_vc, i_cv, i_app = _pexit_kernel(
        np.asarray(a.entries, dtype=np.int64),
        _sigma_columns(a, s),
        int(max_iter),
        float(eps),
        tab.sigma,
        tab.value,
        tab.inv_value,
        tab.inv_sigma,
    )
    if status < 0:
        bad = np.argwhere(~np.isfinite(i_vc) | ~np.isfinite(i_cv))
        where = tuple(bad[0]) if len(bad) else ("?", "?")
        raise NumericError(
            f"non-finite extrinsic information at pair {where}, iteration {iters}"
        )
    return PexitResult(
        converged=status == 1,
        iterations=iters,
        app_history=hist[:iters].copy(),
        state=PexitState(i_vc=i_vc, i_cv=i_cv, i_app=i_app, iteration=iters),
    )


def pexit_converges(
    a: Basematrix, s: SurrogateSet, max_iter: int = 2000, eps: float = 1e-7
) -> tuple[bool, int]:
    """Whether min_k I_APP_k reaches 1 - eps, and after how many iterations."""
    res = pexit_run(a, s, max_iter=max_iter, eps=eps)
    return res.converged, res.iterations


def threshold(
    a: Basematrix,
    channel_family,
    lo: float,
    hi: float,
    max_iter: int = 2000,
    eps: float = 1e-7,
) -> float:
    """Iterative convergence threshold in dB, bisected to 0.01 dB.

    ``channel_family`` maps snr_db to a SurrogateSet. The bracket must
    straddle the threshold: no convergence at ``lo``, convergence at ``hi``.
    Probes run on the 0.01 dB lattice so family caches are shared across
    calls; the returned value is the final bracket midpoint.
    """
    lo_c = math.floor(lo * 100.0)
    hi_c = math.ceil(hi * 100.0)
    if lo_c >= hi_c:
        raise ParameterError(f"need lo < hi, got [{lo!r}, {hi!r}]")

    def probe(centi: int) -> bool:
        return pexit_converges(a, channel_family(centi / 100.0), max_iter, eps)[0]

    if probe(lo_c):
        raise BracketError(
            f"analysis already converges at {lo_c / 100.0} dB; widen the bracket downward"
        )
    if not probe(hi_c):
        raise BracketError(
            f"analysis does not converge at {hi_c / 100.0} dB; widen the bracket upward"
        )
    while hi_c - lo_c > 1:
        mid = (lo_c + hi_c) // 2
        if probe(mid):
            hi_c = mid
        else:
            lo_c = mid
    return (lo_c + hi_c) / 200.0
