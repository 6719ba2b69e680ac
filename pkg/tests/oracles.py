"""Independent reference implementations used to cross-check the package.

Every function here recomputes a library quantity through a different
numerical route (trapezoid grids instead of Gauss-Hermite quadrature,
scipy.integrate.quad instead of lookup tables, dense GF(2) elimination
instead of packed words, exhaustive enumeration instead of evolutionary
search), so agreement between the two is evidence, not tautology.
"""

from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.integrate import quad
from scipy.special import xlogy

from protoldpc import (
    Basematrix,
    Constellation,
    bmd_rate,
    j_fun,
    j_inv,
    pexit_converges,
    shaped_constellation,
    validate,
)
from protoldpc.optimizer import parity_group_encodable

_LN2 = math.log(2.0)


def bit_entropy_trapezoid(c: Constellation, level: int, span: float = 9.0,
                          n: int = 40001) -> float:
    """H(B_level | Y) by direct trapezoid integration over the output mixture.

    The noise has unit variance, so a span of 9 sigma past the outermost
    points captures the tails to well below 1e-12.
    """
    scaled = c.scaled_points()
    y = np.linspace(scaled.min() - span, scaled.max() + span, n)
    # weights w[j, x] = P(x) N(y_j; scaled_x, 1); constant factor cancels in
    # the posterior but matters for p(y)
    w = c.prob[None, :] * np.exp(-0.5 * (y[:, None] - scaled[None, :]) ** 2)
    w /= math.sqrt(2.0 * math.pi)
    p_y = w.sum(axis=1)
    bits = c.bit_matrix[:, level - 1]
    p0 = w[:, bits == 0].sum(axis=1) / p_y
    p1 = w[:, bits == 1].sum(axis=1) / p_y
    h_bits = -(xlogy(p0, p0) + xlogy(p1, p1)) / _LN2
    return float(np.trapezoid(p_y * h_bits, y))


def symbol_mi_trapezoid(c: Constellation, span: float = 9.0,
                        n: int = 40001) -> float:
    """I(X;Y) = h(Y) - h(Y|X) by trapezoid integration; h(Y|X) is Gaussian."""
    scaled = c.scaled_points()
    y = np.linspace(scaled.min() - span, scaled.max() + span, n)
    w = c.prob[None, :] * np.exp(-0.5 * (y[:, None] - scaled[None, :]) ** 2)
    p_y = w.sum(axis=1) / math.sqrt(2.0 * math.pi)
    h_y = float(np.trapezoid(-xlogy(p_y, p_y), y)) / _LN2
    h_y_given_x = 0.5 * math.log2(2.0 * math.pi * math.e)
    return h_y - h_y_given_x


def j_quad(sigma: float) -> float:
    """J(sigma) via adaptive quadrature over the LLR density.

    The LLR of a biAWGN-consistent message is N(sigma^2/2, sigma^2);
    J = 1 - E[log2(1 + exp(-L))].
    """
    if sigma == 0.0:
        return 0.0
    mean, var = sigma * sigma / 2.0, sigma * sigma

    def integrand(l: float) -> float:
        pdf = math.exp(-((l - mean) ** 2) / (2.0 * var)) / math.sqrt(
            2.0 * math.pi * var
        )
        return pdf * np.logaddexp(0.0, -l) / _LN2

    lo, hi = mean - 40.0 * sigma, mean + 40.0 * sigma
    val, _ = quad(integrand, lo, hi, points=[mean], limit=200)
    return 1.0 - val


def shaping_scan(m: int, snr_db: float, nu_hi: float = 1.0) -> tuple[float, float]:
    """Grid-refined maximizer of the bit-metric decoding rate over nu.

    Three zoom stages of a 121-point grid resolve the optimum to about
    1e-6 in nu, ample for checking a smooth scalar maximization.
    """
    lo, hi = 0.0, nu_hi
    best_nu, best_rate = 0.0, -math.inf
    for _ in range(3):
        grid = np.linspace(lo, hi, 121)
        rates = [bmd_rate(shaped_constellation(m, snr_db, nu)).bmd_rate
                 for nu in grid]
        idx = int(np.argmax(rates))
        best_nu, best_rate = float(grid[idx]), float(rates[idx])
        step = grid[1] - grid[0]
        lo, hi = max(0.0, best_nu - step), best_nu + step
    return best_nu, best_rate


def pexit_reference(b: np.ndarray, sigma_col: np.ndarray, max_iter: int,
                    eps: float = 1e-7):
    """Dense-numpy PEXIT recursion using the exact J function and inverse.

    Mirrors the library's update order (variable-to-check with per-edge
    extrinsic removal, check-to-variable on complementary information,
    a-posteriori per column) but evaluates J through quadrature/brentq
    instead of interpolation tables.

    Returns:
        (converged, iterations, i_app) with the same stopping rule as the
        library kernel.
    """
    e, f = b.shape
    i_vc = np.zeros((e, f))
    i_cv = np.zeros((e, f))
    i_app = np.zeros(f)
    for it in range(max_iter):
        for k in range(f):
            tot = sigma_col[k] ** 2
            xs = np.zeros(e)
            for l in range(e):
                if b[l, k] > 0:
                    xs[l] = j_inv(min(i_cv[l, k], 1.0 - 1e-15))
                    tot += b[l, k] * xs[l] ** 2
            for l in range(e):
                if b[l, k] > 0:
                    i_vc[l, k] = j_fun(math.sqrt(max(tot - xs[l] ** 2, 0.0)))
        for l in range(e):
            tot = 0.0
            xs = np.zeros(f)
            for k in range(f):
                if b[l, k] > 0:
                    xs[k] = j_inv(min(1.0 - i_vc[l, k], 1.0 - 1e-15))
                    tot += b[l, k] * xs[k] ** 2
            for k in range(f):
                if b[l, k] > 0:
                    i_cv[l, k] = 1.0 - j_fun(math.sqrt(max(tot - xs[k] ** 2, 0.0)))
        for k in range(f):
            tot = sigma_col[k] ** 2
            for l in range(e):
                if b[l, k] > 0:
                    tot += b[l, k] * j_inv(min(i_cv[l, k], 1.0 - 1e-15)) ** 2
            i_app[k] = j_fun(math.sqrt(tot))
        if i_app.min() >= 1.0 - eps:
            return True, it + 1, i_app
    return False, max_iter, i_app


def bisect_threshold(a: Basematrix, family, lo_db: float, hi_db: float):
    """Centi-dB lattice bisection of the PEXIT convergence boundary.

    Reimplements the documented fitness contract: both bracket ends are
    snapped outward to the lattice, convergence at the top is required, and
    the returned value is the midpoint of the final adjacent pair (or the
    snapped floor when even that converges). Returns math.inf when the
    candidate never converges inside the bracket.
    """
    lo_c, hi_c = math.floor(lo_db * 100.0), math.ceil(hi_db * 100.0)

    def converges(centi: int) -> bool:
        return pexit_converges(a, family(centi / 100.0))[0]

    if not converges(hi_c):
        return math.inf
    if converges(lo_c):
        return lo_c / 100.0
    while hi_c - lo_c > 1:
        mid = (lo_c + hi_c) // 2
        if converges(mid):
            hi_c = mid
        else:
            lo_c = mid
    return (lo_c + hi_c) / 200.0


def brute_force_search(e: int, f: int, s_max: int, bit_map: tuple[int, ...],
                       family, lo_db: float, hi_db: float, shaped: bool = False):
    """Exhaustive minimization over all (s_max + 1)^(e*f) candidate matrices.

    Returns:
        (best_value, argmins) where argmins is the list of flat entry tuples
        attaining the best threshold. Infeasible candidates (validation
        failures, or no encodable parity group in shaped mode) score inf.
    """
    best = math.inf
    argmins: list[tuple[int, ...]] = []
    for flat in itertools.product(range(s_max + 1), repeat=e * f):
        entries = np.array(flat, dtype=np.int64).reshape(e, f)
        a = Basematrix(entries=entries, max_parallel=s_max, bit_map=bit_map)
        if not validate(a).ok:
            continue
        if shaped and not parity_group_encodable(a):
            continue
        value = bisect_threshold(a, family, lo_db, hi_db)
        if value < best - 1e-12:
            best, argmins = value, [flat]
        elif value <= best + 1e-12:
            argmins.append(flat)
    return best, argmins


def gf2_rank(dense: np.ndarray) -> int:
    """Rank over GF(2) by plain row reduction on a uint8 copy."""
    mat = (np.asarray(dense) & 1).astype(np.uint8).copy()
    rows, cols = mat.shape
    rank = 0
    for c in range(cols):
        pivots = np.flatnonzero(mat[rank:, c]) + rank
        if pivots.size == 0:
            continue
        p = pivots[0]
        mat[[rank, p]] = mat[[p, rank]]
        hit = np.flatnonzero(mat[:, c])
        hit = hit[hit != rank]
        mat[hit] ^= mat[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def gf2_solve(a: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Solve a square full-rank GF(2) system by Gauss-Jordan elimination."""
    a = (np.asarray(a) & 1).astype(np.uint8)
    n = a.shape[0]
    aug = np.concatenate([a.copy(), (np.asarray(rhs) & 1).astype(np.uint8)[:, None]],
                         axis=1)
    for c in range(n):
        pivots = np.flatnonzero(aug[c:, c]) + c
        if pivots.size == 0:
            raise ValueError("singular system")
        p = pivots[0]
        aug[[c, p]] = aug[[p, c]]
        hit = np.flatnonzero(aug[:, c])
        hit = hit[hit != c]
        aug[hit] ^= aug[c]
    return aug[:, n]
