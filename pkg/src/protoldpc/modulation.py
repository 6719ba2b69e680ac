"""Amplitude-shift-keying constellations with Gray labels and input shaping.

The channel model throughout the package is Y = delta*X + Z with Z standard
normal, so the SNR in dB fully determines the spacing once the symbol
distribution is fixed: 10^(snr_db/10) = E[(delta*X)^2].
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import TYPE_CHECKING

import numpy as np
from scipy.optimize import brentq

from .errors import NumericError, ParameterError

if TYPE_CHECKING:  # pragma: no cover
    pass

_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


def brgc_labels(m: int) -> list[str]:
    """Binary reflected Gray code labels in left-to-right point order.

    Bit 1 is the leftmost bit: it is the sign bit and flips exactly once,
    at the origin. Adjacent labels differ in exactly one bit.

    Args:
        m: label length, 1 <= m <= 16.

    Returns:
        2^m bit-strings of length m.
    """
    if not isinstance(m, int) or not 1 <= m <= 16:
        raise ParameterError(f"label length must be an integer in [1, 16], got {m!r}")
    labels = ["0", "1"]
    for _ in range(m - 1):
        labels = ["0" + s for s in labels] + ["1" + s for s in reversed(labels)]
    return labels


@dataclass(frozen=True)
class ChannelSpec:
    """AWGN channel operating point; noise variance is fixed to 1."""

    snr_db: float

    def __post_init__(self) -> None:
        if not math.isfinite(self.snr_db):
            raise ParameterError(f"snr_db must be finite, got {self.snr_db!r}")

    @property
    def snr_linear(self) -> float:
        return 10.0 ** (self.snr_db / 10.0)

    def delta_for(self, mean_square: float) -> float:
        """Spacing that puts E[(delta*X)^2] at the linear SNR."""
        if mean_square <= 0:
            raise ParameterError("mean square symbol value must be positive")
        return math.sqrt(self.snr_linear / mean_square)


def _check_gray(labels: tuple[str, ...]) -> None:
    for a, b in zip(labels, labels[1:]):
        if sum(x != y for x, y in zip(a, b)) != 1:
            raise ParameterError(f"labels {a!r} and {b!r} are adjacent but not Gray")


@dataclass(frozen=True)
class Constellation:
    """Amplitude constellation with Gray labels and a symbol distribution.

    Attributes:
        m: bits per symbol.
        delta: spacing applied to the integer points, > 0.
        points: the 2^m odd integers -(2^m-1), ..., -1, 1, ..., 2^m-1 ascending.
        labels: Gray labels in the same left-to-right order; bit 1 is the sign.
        prob: symbol distribution, symmetric (P(x) = P(-x)) and summing to 1.
    """

    m: int
    delta: float
    points: np.ndarray = field(repr=False)
    labels: tuple[str, ...] = field(repr=False)
    prob: np.ndarray = field(repr=False)

    def __post_init__(self) -> None:
        n = 2**self.m
        points = np.asarray(self.points, dtype=float)
        prob = np.asarray(self.prob, dtype=float)
        expected = np.arange(-(n - 1), n, 2, dtype=float)
        if points.shape != (n,) or not np.array_equal(points, expected):
            raise ParameterError("points must be the ascending odd integers +-1..+-(2^m-1)")
        if len(self.labels) != n or any(len(s) != self.m for s in self.labels):
            raise ParameterError("need 2^m labels of length m")
        _check_gray(tuple(self.labels))
        if not (self.delta > 0 and math.isfinite(self.delta)):
            raise ParameterError(f"delta must be positive and finite, got {self.delta!r}")
        if prob.shape != (n,) or np.any(prob < 0):
            raise ParameterError("prob must be 2^m nonnegative reals")
        if abs(prob.sum() - 1.0) > 1e-12:
            raise ParameterError(f"prob sums to {prob.sum()!r}, expected 1 within 1e-12")
        if np.max(np.abs(prob - prob[::-1])) > 1e-12:
            raise ParameterError("prob must be symmetric: P(x) = P(-x)")
        points.setflags(write=False)
        prob.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "prob", prob)
        object.__setattr__(self, "labels", tuple(self.labels))

    @cached_property
    def bit_matrix(self) -> np.ndarray:
        """(2^m, m) uint8 array; row k is the label of points[k]."""
        bits = np.array([[int(ch) for ch in lab] for lab in self.labels], dtype=np.uint8)
        bits.setflags(write=False)
        return bits

    @cached_property
    def mean_square(self) -> float:
        """E[X^2] of the unscaled integer points."""
        return float(np.dot(self.prob, self.points**2))

    @cached_property
    def snr_db(self) -> float:
        """Operating SNR implied by delta and prob."""
        return 10.0 * math.log10(self.mean_square * self.delta**2)

    @cached_property
    def is_uniform(self) -> bool:
        return bool(np.max(np.abs(self.prob - 1.0 / len(self.prob))) <= 1e-12)

    def scaled_points(self) -> np.ndarray:
        return self.delta * self.points


def uniform_constellation(m: int, snr_db: float) -> Constellation:
    """Equiprobable 2^m-ASK at the given SNR.

    Uses E[X^2] = (4^m - 1)/3 for the unscaled points to set delta.
    """
    if not isinstance(m, int) or m < 1:
        raise ParameterError(f"bits per symbol must be a positive integer, got {m!r}")
    spec = ChannelSpec(snr_db)
    mean_square = (4**m - 1) / 3.0
    n = 2**m
    return Constellation(
        m=m,
        delta=spec.delta_for(mean_square),
        points=np.arange(-(n - 1), n, 2, dtype=float),
        labels=tuple(brgc_labels(m)),
        prob=np.full(n, 1.0 / n),
    )


def maxwell_boltzmann(m: int, nu: float) -> np.ndarray:
    """Sampled-Gaussian distribution P(x) proportional to exp(-nu*x^2).

    Defined over the 2^m unscaled points; symmetric by construction.
    nu = 0 gives the uniform distribution.
    """
    if not isinstance(m, int) or m < 1:
        raise ParameterError(f"bits per symbol must be a positive integer, got {m!r}")
    if not (nu >= 0 and math.isfinite(nu)):
        raise ParameterError(f"shaping parameter must be finite and >= 0, got {nu!r}")
    n = 2**m
    points = np.arange(-(n - 1), n, 2, dtype=float)
    expo = -nu * points**2
    expo -= expo.max()  # keep exp() away from underflow for large nu
    p = np.exp(expo)
    return p / p.sum()


def shaped_constellation(m: int, snr_db: float, nu: float) -> Constellation:
    """Maxwell-Boltzmann shaped 2^m-ASK; delta set by the power constraint."""
    prob = maxwell_boltzmann(m, nu)
    n = 2**m
    points = np.arange(-(n - 1), n, 2, dtype=float)
    mean_square = float(np.dot(prob, points**2))
    return Constellation(
        m=m,
        delta=ChannelSpec(snr_db).delta_for(mean_square),
        points=points,
        labels=tuple(brgc_labels(m)),
        prob=prob,
    )


def with_snr(c: Constellation, snr_db: float) -> Constellation:
    """Same distribution and labels, respaced for a different SNR."""
    return Constellation(
        m=c.m,
        delta=ChannelSpec(snr_db).delta_for(c.mean_square),
        points=np.array(c.points),
        labels=c.labels,
        prob=np.array(c.prob),
    )


def shaping_for_entropy(m: int, entropy_bits: float) -> float:
    """Shaping parameter nu such that H(P_X) equals entropy_bits.

    The entropy of the Maxwell-Boltzmann family decreases strictly in nu from
    m at nu = 0, so the solution is unique.
    """
    if not isinstance(m, int) or m < 1:
        raise ParameterError(f"bits per symbol must be a positive integer, got {m!r}")
    if not 0.0 < entropy_bits <= m:
        raise ParameterError(f"target entropy must lie in (0, m], got {entropy_bits!r}")
    if entropy_bits == m:
        return 0.0

    def gap(nu: float) -> float:
        p = maxwell_boltzmann(m, nu)
        mask = p > 0
        return float(-np.dot(p[mask], np.log2(p[mask]))) - entropy_bits

    hi = 1.0
    while gap(hi) > 0:
        hi *= 2.0
        if hi > 1e6:
            raise NumericError("entropy target unreachable within the search range")
    return float(brentq(gap, 0.0, hi, xtol=1e-12))


def _nu_max(m: int) -> float:
    """Largest useful shaping parameter: E[X^2] within 5% of the minimum 1."""

    def excess(nu: float) -> float:
        p = maxwell_boltzmann(m, nu)
        points = np.arange(-(2**m - 1), 2**m, 2, dtype=float)
        return float(np.dot(p, points**2)) - 1.05

    hi = 1.0
    while excess(hi) > 0:
        hi *= 2.0
    return float(brentq(excess, 0.0, hi, xtol=1e-9))


def optimize_shaping(m: int, snr_db: float) -> tuple[float, Constellation]:
    """Shaping parameter maximizing the bit-metric decoding rate at one SNR.

    Golden-section search on nu in [0, nu_max] with the spacing re-fit to the
    power constraint at every candidate; tolerance 1e-6 in nu. The result is
    never worse than the uniform input (nu = 0 is in the feasible set).

    Returns:
        (nu, constellation at snr_db with that nu).
    """
    from . import infotheory

    if not isinstance(m, int) or m < 2:
        raise ParameterError(f"shaping needs at least 2 bits per symbol, got {m!r}")

    def rate(nu: float) -> float:
        r = infotheory.bmd_rate(shaped_constellation(m, snr_db, nu)).bmd_rate
        if not math.isfinite(r):
            raise NumericError(f"shaping objective non-finite at nu={nu!r}")
        return r

    lo, hi = 0.0, _nu_max(m)
    x1 = hi - _GOLDEN * (hi - lo)
    x2 = lo + _GOLDEN * (hi - lo)
    f1, f2 = rate(x1), rate(x2)
    while hi - lo > 1e-6:
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _GOLDEN * (hi - lo)
            f2 = rate(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _GOLDEN * (hi - lo)
            f1 = rate(x1)
    nu = 0.5 * (lo + hi)
    # nu = 0 is feasible, so never return something the uniform input beats
    if rate(nu) < rate(0.0):
        nu = 0.0
    return nu, shaped_constellation(m, snr_db, nu)
