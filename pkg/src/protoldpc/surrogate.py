"""Per-level biAWGN surrogates with matched conditional entropy.

Each bit level of a constellation is replaced by a binary-input AWGN channel
whose LLR deviation sigma_ch satisfies 1 - J(sigma_ch) = H(B_i|L_i). The
surrogate input is uniform even when the constellation is shaped; only the
entropy target changes. Summing the per-level matches preserves the total
rate backoff by construction.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import brentq

from . import infotheory, modulation
from .errors import ParameterError

# levels whose target entropy is below the J-table floor get this deviation
SIGMA_CAP = 20.0


@dataclass(frozen=True)
class SurrogateSet:
    """Matched surrogate parameters for every bit level at one SNR.

    Attributes:
        snr_db: operating SNR of the underlying constellation.
        sigma_ch: per-level LLR deviations for EXIT-style analysis.
        matched_entropy: the targets H(B_i|L_i) each sigma reproduces.
        capped: per-level flag; True where the target was below the
            resolvable floor and sigma_ch was clamped to SIGMA_CAP.
    """

    snr_db: float
    sigma_ch: tuple[float, ...]
    matched_entropy: tuple[float, ...]
    capped: tuple[bool, ...] = field(default=())

    def __post_init__(self) -> None:
        if not self.capped:
            object.__setattr__(self, "capped", (False,) * len(self.sigma_ch))
        if not len(self.sigma_ch) == len(self.matched_entropy) == len(self.capped):
            raise ParameterError("per-level tuples must have equal length")
        for sigma, h, capped in zip(self.sigma_ch, self.matched_entropy, self.capped):
            if not (0.0 <= sigma and math.isfinite(sigma)):
                raise ParameterError(f"sigma_ch must be finite and >= 0, got {sigma!r}")
            if not capped and abs((1.0 - infotheory.j_fun(sigma)) - h) > 1e-7:
                raise ParameterError(
                    f"surrogate mismatch: sigma={sigma!r} does not reproduce H={h!r}"
                )

    @property
    def m(self) -> int:
        return len(self.sigma_ch)


def match_surrogate(h_target: float) -> float:
    """Deviation sigma_ch with 1 - J(sigma_ch) = h_target, to 1e-7.

    Raises:
        ParameterError: if h_target is 0 or 1 (zero or infinite noise) or
            outside [0, 1].
    """
    if not 0.0 <= h_target <= 1.0:
        raise ParameterError(f"entropy target must lie in [0, 1], got {h_target!r}")
    if h_target in (0.0, 1.0):
        raise ParameterError(
            f"entropy target {h_target} sits on the boundary (zero or infinite noise)"
        )
    floor = 1.0 - infotheory.j_fun(SIGMA_CAP)
    if h_target <= floor:
        return SIGMA_CAP
    return float(
        brentq(lambda s: (1.0 - infotheory.j_fun(s)) - h_target, 0.0, SIGMA_CAP, xtol=1e-12)
    )


def surrogate_set(c: modulation.Constellation) -> SurrogateSet:
    """Match every bit level of a constellation; see :class:`SurrogateSet`."""
    targets = infotheory.bit_channel_entropies(c)
    floor = 1.0 - infotheory.j_fun(SIGMA_CAP)
    sigma: list[float] = []
    capped: list[bool] = []
    for h in targets:
        if h <= floor:
            sigma.append(SIGMA_CAP)
            capped.append(True)
        else:
            sigma.append(match_surrogate(float(h)))
            capped.append(False)
    return SurrogateSet(
        snr_db=c.snr_db,
        sigma_ch=tuple(sigma),
        matched_entropy=tuple(float(h) for h in targets),
        capped=tuple(capped),
    )


class UniformFamily:
    """snr_db -> SurrogateSet for equiprobable 2^m-ASK; results are cached."""

    def __init__(self, m: int):
        if not isinstance(m, int) or m < 1:
            raise ParameterError(f"bits per symbol must be a positive integer, got {m!r}")
        self.m = m
        self._cache: dict[float, SurrogateSet] = {}

    def constellation(self, snr_db: float) -> modulation.Constellation:
        return modulation.uniform_constellation(self.m, snr_db)

    def __call__(self, snr_db: float) -> SurrogateSet:
        key = float(snr_db)
        if key not in self._cache:
            self._cache[key] = surrogate_set(self.constellation(key))
        return self._cache[key]


class ShapedFamily:
    """snr_db -> SurrogateSet for an entropy-pinned Maxwell-Boltzmann input.

    The shaping parameter is fixed by H(P_X) = rate + (1 - code_rate) * m,
    the value consistent with transmitting ``rate`` information bits per
    channel use through a rate-``code_rate`` code whose parity occupies the
    sign level. Only the spacing varies with SNR.
    """

    def __init__(self, m: int, rate: float, code_rate: float):
        if not isinstance(m, int) or m < 2:
            raise ParameterError(f"shaping needs at least 2 bits per symbol, got {m!r}")
        if not 0.0 < code_rate < 1.0:
            raise ParameterError(f"code rate must lie in (0, 1), got {code_rate!r}")
        self.m = m
        self.rate = float(rate)
        self.code_rate = float(code_rate)
        self.input_entropy = self.rate + (1.0 - self.code_rate) * m
        if not 0.0 < self.input_entropy <= m:
            raise ParameterError(
                f"implied input entropy {self.input_entropy} not in (0, {m}]"
            )
        self.nu = modulation.shaping_for_entropy(m, self.input_entropy)
        self._cache: dict[float, SurrogateSet] = {}

    def constellation(self, snr_db: float) -> modulation.Constellation:
        return modulation.shaped_constellation(self.m, snr_db, self.nu)

    def __call__(self, snr_db: float) -> SurrogateSet:
        key = float(snr_db)
        if key not in self._cache:
            self._cache[key] = surrogate_set(self.constellation(key))
        return self._cache[key]


def uniform_family(m: int) -> UniformFamily:
    return UniformFamily(m)


def shaped_family(m: int, rate: float, code_rate: float) -> ShapedFamily:
    return ShapedFamily(m, rate, code_rate)


def bmd_limit_snr(family, target_rate: float, lo_db: float, hi_db: float) -> float:
    """SNR where the family's bit-metric decoding rate crosses target_rate."""
    return infotheory.snr_for_rate(
        lambda snr: infotheory.bmd_rate(family.constellation(snr)).bmd_rate,
        target_rate,
        lo_db,
        hi_db,
    )
