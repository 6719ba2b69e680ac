"""Differential-evolution search for low-threshold basematrices.

Candidates are real vectors in [0, S+1)^(e*f), floor-quantized to integer
matrices at evaluation time. Fitness is the EXIT-analysis threshold in dB;
structurally invalid candidates (and, in shaped mode, candidates whose
parity column group cannot host a systematic encoder) score +inf. Selection
is elitist, so the best-of-generation sequence never increases.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching

from . import pexit
from .errors import ParameterError, SearchError
from .protograph import Basematrix, validate

_INIT_RETRIES = 50


@dataclass(frozen=True)
class SearchSpec:
    """Search-space and algorithm parameters for :func:`optimize`.

    Attributes:
        e, f: basematrix shape; the code rate is (f - e) / f.
        s_max: largest allowed entry (edge multiplicity).
        m: number of bit levels; f must split into m equal column groups.
        shaped: require an encodable sign-level parity group.
        snr_lo_db, snr_hi_db: threshold-search bracket handed to every
            fitness evaluation.
        population, generations, weight, crossover, seed: classic
            rand/1/bin differential-evolution controls.
    """

    e: int
    f: int
    s_max: int
    m: int
    snr_lo_db: float
    snr_hi_db: float
    shaped: bool = False
    population: int = 40
    generations: int = 200
    weight: float = 0.8
    crossover: float = 0.9
    seed: int = 0

    def __post_init__(self) -> None:
        if not 1 <= self.e < self.f:
            raise ParameterError(f"need 1 <= e < f, got e={self.e}, f={self.f}")
        if self.s_max < 1:
            raise ParameterError(f"s_max must be >= 1, got {self.s_max!r}")
        if self.m < 1 or self.f % self.m != 0:
            raise ParameterError(f"f = {self.f} must split into m = {self.m} groups")
        if self.shaped and self.f // self.m != self.e:
            raise ParameterError(
                "shaped mode needs a square parity group: f/m must equal e"
            )
        if self.population < 8:
            raise ParameterError(f"population must be >= 8, got {self.population!r}")
        if self.generations < 1:
            raise ParameterError(f"generations must be >= 1, got {self.generations!r}")
        if not 0.0 < self.weight <= 1.0:
            raise ParameterError(f"weight must lie in (0, 1], got {self.weight!r}")
        if not 0.0 <= self.crossover <= 1.0:
            raise ParameterError(f"crossover must lie in [0, 1], got {self.crossover!r}")
        if not self.snr_lo_db < self.snr_hi_db:
            raise ParameterError("snr bracket must satisfy lo < hi")

    @property
    def bit_map(self) -> tuple[int, ...]:
        return default_bit_map(self.m, self.f)


def default_bit_map(m: int, f: int) -> tuple[int, ...]:
    """Column layout: amplitude levels 2..m first, sign level 1 last.

    Placing level 1 last keeps the systematic parity group at the tail,
    which is where the encoder expects it.
    """
    if m < 1 or f % m != 0:
        raise ParameterError(f"f = {f} must be a multiple of m = {m}")
    group = f // m
    order = list(range(2, m + 1)) + [1]
    return tuple(level for level in order for _ in range(group))


def parity_group_encodable(a: Basematrix) -> bool:
    """Whether the sign-level columns can host an invertible parity part.

    Protograph-level screen: the level-1 column group must be square and its
    nonzero pattern must contain a full transversal (a permutation hitting
    only nonzero entries), the reachability condition for greedy pivoting.
    The exact GF(2) rank check happens later, on the lifted matrix.
    """
    cols = [k for k, lvl in enumerate(a.bit_map) if lvl == 1]
    e = a.shape[0]
    if len(cols) != e:
        return False
    pattern = csr_matrix((a.entries[:, cols] > 0).astype(np.int8))
    matching = maximum_bipartite_matching(pattern, perm_type="column")
    return bool(np.all(matching >= 0))


@dataclass(frozen=True)
class HistoryPoint:
    generation: int
    best_db: float
    mean_db: float


@dataclass(frozen=True)
class OptimizeResult:
    basematrix: Basematrix
    threshold_db: float
    history: tuple[HistoryPoint, ...]


class _Fitness:
    """Threshold-in-dB objective with caching on the quantized matrix."""

    def __init__(self, spec: SearchSpec, channel_family):
        self.spec = spec
        self.family = channel_family
        self.cache: dict[bytes, float] = {}
        self.lo_c = math.floor(spec.snr_lo_db * 100.0)
        self.hi_c = math.ceil(spec.snr_hi_db * 100.0)

    def _converges(self, a: Basematrix, centi: int) -> bool:
        return pexit.pexit_converges(a, self.family(centi / 100.0))[0]

    def __call__(self, entries: np.ndarray) -> float:
        key = entries.tobytes()
        if key in self.cache:
            return self.cache[key]
        value = math.inf
        a = Basematrix(
            entries=entries, max_parallel=self.spec.s_max, bit_map=self.spec.bit_map
        )
        feasible = validate(a).ok and (
            not self.spec.shaped or parity_group_encodable(a)
        )
        if feasible and self._converges(a, self.hi_c):
            if self._converges(a, self.lo_c):
                # better than the bracket can resolve; score it at the floor
                value = self.lo_c / 100.0
            else:
                lo_c, hi_c = self.lo_c, self.hi_c
                while hi_c - lo_c > 1:
                    mid = (lo_c + hi_c) // 2
                    if self._converges(a, mid):
                        hi_c = mid
                    else:
                        lo_c = mid
                value = (lo_c + hi_c) / 200.0
        self.cache[key] = value
        return value


def _quantize(vec: np.ndarray, spec: SearchSpec) -> np.ndarray:
    entries = np.floor(vec).astype(np.int64).reshape(spec.e, spec.f)
    return np.clip(entries, 0, spec.s_max)


def optimize(spec: SearchSpec, channel_family) -> OptimizeResult:
    """rand/1/bin differential evolution; deterministic for a fixed seed.

    Returns the best quantized matrix, its threshold, and the per-generation
    (best, mean-of-feasible) fitness history, generation 0 being the initial
    population.

    Raises:
        SearchError: if no feasible candidate appears during initialization.
    """
    rng = np.random.default_rng(spec.seed)
    fitness = _Fitness(spec, channel_family)
    dim = spec.e * spec.f
    pop = rng.uniform(0.0, spec.s_max + 1.0, size=(spec.population, dim))
    fits = np.empty(spec.population)
    for i in range(spec.population):
        fits[i] = fitness(_quantize(pop[i], spec))
        for _ in range(_INIT_RETRIES):
            if math.isfinite(fits[i]):
                break
            pop[i] = rng.uniform(0.0, spec.s_max + 1.0, size=dim)
            fits[i] = fitness(_quantize(pop[i], spec))
    if not np.any(np.isfinite(fits)):
        raise SearchError(
            f"no feasible candidate after {_INIT_RETRIES} retries per member; "
            "loosen the search space or widen the SNR bracket"
        )
    history = [_history_point(0, fits)]
    for gen in range(1, spec.generations + 1):
        # all trials derive from the previous generation; selection is a
        # barrier, so evaluations are order-independent
        trials = np.empty_like(pop)
        for i in range(spec.population):
            r1, r2, r3 = _distinct_indices(rng, spec.population, i)
            mutant = pop[r1] + spec.weight * (pop[r2] - pop[r3])
            np.clip(mutant, 0.0, np.nextafter(spec.s_max + 1.0, 0.0), out=mutant)
            cross = rng.random(dim) < spec.crossover
            cross[rng.integers(dim)] = True
            trials[i] = np.where(cross, mutant, pop[i])
        trial_fits = np.array(
            [fitness(_quantize(trials[i], spec)) for i in range(spec.population)]
        )
        accept = trial_fits <= fits
        pop[accept] = trials[accept]
        fits[accept] = trial_fits[accept]
        history.append(_history_point(gen, fits))
    best = int(np.argmin(fits))
    return OptimizeResult(
        basematrix=Basematrix(
            entries=_quantize(pop[best], spec),
            max_parallel=spec.s_max,
            bit_map=spec.bit_map,
        ),
        threshold_db=float(fits[best]),
        history=tuple(history),
    )


def _distinct_indices(
    rng: np.random.Generator, size: int, exclude: int
) -> tuple[int, int, int]:
    picks: list[int] = []
    while len(picks) < 3:
        cand = int(rng.integers(size))
        if cand != exclude and cand not in picks:
            picks.append(cand)
    return picks[0], picks[1], picks[2]


def _history_point(gen: int, fits: np.ndarray) -> HistoryPoint:
    finite = fits[np.isfinite(fits)]
    return HistoryPoint(
        generation=gen,
        best_db=float(fits.min()),
        mean_db=float(finite.mean()) if len(finite) else math.inf,
    )
