"""Finite-length verification: systematic encoding, demapping, BP decoding.

GF(2) linear algebra runs on bit-packed uint64 words (numpy popcount for
matrix-vector products, a numba Gauss-Jordan kernel for the one-time parity
inversion). The decoder is flooding sum-product in the log domain with a
forward-backward pairwise check update and syndrome early stopping.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numba
import numpy as np

from .errors import BracketError, ParameterError, RankDeficiencyError
from .infotheory import lvalues
from .modulation import Constellation, with_snr
from .protograph import ParityCheckMatrix

LLR_CLIP = 50.0
_CHUNK = 25
_ONE = np.uint64(1)


def _packed_width(bits: int) -> int:
    return (bits + 63) // 64


def _pack_vector(bits: np.ndarray, words: int) -> np.ndarray:
    """Little-endian pack of a 0/1 vector into uint64 words."""
    raw = np.packbits(bits.astype(np.uint8), bitorder="little")
    out = np.zeros(words * 8, dtype=np.uint8)
    out[: raw.size] = raw
    return out.view(np.uint64)


def _set_bits(mat: np.ndarray, rows: np.ndarray, bit_cols: np.ndarray) -> None:
    """OR bits into packed rows; duplicates are harmless."""
    np.bitwise_or.at(
        mat, (rows, bit_cols >> 6), _ONE << (bit_cols & 63).astype(np.uint64)
    )


@numba.njit(cache=True, nogil=True)
def _gf2_eliminate(mat: np.ndarray, r: int) -> np.ndarray:
    """Gauss-Jordan on packed rows [P | E], P square of r bits.

    Works column by column without physical swaps; returns for each column
    the pivot row chosen for it, -1 where the column had no pivot among the
    still-unused rows (rank deficiency). E starts as the identity and
    accumulates the row operations.
    """
    words = mat.shape[1]
    pivot_row_of_col = np.full(r, -1, dtype=np.int64)
    row_used = np.zeros(r, dtype=numba.boolean)
    for c in range(r):
        w = c >> 6
        mask = np.uint64(1) << np.uint64(c & 63)
        pivot = -1
        for i in range(r):
            if not row_used[i] and (mat[i, w] & mask) != 0:
                pivot = i
                break
        if pivot < 0:
            continue
        row_used[pivot] = True
        pivot_row_of_col[c] = pivot
        for i in range(r):
            if i != pivot and (mat[i, w] & mask) != 0:
                for k in range(words):
                    mat[i, k] ^= mat[pivot, k]
    return pivot_row_of_col


@dataclass(frozen=True)
class CodecContext:
    """Precomputed systematic encoder plus the bit-to-symbol assignment.

    ``r_info`` holds the information-column part of H bit-packed per check;
    ``p_inv`` the inverse of the parity part, so encoding is two packed
    matrix-vector products. ``col_of`` (one row per bit level) lists, in
    symbol order, which coded-bit position carries that level; it is None
    when the matrix has no lifting lineage to derive the mapping from.
    """

    h: ParityCheckMatrix
    info_cols: np.ndarray
    parity_cols: np.ndarray
    r_info: np.ndarray
    p_inv: np.ndarray
    col_of: np.ndarray | None

    @property
    def n(self) -> int:
        return self.h.n

    @property
    def k(self) -> int:
        return int(self.info_cols.size)

    def encode(self, info_bits: np.ndarray) -> np.ndarray:
        """Systematic codeword for one frame of k information bits."""
        if info_bits.shape != (self.k,):
            raise ParameterError(f"expected {self.k} information bits")
        u = _pack_vector(info_bits, self.r_info.shape[1])
        syndrome = np.bitwise_count(self.r_info & u).sum(axis=1, dtype=np.int64) & 1
        s = _pack_vector(syndrome, self.p_inv.shape[1])
        parity = np.bitwise_count(self.p_inv & s).sum(axis=1, dtype=np.int64) & 1
        x = np.empty(self.n, dtype=np.uint8)
        x[self.info_cols] = info_bits
        x[self.parity_cols] = parity.astype(np.uint8)
        return x

    def syndrome(self, x: np.ndarray) -> np.ndarray:
        """H @ x over GF(2), one bit per check."""
        h = self.h
        return np.bitwise_xor.reduceat(x[h.col_idx], h.row_ptr[:-1]).astype(np.uint8)


def _symbol_columns(h: ParityCheckMatrix) -> np.ndarray | None:
    """(m, n_sym) coded-bit position of each level in symbol order."""
    if h.lineage is None:
        return None
    bit_map = h.lineage.basematrix.bit_map
    q = h.lineage.q1 * h.lineage.q2
    level_of_bit = np.repeat(np.asarray(bit_map, dtype=np.int64), q)
    m = max(bit_map)
    cols = [np.flatnonzero(level_of_bit == level) for level in range(1, m + 1)]
    return np.stack(cols)


def build_encoder(
    h: ParityCheckMatrix, parity_cols: np.ndarray | None = None
) -> CodecContext:
    """Prepare a systematic encoder with the given parity column set.

    Default parity columns are the last n_rows positions, which under the
    standard layout (sign level last) is exactly the level-1 group.

    Raises:
        RankDeficiencyError: parity submatrix singular; names a set of
            checks whose GF(2) sum is zero there.
    """
    r = h.n_rows
    if parity_cols is None:
        parity_cols = np.arange(h.n - r, h.n, dtype=np.int64)
    else:
        parity_cols = np.asarray(parity_cols, dtype=np.int64)
        if parity_cols.size != r or np.unique(parity_cols).size != r:
            raise ParameterError(f"need {r} distinct parity columns")
        if parity_cols.min() < 0 or parity_cols.max() >= h.n:
            raise ParameterError("parity columns out of range")

    pcol_index = np.full(h.n, -1, dtype=np.int64)
    pcol_index[parity_cols] = np.arange(r)
    info_cols = np.flatnonzero(pcol_index < 0)
    icol_index = np.full(h.n, -1, dtype=np.int64)
    icol_index[info_cols] = np.arange(info_cols.size)

    rows = np.repeat(np.arange(r, dtype=np.int64), np.diff(h.row_ptr))
    in_parity = pcol_index[h.col_idx] >= 0

    words_p = _packed_width(r)
    mat = np.zeros((r, 2 * words_p), dtype=np.uint64)
    _set_bits(mat, rows[in_parity], pcol_index[h.col_idx[in_parity]])
    eye = np.arange(r, dtype=np.int64)
    mat[eye, words_p + (eye >> 6)] |= _ONE << (eye & 63).astype(np.uint64)

    pivot_row_of_col = _gf2_eliminate(mat, r)
    if np.any(pivot_row_of_col < 0):
        used = np.zeros(r, dtype=bool)
        used[pivot_row_of_col[pivot_row_of_col >= 0]] = True
        first_free = int(np.flatnonzero(~used)[0])
        combo = np.unpackbits(
            mat[first_free, words_p:].view(np.uint8), bitorder="little"
        )[:r]
        raise RankDeficiencyError(np.flatnonzero(combo).tolist())
    p_inv = mat[pivot_row_of_col, words_p:]

    words_k = _packed_width(int(info_cols.size))
    r_info = np.zeros((r, words_k), dtype=np.uint64)
    in_info = ~in_parity
    _set_bits(r_info, rows[in_info], icol_index[h.col_idx[in_info]])

    return CodecContext(
        h=h,
        info_cols=info_cols,
        parity_cols=parity_cols,
        r_info=r_info,
        p_inv=p_inv,
        col_of=_symbol_columns(h),
    )


@numba.njit(cache=True, nogil=True)
def _syndrome_zero(hard: np.ndarray, row_ptr: np.ndarray, col_idx: np.ndarray) -> bool:
    for row in range(row_ptr.size - 1):
        acc = np.uint8(0)
        for e in range(row_ptr[row], row_ptr[row + 1]):
            acc ^= hard[col_idx[e]]
        if acc:
            return False
    return True


@numba.njit(cache=True, nogil=True, inline="always")
def _boxplus(a: float, b: float) -> float:
    mag = min(abs(a), abs(b))
    if (a < 0.0) != (b < 0.0):
        mag = -mag
    return mag + math.log1p(math.exp(-abs(a + b))) - math.log1p(math.exp(-abs(a - b)))


@numba.njit(cache=True, nogil=True)
def _bp_decode(
    llr: np.ndarray, row_ptr: np.ndarray, col_idx: np.ndarray, max_iter: int
):
    """Flooding sum-product; returns (syndrome_ok, iterations, hard bits)."""
    n_rows = row_ptr.size - 1
    n = llr.size
    n_edges = col_idx.size
    hard = np.empty(n, dtype=np.uint8)
    for v in range(n):
        hard[v] = 1 if llr[v] <= 0.0 else 0
    if _syndrome_zero(hard, row_ptr, col_idx):
        return True, 0, hard

    msg_cv = np.zeros(n_edges)
    msg_vc = np.empty(n_edges)
    total = np.empty(n)
    max_deg = 0
    for row in range(n_rows):
        deg = row_ptr[row + 1] - row_ptr[row]
        if deg > max_deg:
            max_deg = deg
    fwd = np.empty(max_deg)
    bwd = np.empty(max_deg)

    for it in range(1, max_iter + 1):
        for v in range(n):
            total[v] = llr[v]
        for e in range(n_edges):
            total[col_idx[e]] += msg_cv[e]
        for e in range(n_edges):
            msg_vc[e] = total[col_idx[e]] - msg_cv[e]
        for row in range(n_rows):
            start = row_ptr[row]
            deg = row_ptr[row + 1] - start
            if deg == 1:
                # a lone variable in a check is forced to zero
                msg_cv[start] = LLR_CLIP
                continue
            fwd[0] = msg_vc[start]
            for j in range(1, deg):
                fwd[j] = _boxplus(fwd[j - 1], msg_vc[start + j])
            bwd[deg - 1] = msg_vc[start + deg - 1]
            for j in range(deg - 2, -1, -1):
                bwd[j] = _boxplus(bwd[j + 1], msg_vc[start + j])
            msg_cv[start] = bwd[1]
            msg_cv[start + deg - 1] = fwd[deg - 2]
            for j in range(1, deg - 1):
                msg_cv[start + j] = _boxplus(fwd[j - 1], bwd[j + 1])
        for v in range(n):
            total[v] = llr[v]
        for e in range(n_edges):
            total[col_idx[e]] += msg_cv[e]
        for v in range(n):
            hard[v] = 1 if total[v] <= 0.0 else 0
        if _syndrome_zero(hard, row_ptr, col_idx):
            return True, it, hard
    return False, max_iter, hard


@dataclass(frozen=True)
class PointResult:
    """Exact counts for one SNR point."""

    snr_db: float
    frames: int
    bit_errors: int
    frame_errors: int
    avg_iters: float

    @property
    def fer(self) -> float:
        return self.frame_errors / self.frames

    def ber(self, k: int) -> float:
        return self.bit_errors / (self.frames * k)


@dataclass(frozen=True)
class SimulationReport:
    """Monte Carlo results plus the configuration that produced them."""

    points: tuple[PointResult, ...]
    k: int
    seed: int
    max_iter: int
    min_frame_errors: int
    max_frames: int
    jobs: int

    def to_csv(self, target) -> None:
        """Write one row per SNR point to a path or text file object."""
        own = isinstance(target, (str, bytes)) or hasattr(target, "__fspath__")
        handle = open(target, "w", newline="") if own else target
        try:
            writer = csv.writer(handle)
            writer.writerow(
                ["snr_db", "frames", "bit_errors", "frame_errors", "ber", "fer",
                 "avg_iters"]
            )
            for p in self.points:
                writer.writerow(
                    [repr(p.snr_db), p.frames, p.bit_errors, p.frame_errors,
                     repr(p.ber(self.k)), repr(p.fer), repr(p.avg_iters)]
                )
        finally:
            if own:
                handle.close()


class _PointLab:
    """Per-SNR-point working set shared by all workers."""

    def __init__(self, ctx: CodecContext, c: Constellation, snr_db: float):
        if ctx.col_of is None:
            raise ParameterError(
                "matrix carries no lifting lineage; cannot assign bits to symbols"
            )
        if ctx.col_of.shape[0] != c.m:
            raise ParameterError(
                f"matrix is laid out for {ctx.col_of.shape[0]} bit levels, "
                f"constellation has {c.m}"
            )
        self.ctx = ctx
        self.c = with_snr(c, snr_db)
        self.m = c.m
        self.n_sym = ctx.col_of.shape[1]
        self.tx_points = self.c.scaled_points()
        keys = np.zeros(1 << self.m, dtype=np.int64)
        for i in range(self.m):
            keys += self.c.bit_matrix[:, i].astype(np.int64) << i
        inv = np.empty(1 << self.m, dtype=np.int64)
        inv[keys] = np.arange(1 << self.m)
        self.point_of_key = inv

        self.shaped = not self.c.is_uniform
        if self.shaped:
            level_of_bit = np.repeat(
                np.asarray(ctx.h.lineage.basematrix.bit_map, dtype=np.int64),
                ctx.h.lineage.q1 * ctx.h.lineage.q2,
            )
            if np.any(level_of_bit[ctx.parity_cols] != 1):
                raise ParameterError(
                    "shaped operation requires every parity bit on level 1"
                )
            amp_key = np.zeros(1 << self.m, dtype=np.int64)
            for i in range(1, self.m):
                amp_key += self.c.bit_matrix[:, i].astype(np.int64) << (i - 1)
            probs = np.zeros(1 << (self.m - 1))
            np.add.at(probs, amp_key, self.c.prob)
            self.amp_probs = probs / probs.sum()
            icol_index = np.full(ctx.n, -1, dtype=np.int64)
            icol_index[ctx.info_cols] = np.arange(ctx.k)
            # info slots per amplitude level, symbol order
            self.amp_info = np.stack(
                [icol_index[ctx.col_of[i]] for i in range(1, self.m)]
            )
            if np.any(self.amp_info < 0):
                raise ParameterError(
                    "shaped operation requires every amplitude bit to be systematic"
                )
            sign_slots = icol_index[ctx.col_of[0]]
            self.sign_info = sign_slots[sign_slots >= 0]
        else:
            self.amp_probs = None

    def draw_info(self, rng: np.random.Generator) -> np.ndarray:
        if not self.shaped:
            return rng.integers(0, 2, self.ctx.k, dtype=np.uint8)
        u = np.empty(self.ctx.k, dtype=np.uint8)
        amp = rng.choice(self.amp_probs.size, size=self.n_sym, p=self.amp_probs)
        for i in range(self.m - 1):
            u[self.amp_info[i]] = (amp >> i) & 1
        if self.sign_info.size:
            u[self.sign_info] = rng.integers(0, 2, self.sign_info.size, dtype=np.uint8)
        return u

    def transmit(self, x: np.ndarray, rng: np.random.Generator) -> np.ndarray:
        keys = np.zeros(self.n_sym, dtype=np.int64)
        for i in range(self.m):
            keys += x[self.ctx.col_of[i]].astype(np.int64) << i
        tx = self.tx_points[self.point_of_key[keys]]
        return tx + rng.standard_normal(self.n_sym)

    def demap(self, y: np.ndarray) -> np.ndarray:
        llr = np.empty(self.ctx.n)
        for i in range(self.m):
            llr[self.ctx.col_of[i]] = lvalues(y, i + 1, self.c)
        np.clip(llr, -LLR_CLIP, LLR_CLIP, out=llr)
        return llr


def _run_frames(
    lab: _PointLab, rng: np.random.Generator, frames: int, max_iter: int
) -> tuple[int, int, int]:
    ctx = lab.ctx
    bit_errors = 0
    frame_errors = 0
    iter_sum = 0
    for _ in range(frames):
        u = lab.draw_info(rng)
        x = ctx.encode(u)
        y = lab.transmit(x, rng)
        llr = lab.demap(y)
        _, iters, hard = _bp_decode(llr, ctx.h.row_ptr, ctx.h.col_idx, max_iter)
        iter_sum += iters
        if not np.array_equal(hard, x):
            frame_errors += 1
            bit_errors += int(np.count_nonzero(hard[ctx.info_cols] != u))
    return bit_errors, frame_errors, iter_sum


def simulate(
    ctx: CodecContext,
    c: Constellation,
    snr_list,
    *,
    stop: dict | None = None,
    max_iter: int = 100,
    seed: int = 0,
    jobs: int = 1,
) -> SimulationReport:
    """Monte Carlo BER/FER over the given SNR points.

    Each point is measured until ``min_frame_errors`` frame errors or
    ``max_frames`` frames, checked at round boundaries; each of the ``jobs``
    workers owns the stream seeded by (seed, point index, worker index), so
    aggregate counts are reproducible for a fixed worker count.
    """
    if ctx.n % c.m != 0:
        raise ParameterError(f"blocklength {ctx.n} not divisible by m = {c.m}")
    if jobs < 1:
        raise ParameterError(f"jobs must be >= 1, got {jobs!r}")
    stop = dict(stop or {})
    min_fe = int(stop.pop("min_frame_errors", 100))
    max_frames = int(stop.pop("max_frames", 10_000_000))
    if stop:
        raise ParameterError(f"unknown stop keys: {sorted(stop)}")

    points = []
    pool = ThreadPoolExecutor(max_workers=jobs) if jobs > 1 else None
    try:
        for p_idx, snr_db in enumerate(snr_list):
            lab = _PointLab(ctx, c, float(snr_db))
            rngs = [
                np.random.default_rng(np.random.SeedSequence((seed, p_idx, w)))
                for w in range(jobs)
            ]
            frames = bit_errors = frame_errors = iter_sum = 0
            while frame_errors < min_fe and frames < max_frames:
                quota = min(jobs * _CHUNK, max_frames - frames)
                share = [
                    quota // jobs + (1 if w < quota % jobs else 0)
                    for w in range(jobs)
                ]
                tasks = [
                    (lab, rngs[w], share[w], max_iter)
                    for w in range(jobs)
                    if share[w] > 0
                ]
                if pool is not None:
                    results = list(pool.map(lambda a: _run_frames(*a), tasks))
                else:
                    results = [_run_frames(*a) for a in tasks]
                for (be, fe, its), (_, _, nf, _) in zip(results, tasks):
                    bit_errors += be
                    frame_errors += fe
                    iter_sum += its
                    frames += nf
            points.append(
                PointResult(
                    snr_db=float(snr_db),
                    frames=frames,
                    bit_errors=bit_errors,
                    frame_errors=frame_errors,
                    avg_iters=iter_sum / frames,
                )
            )
    finally:
        if pool is not None:
            pool.shutdown()
    return SimulationReport(
        points=tuple(points),
        k=ctx.k,
        seed=seed,
        max_iter=max_iter,
        min_frame_errors=min_fe,
        max_frames=max_frames,
        jobs=jobs,
    )


def operating_point(
    ctx: CodecContext,
    c: Constellation,
    target_fer: float,
    lo_db: float,
    hi_db: float,
    *,
    step: float = 0.05,
    max_iter: int = 100,
    seed: int = 0,
    jobs: int = 1,
) -> float:
    """SNR in dB where FER first crosses ``target_fer``, by scan + interpolation.

    Scans upward from lo_db in ``step`` increments with per-point budgets
    sized to resolve the target, then interpolates the crossing linearly in
    log10(FER).

    Raises:
        BracketError: scan never straddled the target; partial measurements
            attached as ``curve``.
    """
    if not 0.0 < target_fer < 1.0:
        raise ParameterError(f"target_fer must lie in (0, 1), got {target_fer!r}")
    budget = {
        "min_frame_errors": 30,
        "max_frames": int(math.ceil(50.0 / target_fer)),
    }
    curve: list[PointResult] = []
    n_steps = int(math.floor((hi_db - lo_db) / step + 1e-9))
    for i in range(n_steps + 1):
        snr_db = lo_db + i * step
        report = simulate(
            ctx, c, [snr_db], stop=budget, max_iter=max_iter,
            seed=seed + i, jobs=jobs,
        )
        point = report.points[0]
        curve.append(point)
        if point.fer < target_fer:
            if len(curve) < 2 or curve[-2].fer < target_fer:
                raise BracketError(
                    f"first scan point already below FER {target_fer:g}; "
                    "lower lo_db",
                    curve=tuple(curve),
                )
            prev, cur = curve[-2], curve[-1]
            # zero-error points get the standard half-frame floor
            fer_floor = 0.5 / cur.frames
            lo_f = math.log10(prev.fer)
            hi_f = math.log10(max(cur.fer, fer_floor))
            frac = (math.log10(target_fer) - lo_f) / (hi_f - lo_f)
            return prev.snr_db + frac * (cur.snr_db - prev.snr_db)
    raise BracketError(
        f"FER stayed above {target_fer:g} up to {hi_db:g} dB; raise hi_db",
        curve=tuple(curve),
    )
