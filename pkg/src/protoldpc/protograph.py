"""Protograph basematrices, copy-and-permute lifting, and alist files.

Lifting runs in two stages: a small random lift of size q1 resolves parallel
edges (an entry b becomes one random permutation composed with b distinct
cyclic offsets), then every edge of the stage-1 graph expands into a q2 x q2
circulant whose shift is chosen greedily against length-4 cycles. Lifted node
ordering groups the Q = q1*q2 copies of each protograph node contiguously, so
column j of the result descends from protograph column j // Q.
"""

from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable

import numpy as np
import scipy.sparse as sp

from .errors import ConstructionError, ParameterError, ParseError


@dataclass(frozen=True)
class Basematrix:
    """Nonnegative-integer protograph with a column-to-bit-level map.

    Attributes:
        entries: (e, f) integer matrix; entry b counts parallel edges.
        max_parallel: declared ceiling for entries (the search alphabet).
        bit_map: per-column bit level, 1-based; levels partition the columns
            into equal groups of f / num_levels.

    Degree requirements (rows with >= 2 edges, no empty columns) are reported
    by :func:`validate` rather than enforced here, so defective candidates
    can still be inspected.
    """

    entries: np.ndarray = field(repr=False)
    max_parallel: int
    bit_map: tuple[int, ...]

    def __post_init__(self) -> None:
        entries = np.asarray(self.entries, dtype=np.int64)
        if entries.ndim != 2 or entries.size == 0:
            raise ParameterError("entries must be a 2-D integer matrix")
        e, f = entries.shape
        if not e < f:
            raise ParameterError(f"code rate (f-e)/f must be positive, got e={e}, f={f}")
        if self.max_parallel < 1:
            raise ParameterError(f"max_parallel must be >= 1, got {self.max_parallel!r}")
        if entries.min() < 0 or entries.max() > self.max_parallel:
            raise ParameterError(
                f"entries must lie in [0, {self.max_parallel}], got range "
                f"[{entries.min()}, {entries.max()}]"
            )
        bit_map = tuple(int(v) for v in self.bit_map)
        if len(bit_map) != f:
            raise ParameterError(f"bit_map must have one level per column ({f})")
        levels = sorted(set(bit_map))
        if levels[0] < 1 or levels != list(range(1, levels[-1] + 1)):
            raise ParameterError(f"bit levels must be 1..m with no gaps, got {levels}")
        m = levels[-1]
        if f % m != 0 or any(bit_map.count(v) != f // m for v in levels):
            raise ParameterError(
                f"bit_map must split {f} columns into {m} equal groups, got {bit_map}"
            )
        entries.setflags(write=False)
        object.__setattr__(self, "entries", entries)
        object.__setattr__(self, "bit_map", bit_map)

    @property
    def shape(self) -> tuple[int, int]:
        return self.entries.shape

    @property
    def num_levels(self) -> int:
        return max(self.bit_map)

    @property
    def rate(self) -> float:
        e, f = self.entries.shape
        return (f - e) / f

    @cached_property
    def col_degrees(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.entries.sum(axis=0))

    @cached_property
    def row_degrees(self) -> tuple[int, ...]:
        return tuple(int(d) for d in self.entries.sum(axis=1))

    def key(self) -> bytes:
        """Stable hash input for caching fitness evaluations."""
        return self.entries.tobytes() + bytes(self.bit_map)


@dataclass(frozen=True)
class Diagnostics:
    """Outcome of :func:`validate`: hard violations plus plausibility flags."""

    ok: bool
    rate: float
    row_degrees: tuple[int, ...]
    col_degrees: tuple[int, ...]
    problems: tuple[str, ...]
    warnings: tuple[str, ...]


def validate(a: Basematrix) -> Diagnostics:
    """Structural checks a basematrix must pass before lifting or analysis."""
    entries = a.entries
    problems: list[str] = []
    warnings: list[str] = []
    nonzero_per_row = (entries > 0).sum(axis=1)
    for l, cnt in enumerate(nonzero_per_row):
        if cnt == 0:
            problems.append(f"row {l} is all zeros")
        elif cnt < 2:
            problems.append(f"row {l} has a single nonzero entry")
    for k, deg in enumerate(a.col_degrees):
        if deg == 0:
            problems.append(f"column {k} has degree 0")
    seen: dict[bytes, int] = {}
    for l in range(entries.shape[0]):
        key = entries[l].tobytes()
        if key in seen:
            warnings.append(f"rows {seen[key]} and {l} are identical (rank suspect)")
        else:
            seen[key] = l
    deg1_cols = {k for k, d in enumerate(a.col_degrees) if d == 1}
    for l in range(entries.shape[0]):
        support = set(np.nonzero(entries[l])[0].tolist())
        if support and support <= deg1_cols:
            warnings.append(
                f"row {l} is supported only on degree-1 columns (rank suspect)"
            )
    return Diagnostics(
        ok=not problems,
        rate=a.rate,
        row_degrees=a.row_degrees,
        col_degrees=a.col_degrees,
        problems=tuple(problems),
        warnings=tuple(warnings),
    )


@dataclass(frozen=True)
class Lineage:
    """How a lifted matrix was built, sufficient to rebuild it exactly.

    stage1 holds one record (l, k, perm, offsets) per nonzero cell: entry b
    at (l, k) became the b bijections r -> (perm[r] + c) % q1, one offset c
    per parallel edge. stage2 holds one circulant shift per stage-1 edge in
    canonical order: cells sorted by (l, k), offsets ascending within a cell,
    then r = 0..q1-1 within an offset.
    """

    basematrix: Basematrix
    q1: int
    q2: int
    seed: int
    stage1: tuple[tuple[int, int, tuple[int, ...], tuple[int, ...]], ...]
    stage2: tuple[int, ...]


@dataclass(frozen=True)
class ParityCheckMatrix:
    """Sparse binary parity-check matrix in CSR form (ones only)."""

    n: int
    n_rows: int
    row_ptr: np.ndarray = field(repr=False)
    col_idx: np.ndarray = field(repr=False)
    lineage: Lineage | None = field(default=None, repr=False)

    def __post_init__(self) -> None:
        row_ptr = np.ascontiguousarray(self.row_ptr, dtype=np.int64)
        col_idx = np.ascontiguousarray(self.col_idx, dtype=np.int64)
        if row_ptr.shape != (self.n_rows + 1,) or row_ptr[0] != 0:
            raise ParameterError("row_ptr must have n_rows + 1 entries starting at 0")
        if np.any(np.diff(row_ptr) < 0) or row_ptr[-1] != len(col_idx):
            raise ParameterError("row_ptr must be nondecreasing and end at nnz")
        if len(col_idx) and (col_idx.min() < 0 or col_idx.max() >= self.n):
            raise ParameterError("column indices out of range")
        for arr in (row_ptr, col_idx):
            arr.setflags(write=False)
        object.__setattr__(self, "row_ptr", row_ptr)
        object.__setattr__(self, "col_idx", col_idx)

    @property
    def nnz(self) -> int:
        return len(self.col_idx)

    def row_cols(self, i: int) -> np.ndarray:
        return self.col_idx[self.row_ptr[i] : self.row_ptr[i + 1]]

    def to_sparse(self) -> sp.csr_matrix:
        data = np.ones(self.nnz, dtype=np.int8)
        return sp.csr_matrix(
            (data, self.col_idx.astype(np.int32), self.row_ptr), shape=(self.n_rows, self.n)
        )

    @cached_property
    def col_degrees(self) -> np.ndarray:
        deg = np.bincount(self.col_idx, minlength=self.n)
        deg.setflags(write=False)
        return deg

    @cached_property
    def row_degrees(self) -> np.ndarray:
        deg = np.diff(self.row_ptr)
        deg.setflags(write=False)
        return deg


def has_four_cycles(h: ParityCheckMatrix) -> bool:
    """True if two checks share more than one variable node."""
    m = h.to_sparse()
    gram = (m @ m.T).tocoo()
    off = gram.row != gram.col
    return bool(np.any(gram.data[off] > 1))


def _count_four_cycles(mat: np.ndarray) -> int:
    """Number of length-4 cycles in a small dense 0/1 matrix."""
    gram = mat @ mat.T
    overlap = gram[np.triu_indices_from(gram, k=1)]
    return int((overlap * (overlap - 1) // 2).sum())


def _stage1_lift(
    a: Basematrix, q1: int, rng: np.random.Generator
) -> list[tuple[int, int, tuple[int, ...], tuple[int, ...]]]:
    """Random q1-lift: one permutation and b distinct offsets per cell.

    Entry b at (l, k) becomes the bijections r -> (perm[r] + c) % q1 for b
    distinct offsets c, so parallel edges separate structurally. Offsets are
    picked greedily to add as few length-4 cycles as possible, counted
    directly on the dense stage-1 matrix (e*q1 x f*q1, small).
    """
    e, f = a.shape
    graph = np.zeros((e * q1, f * q1), dtype=np.int64)
    cells = [(l, k) for l in range(e) for k in range(f) if a.entries[l, k] > 0]
    rng.shuffle(cells)
    chosen: dict[tuple[int, int], tuple[tuple[int, ...], tuple[int, ...]]] = {}
    copies = np.arange(q1)
    for l, k in cells:
        perm = rng.permutation(q1)
        offsets: list[int] = []
        for _ in range(int(a.entries[l, k])):
            best: list[int] = []
            best_score = -1
            for c in range(q1):
                if c in offsets:
                    continue
                cols = k * q1 + (perm + c) % q1
                graph[l * q1 + copies, cols] = 1
                score = _count_four_cycles(graph)
                graph[l * q1 + copies, cols] = 0
                if best_score < 0 or score < best_score:
                    best, best_score = [c], score
                elif score == best_score:
                    best.append(c)
            pick = int(rng.choice(best))
            offsets.append(pick)
            graph[l * q1 + copies, k * q1 + (perm + pick) % q1] = 1
        chosen[(l, k)] = (tuple(int(p) for p in perm), tuple(sorted(offsets)))
    return [(l, k, *chosen[(l, k)]) for l, k in sorted(chosen)]


def _stage1_edges(
    stage1: Iterable[tuple[int, int, tuple[int, ...], tuple[int, ...]]], q1: int
) -> tuple[np.ndarray, np.ndarray]:
    """Stage-1 edges as (row, col) node index arrays, in canonical order."""
    rows = []
    cols = []
    copies = np.arange(q1)
    for l, k, perm, offsets in stage1:
        images = np.asarray(perm, dtype=np.int64)
        for c in offsets:
            rows.append(l * q1 + copies)
            cols.append(k * q1 + (images + c) % q1)
    return np.concatenate(rows), np.concatenate(cols)


def _stage2_shifts(
    erow: np.ndarray,
    ecol: np.ndarray,
    q2: int,
    rng: np.random.Generator,
    avoid_cycles: bool,
) -> list[int]:
    """One circulant shift per stage-1 edge, breaking stage-1 4-cycles.

    A stage-1 cycle through edges (a, b, c, d) survives the circulant stage
    iff t_a - t_b + t_c - t_d = 0 (mod q2), so for each cycle whose other
    three edges are already assigned the closing residue is forbidden. A
    dead end returns [] and the caller retries with a fresh stage 1.
    """
    n_edges = len(erow)
    if not avoid_cycles:
        return [int(t) for t in rng.integers(0, q2, size=n_edges)]
    index = np.full((int(erow.max()) + 1, int(ecol.max()) + 1), -1, dtype=np.int64)
    index[erow, ecol] = np.arange(n_edges)
    present = index >= 0
    sign = (1, -1, 1, -1)
    cycles: list[tuple[int, int, int, int]] = []
    incident: list[list[tuple[int, int]]] = [[] for _ in range(n_edges)]
    for i1 in range(index.shape[0]):
        for i2 in range(i1 + 1, index.shape[0]):
            shared = np.nonzero(present[i1] & present[i2])[0]
            for x in range(len(shared)):
                for y in range(x + 1, len(shared)):
                    j1, j2 = int(shared[x]), int(shared[y])
                    quad = (
                        int(index[i1, j1]),
                        int(index[i1, j2]),
                        int(index[i2, j2]),
                        int(index[i2, j1]),
                    )
                    for pos, edge in enumerate(quad):
                        incident[edge].append((len(cycles), pos))
                    cycles.append(quad)
    chosen = np.full(n_edges, -1, dtype=np.int64)
    for e in rng.permutation(n_edges):
        forbidden: set[int] = set()
        for ci, pos in incident[e]:
            rest = 0
            for p, other in enumerate(cycles[ci]):
                if p == pos:
                    continue
                if chosen[other] < 0:
                    break
                rest += sign[p] * int(chosen[other])
            else:
                forbidden.add((-sign[pos] * rest) % q2)
        allowed = [t for t in range(q2) if t not in forbidden]
        if not allowed:
            return []
        chosen[e] = int(rng.choice(allowed))
    return [int(t) for t in chosen]


def _assemble(
    erow: np.ndarray, ecol: np.ndarray, q2: int, stage2: list[int]
) -> tuple[np.ndarray, np.ndarray]:
    copies = np.arange(q2)
    rows_parts = []
    cols_parts = []
    for u, v, t in zip(erow.tolist(), ecol.tolist(), stage2):
        rows_parts.append(u * q2 + copies)
        cols_parts.append(v * q2 + (copies + t) % q2)
    return np.concatenate(rows_parts), np.concatenate(cols_parts)


def deg2_cycle_weight(h: ParityCheckMatrix) -> float | None:
    """Minimum weight of a codeword supported only on degree-2 columns.

    A degree-2 column is an edge between its two checks; a codeword confined
    to such columns is a cycle in that graph, and the shortest one bounds the
    minimum distance. Returns inf when the graph is acyclic and None when a
    check touches three or more degree-2 columns (no cheap exact walk).
    """
    cols2 = np.nonzero(h.col_degrees == 2)[0]
    if len(cols2) == 0:
        return math.inf
    csc = h.to_sparse().tocsc()
    adj: dict[int, list[tuple[int, int]]] = {}
    for j in cols2:
        u, v = (int(r) for r in csc.indices[csc.indptr[j] : csc.indptr[j + 1]])
        adj.setdefault(u, []).append((v, int(j)))
        adj.setdefault(v, []).append((u, int(j)))
    if any(len(edges) > 2 for edges in adj.values()):
        return None
    # degree <= 2 everywhere: components are paths and simple cycles
    best = math.inf
    seen: set[int] = set()
    for start in adj:
        if start in seen or len(adj[start]) != 2:
            continue
        seen.add(start)
        length = 0
        node, via = start, -1
        while True:
            onward = [(w, j) for w, j in adj[node] if j != via]
            if not onward:
                break  # path end
            node, via = onward[0]
            length += 1
            if node == start:
                best = min(best, length)
                break
            if node in seen:
                break
            seen.add(node)
    return best


def lift(
    a: Basematrix, q1: int, q2: int, seed: int, min_girth: int = 6, deg2_floor: int = 0
) -> ParityCheckMatrix:
    """Copy-and-permute expansion to a quasi-cyclic matrix of size Q = q1*q2.

    Stage 1 resolves each entry b into b distinct permutation offsets within
    a random q1-lift; stage 2 expands every stage-1 edge into a q2-circulant
    with a greedily chosen shift. With the default min_girth of 6 the result
    is verified free of length-4 cycles; construction is retried with derived
    seeds up to 50 times before giving up. min_girth = 4 only guarantees
    that parallel edges are resolved.

    deg2_floor > 0 additionally rejects attempts whose cycles confined to
    degree-2 columns are shorter than the floor; such cycles cap the minimum
    distance regardless of girth, and circulant closure can leave them short.

    Raises:
        ConstructionError: if q1 cannot resolve the parallel edges, the
            basematrix fails validation, or no retry reaches the girth target.
    """
    diag = validate(a)
    if not diag.ok:
        raise ConstructionError("basematrix invalid: " + "; ".join(diag.problems))
    if min_girth not in (4, 6):
        raise ParameterError(f"min_girth must be 4 or 6, got {min_girth!r}")
    if q1 < a.max_parallel:
        raise ConstructionError(
            f"stage-1 lift size {q1} cannot resolve up to {a.max_parallel} parallel edges"
        )
    if q1 < int(a.entries.max()):
        raise ConstructionError(
            f"stage-1 lift size {q1} is below the largest entry {int(a.entries.max())}"
        )
    if q2 < 1:
        raise ParameterError(f"stage-2 lift size must be >= 1, got {q2!r}")
    e, f = a.shape
    q = q1 * q2
    last_failure = "no attempts made"
    for attempt in range(50):
        rng = np.random.default_rng(np.random.SeedSequence((seed, attempt)))
        stage1 = _stage1_lift(a, q1, rng)
        erow, ecol = _stage1_edges(stage1, q1)
        stage2 = _stage2_shifts(erow, ecol, q2, rng, avoid_cycles=min_girth >= 6)
        if not stage2:
            last_failure = "stage-2 greedy ran out of admissible circulant shifts"
            continue
        rows, cols = _assemble(erow, ecol, q2, stage2)
        coo = sp.coo_matrix(
            (np.ones(len(rows), dtype=np.int8), (rows, cols)), shape=(e * q, f * q)
        )
        csr = coo.tocsr()
        csr.sum_duplicates()
        if csr.data.max(initial=0) > 1:
            last_failure = "parallel edges survived stage 1"
            continue
        csr.sort_indices()
        h = ParityCheckMatrix(
            n=f * q,
            n_rows=e * q,
            row_ptr=csr.indptr.astype(np.int64),
            col_idx=csr.indices.astype(np.int64),
            lineage=Lineage(
                basematrix=a,
                q1=q1,
                q2=q2,
                seed=seed,
                stage1=tuple(stage1),
                stage2=tuple(stage2),
            ),
        )
        if min_girth >= 6 and has_four_cycles(h):
            last_failure = "length-4 cycles remained after greedy shift assignment"
            continue
        if deg2_floor > 0:
            weight = deg2_cycle_weight(h)
            if weight is not None and weight < deg2_floor:
                last_failure = (
                    f"degree-2 confined cycle of weight {weight} below {deg2_floor}"
                )
                continue
        _check_degrees(a, h, q)
        return h
    raise ConstructionError(
        f"could not reach girth {min_girth} in 50 attempts: {last_failure}"
    )


def _check_degrees(a: Basematrix, h: ParityCheckMatrix, q: int) -> None:
    want_cols = np.repeat(np.asarray(a.col_degrees), q)
    want_rows = np.repeat(np.asarray(a.row_degrees), q)
    if not np.array_equal(h.col_degrees, want_cols) or not np.array_equal(
        h.row_degrees, want_rows
    ):
        raise ConstructionError("lifting did not preserve the degree profile")


def choose_stage_sizes(a: Basematrix, n: int) -> tuple[int, int]:
    """Default (q1, q2) for a target blocklength: q1 divides Q, near 2*S."""
    e, f = a.shape
    if n % f != 0:
        raise ParameterError(f"blocklength {n} is not a multiple of f = {f}")
    q = n // f
    s = a.max_parallel
    divisors = [d for d in range(1, q + 1) if q % d == 0]
    feasible = [d for d in divisors if d >= s]
    if not feasible:
        raise ConstructionError(
            f"no divisor of Q = {q} can resolve {s} parallel edges"
        )
    q1 = min(feasible, key=lambda d: (abs(d - 2 * s), d))
    return q1, q // q1


def export_alist(h: ParityCheckMatrix, path) -> None:
    """Write the matrix in alist text form, plus a lineage sidecar if known."""
    csc = h.to_sparse().tocsc()
    csc.sort_indices()
    col_deg = np.diff(csc.indptr)
    row_deg = h.row_degrees
    max_col = int(col_deg.max(initial=0))
    max_row = int(row_deg.max(initial=0))
    lines = [
        f"{h.n} {h.n_rows}",
        f"{max_col} {max_row}",
        " ".join(str(int(d)) for d in col_deg),
        " ".join(str(int(d)) for d in row_deg),
    ]
    for j in range(h.n):
        idx = csc.indices[csc.indptr[j] : csc.indptr[j + 1]] + 1
        lines.append(" ".join(map(str, idx.tolist() + [0] * (max_col - len(idx)))))
    for i in range(h.n_rows):
        idx = h.row_cols(i) + 1
        lines.append(" ".join(map(str, idx.tolist() + [0] * (max_row - len(idx)))))
    with open(path, "w") as fh:
        fh.write("\n".join(lines) + "\n")
    if h.lineage is not None:
        _write_lineage(h.lineage, str(path) + ".lineage")


def _write_lineage(lineage: Lineage, path: str) -> None:
    cfg = configparser.ConfigParser()
    a = lineage.basematrix
    cfg["basematrix"] = {
        "rows": "; ".join(" ".join(map(str, row)) for row in a.entries.tolist()),
        "bit_map": " ".join(map(str, a.bit_map)),
        "max_parallel": str(a.max_parallel),
    }
    cfg["lift"] = {
        "q1": str(lineage.q1),
        "q2": str(lineage.q2),
        "seed": str(lineage.seed),
        "stage1": " ".join(
            f"{l},{k}:{'|'.join(map(str, perm))}:{'|'.join(map(str, offs))}"
            for l, k, perm, offs in lineage.stage1
        ),
        "stage2": " ".join(map(str, lineage.stage2)),
    }
    with open(path, "w") as fh:
        cfg.write(fh)


def _read_lineage(path: str) -> Lineage | None:
    cfg = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cfg.read_file(fh)
        rows = [
            [int(v) for v in chunk.split()]
            for chunk in cfg["basematrix"]["rows"].split(";")
        ]
        a = Basematrix(
            entries=np.array(rows, dtype=np.int64),
            max_parallel=cfg["basematrix"].getint("max_parallel"),
            bit_map=tuple(int(v) for v in cfg["basematrix"]["bit_map"].split()),
        )
        stage1 = []
        for tok in cfg["lift"]["stage1"].split():
            cell, perm, offsets = tok.split(":")
            l, k = (int(v) for v in cell.split(","))
            stage1.append(
                (
                    l,
                    k,
                    tuple(int(v) for v in perm.split("|")),
                    tuple(int(v) for v in offsets.split("|")),
                )
            )
        return Lineage(
            basematrix=a,
            q1=cfg["lift"].getint("q1"),
            q2=cfg["lift"].getint("q2"),
            seed=cfg["lift"].getint("seed"),
            stage1=tuple(stage1),
            stage2=tuple(int(v) for v in cfg["lift"]["stage2"].split()),
        )
    except FileNotFoundError:
        return None
    except (KeyError, ValueError, configparser.Error) as exc:
        raise ParseError(f"malformed lineage sidecar {path}: {exc}") from exc


def _parse_int_line(line: str, lineno: int, expect: int | None = None) -> list[int]:
    try:
        values = [int(tok) for tok in line.split()]
    except ValueError as exc:
        raise ParseError(f"non-integer token: {exc}", line=lineno) from exc
    if expect is not None and len(values) != expect:
        raise ParseError(f"expected {expect} values, found {len(values)}", line=lineno)
    return values


def import_alist(path) -> ParityCheckMatrix:
    """Parse an alist file; lineage is restored from the sidecar if present."""
    with open(path) as fh:
        raw = fh.read().splitlines()
    while raw and not raw[-1].strip():
        raw.pop()
    lines = [(i + 1, s) for i, s in enumerate(raw)]
    if len(lines) < 4:
        raise ParseError("alist needs at least 4 header lines", line=len(lines))
    n, n_rows = _parse_int_line(lines[0][1], lines[0][0], expect=2)
    if n <= 0 or n_rows <= 0:
        raise ParseError("matrix dimensions must be positive", line=lines[0][0])
    max_col, max_row = _parse_int_line(lines[1][1], lines[1][0], expect=2)
    col_deg = _parse_int_line(lines[2][1], lines[2][0], expect=n)
    row_deg = _parse_int_line(lines[3][1], lines[3][0], expect=n_rows)
    if len(lines) != 4 + n + n_rows:
        raise ParseError(
            f"expected {4 + n + n_rows} lines for {n} columns and {n_rows} rows, "
            f"found {len(lines)}",
            line=len(lines),
        )
    if col_deg and max(col_deg) != max_col:
        raise ParseError(
            f"column degree header says {max_col}, degree list peaks at {max(col_deg)}",
            line=lines[2][0],
        )
    if row_deg and max(row_deg) != max_row:
        raise ParseError(
            f"row degree header says {max_row}, degree list peaks at {max(row_deg)}",
            line=lines[3][0],
        )
    col_lists: list[list[int]] = []
    for j in range(n):
        lineno, text = lines[4 + j]
        values = _parse_int_line(text, lineno)
        nonzero = [v for v in values if v != 0]
        if len(nonzero) != col_deg[j]:
            raise ParseError(
                f"column {j + 1} lists {len(nonzero)} rows, degree list says {col_deg[j]}",
                line=lineno,
            )
        if any(not 1 <= v <= n_rows for v in nonzero):
            raise ParseError(f"column {j + 1} has a row index out of range", line=lineno)
        col_lists.append(nonzero)
    rows_acc: list[list[int]] = [[] for _ in range(n_rows)]
    for j, rows in enumerate(col_lists):
        for r in rows:
            rows_acc[r - 1].append(j)
    for i in range(n_rows):
        lineno, text = lines[4 + n + i]
        values = _parse_int_line(text, lineno)
        nonzero = sorted(v - 1 for v in values if v != 0)
        if nonzero != sorted(rows_acc[i]):
            raise ParseError(
                f"row {i + 1} disagrees with the column lists", line=lineno
            )
        if len(nonzero) != row_deg[i]:
            raise ParseError(
                f"row {i + 1} lists {len(nonzero)} columns, degree list says {row_deg[i]}",
                line=lineno,
            )
    row_ptr = np.zeros(n_rows + 1, dtype=np.int64)
    row_ptr[1:] = np.cumsum([len(r) for r in rows_acc])
    col_idx = np.concatenate([np.sort(r) for r in rows_acc]) if rows_acc else np.empty(0)
    return ParityCheckMatrix(
        n=n,
        n_rows=n_rows,
        row_ptr=row_ptr,
        col_idx=col_idx.astype(np.int64),
        lineage=_read_lineage(str(path) + ".lineage"),
    )


def random_basematrix(
    e: int, f: int, max_parallel: int, bit_map: Iterable[int], rng: np.random.Generator
) -> Basematrix:
    """Random valid basematrix; used for property tests and search seeding."""
    for _ in range(1000):
        entries = rng.integers(0, max_parallel + 1, size=(e, f))
        a = Basematrix(entries=entries, max_parallel=max_parallel, bit_map=tuple(bit_map))
        if validate(a).ok:
            return a
    raise ConstructionError("could not draw a valid basematrix in 1000 tries")
