"""Batch front-end tying the pipeline together.

Five subcommands: ``analyze`` (bit-channel rate profiles over an SNR grid),
``threshold`` (PEXIT threshold and gap report for a basematrix), ``optimize``
(differential-evolution search), ``lift`` (quasi-cyclic expansion to alist),
and ``simulate`` (Monte Carlo BER/FER from an alist). Commands are pure given
(inputs, seed); every CSV artifact embeds the resolved configuration as
leading comment lines so stripping "# " reproduces the config that made it.
"""

from __future__ import annotations

import argparse
import configparser
import csv
import sys

import numpy as np

from . import codec, infotheory, modulation, optimizer, pexit, protograph, surrogate
from .errors import ParameterError, ParseError, ProtoLdpcError

_EXIT_CODES = {
    "internal": 1,
    "parameter": 2,
    "parse": 3,
    "construction": 4,
    "numeric": 5,
    "degenerate-level": 5,
    "bracket": 6,
    "search": 7,
    "io": 8,
}

# limit searches scan a generous SNR window; ASK rates saturate inside it
_LIMIT_BRACKET_DB = (-10.0, 50.0)


def _load_config(path: str, section: str) -> configparser.SectionProxy:
    cfg = configparser.ConfigParser()
    try:
        with open(path) as fh:
            cfg.read_file(fh)
    except configparser.Error as exc:
        raise ParseError(f"malformed config {path}: {exc}") from exc
    if section not in cfg:
        raise ParseError(f"config {path} is missing the [{section}] section")
    return cfg[section]


def _take(section: configparser.SectionProxy, known: dict):
    """Parse known keys, rejecting unknown ones by name."""
    unknown = sorted(set(section) - set(known))
    if unknown:
        raise ParameterError(f"unknown config key: {', '.join(unknown)}")
    values = {}
    for key, (conv, default) in known.items():
        if key in section:
            raw = section[key]
            try:
                values[key] = conv(raw)
            except ValueError as exc:
                raise ParameterError(f"config key {key} = {raw!r}: {exc}") from exc
        elif default is _REQUIRED:
            raise ParameterError(f"config key {key} is required")
        else:
            values[key] = default
    return values


_REQUIRED = object()


def _mode(raw: str) -> str:
    if raw not in ("uniform", "mb"):
        raise ValueError("expected 'uniform' or 'mb'")
    return raw


def _snr_grid(values: dict) -> np.ndarray:
    start = values["snr_db_start"]
    stop = values["snr_db_stop"]
    step = values["snr_db_step"]
    if step <= 0:
        raise ParameterError(f"snr_db_step must be positive, got {step!r}")
    if stop < start:
        raise ParameterError(f"empty SNR grid: start {start} > stop {stop}")
    count = int(round((stop - start) / step)) + 1
    grid = start + step * np.arange(count)
    return grid[grid <= stop + 1e-9]


def _config_echo(section: str, values: dict) -> list[str]:
    lines = [f"# [{section}]"]
    for key, val in values.items():
        if val is not None:
            lines.append(f"# {key} = {val}")
    return lines


def _open_out(path: str | None):
    return open(path, "w", newline="") if path else sys.stdout


def _write_rows(handle, echo: list[str], header: list[str], rows) -> None:
    for line in echo:
        handle.write(line + "\n")
    writer = csv.writer(handle)
    writer.writerow(header)
    for row in rows:
        writer.writerow(row)


def _fmt(value) -> str:
    return repr(float(value)) if isinstance(value, float) else str(value)


def _read_basematrix_file(path: str) -> protograph.Basematrix:
    section = _load_config(path, "basematrix")
    try:
        rows = [
            [int(v) for v in chunk.split()] for chunk in section["rows"].split(";")
        ]
        return protograph.Basematrix(
            entries=np.array(rows, dtype=np.int64),
            max_parallel=int(section["max_parallel"]),
            bit_map=tuple(int(v) for v in section["bit_map"].split()),
        )
    except (KeyError, ValueError) as exc:
        raise ParseError(f"malformed basematrix file {path}: {exc}") from exc


def _write_basematrix_file(a: protograph.Basematrix, path: str) -> None:
    cfg = configparser.ConfigParser()
    cfg["basematrix"] = {
        "rows": "; ".join(" ".join(map(str, row)) for row in a.entries.tolist()),
        "bit_map": " ".join(map(str, a.bit_map)),
        "max_parallel": str(a.max_parallel),
    }
    with open(path, "w") as fh:
        cfg.write(fh)


def _family_for(mode: str, m: int, rate_bits: float | None, code_rate: float):
    if mode == "uniform":
        return surrogate.uniform_family(m)
    if rate_bits is None:
        raise ParameterError("mb mode needs the rate_bits config key")
    return surrogate.shaped_family(m, rate_bits, code_rate)


def cmd_analyze(args) -> int:
    section = _load_config(args.config, "analyze")
    values = _take(
        section,
        {
            "m": (int, _REQUIRED),
            "mode": (_mode, _REQUIRED),
            "snr_db_start": (float, _REQUIRED),
            "snr_db_stop": (float, _REQUIRED),
            "snr_db_step": (float, _REQUIRED),
        },
    )
    m, mode = values["m"], values["mode"]
    grid = _snr_grid(values)
    header = ["snr_db", "input_entropy_bits"]
    header += [f"cond_entropy_b{i}_bits" for i in range(1, m + 1)]
    header += ["bmd_rate_bits", "symbol_mi_bits", "awgn_capacity_bits"]
    if mode == "mb":
        header += ["nu", "delta_linear"]
    rows = []
    for snr_db in grid:
        if mode == "uniform":
            c = modulation.uniform_constellation(m, float(snr_db))
            extra = []
        else:
            nu, c = modulation.optimize_shaping(m, float(snr_db))
            extra = [_fmt(nu), _fmt(c.delta)]
        profile = infotheory.bmd_rate(c)
        row = [_fmt(float(snr_db)), _fmt(profile.joint_input_entropy)]
        row += [_fmt(h) for h in profile.per_level_entropy]
        row += [
            _fmt(profile.bmd_rate),
            _fmt(infotheory.symbol_mi(c)),
            _fmt(infotheory.awgn_capacity(float(snr_db))),
        ]
        rows.append(row + extra)
    handle = _open_out(args.out)
    try:
        _write_rows(handle, _config_echo("analyze", values), header, rows)
    finally:
        if args.out:
            handle.close()
    return 0


def cmd_threshold(args) -> int:
    a = _read_basematrix_file(args.basematrix)
    values = {"mode": "uniform", "rate_bits": None, "lo_db": None, "hi_db": None}
    if args.config:
        section = _load_config(args.config, "threshold")
        values = _take(
            section,
            {
                "mode": (_mode, "uniform"),
                "rate_bits": (float, None),
                "lo_db": (float, None),
                "hi_db": (float, None),
            },
        )
    m = a.num_levels
    family = _family_for(values["mode"], m, values["rate_bits"], a.rate)
    if values["mode"] == "uniform":
        rate_bits = infotheory.transmission_rate(a.rate, family.constellation(10.0))
    else:
        rate_bits = float(values["rate_bits"])
    limit_db = surrogate.bmd_limit_snr(family, rate_bits, *_LIMIT_BRACKET_DB)
    lo = values["lo_db"] if values["lo_db"] is not None else limit_db - 0.2
    hi = values["hi_db"] if values["hi_db"] is not None else limit_db + 3.0
    threshold_db = pexit.threshold(a, family, lo, hi)
    print("[threshold]")
    print(f"mode = {values['mode']}")
    print(f"rate_bits = {_fmt(rate_bits)}")
    print(f"lo_db = {_fmt(lo)}")
    print(f"hi_db = {_fmt(hi)}")
    print("[report]")
    print(f"threshold_db = {_fmt(threshold_db)}")
    print(f"bmd_limit_db = {_fmt(limit_db)}")
    print(f"gap_db = {_fmt(threshold_db - limit_db)}")
    return 0


def cmd_optimize(args) -> int:
    section = _load_config(args.config, "optimize")
    values = _take(
        section,
        {
            "e": (int, _REQUIRED),
            "f": (int, _REQUIRED),
            "s_max": (int, _REQUIRED),
            "m": (int, _REQUIRED),
            "mode": (_mode, "uniform"),
            "rate_bits": (float, None),
            "snr_lo_db": (float, _REQUIRED),
            "snr_hi_db": (float, _REQUIRED),
            "population": (int, 40),
            "generations": (int, 200),
            "weight": (float, 0.8),
            "crossover": (float, 0.9),
            "seed": (int, 0),
        },
    )
    if args.seed is not None:
        values["seed"] = args.seed
    code_rate = (values["f"] - values["e"]) / values["f"]
    family = _family_for(values["mode"], values["m"], values["rate_bits"], code_rate)
    spec = optimizer.SearchSpec(
        e=values["e"],
        f=values["f"],
        s_max=values["s_max"],
        m=values["m"],
        snr_lo_db=values["snr_lo_db"],
        snr_hi_db=values["snr_hi_db"],
        shaped=values["mode"] == "mb",
        population=values["population"],
        generations=values["generations"],
        weight=values["weight"],
        crossover=values["crossover"],
        seed=values["seed"],
    )
    result = optimizer.optimize(spec, family)
    if args.out:
        _write_basematrix_file(result.basematrix, args.out)
        history_path = args.out + ".history.csv"
        with open(history_path, "w", newline="") as fh:
            echo = _config_echo("optimize", values)
            _write_rows(
                fh,
                echo,
                ["generation", "best_threshold_db", "mean_threshold_db"],
                [
                    [p.generation, _fmt(p.best_db), _fmt(p.mean_db)]
                    for p in result.history
                ],
            )
    print("[report]")
    print(f"threshold_db = {_fmt(result.threshold_db)}")
    print(f"rows = {'; '.join(' '.join(map(str, r)) for r in result.basematrix.entries.tolist())}")
    return 0


def cmd_lift(args) -> int:
    a = _read_basematrix_file(args.basematrix)
    q1, q2 = protograph.choose_stage_sizes(a, args.n)
    h = protograph.lift(a, q1, q2, args.seed, min_girth=args.min_girth, deg2_floor=16)
    protograph.export_alist(h, args.out)
    print("[report]")
    print(f"n = {h.n}")
    print(f"n_rows = {h.n_rows}")
    print(f"q1 = {q1}")
    print(f"q2 = {q2}")
    print(f"girth_ge_6 = {not protograph.has_four_cycles(h)}")
    return 0


def cmd_simulate(args) -> int:
    h = protograph.import_alist(args.alist)
    section = _load_config(args.config, "simulate")
    values = _take(
        section,
        {
            "mode": (_mode, "uniform"),
            "m": (int, _REQUIRED),
            "rate_bits": (float, None),
            "snr_db_start": (float, _REQUIRED),
            "snr_db_stop": (float, _REQUIRED),
            "snr_db_step": (float, _REQUIRED),
            "max_iter": (int, 100),
            "min_frame_errors": (int, 100),
            "max_frames": (int, 10_000_000),
            "seed": (int, 0),
            "jobs": (int, 1),
        },
    )
    if args.seed is not None:
        values["seed"] = args.seed
    if args.jobs is not None:
        values["jobs"] = args.jobs
    m = values["m"]
    if values["mode"] == "uniform":
        c = modulation.uniform_constellation(m, 10.0)
    else:
        if h.lineage is None:
            raise ParameterError("shaped simulation needs an alist with a lineage sidecar")
        family = _family_for("mb", m, values["rate_bits"], h.lineage.basematrix.rate)
        c = family.constellation(10.0)
    ctx = codec.build_encoder(h)
    grid = _snr_grid(values)
    report = codec.simulate(
        ctx,
        c,
        [float(s) for s in grid],
        stop={
            "min_frame_errors": values["min_frame_errors"],
            "max_frames": values["max_frames"],
        },
        max_iter=values["max_iter"],
        seed=values["seed"],
        jobs=values["jobs"],
    )
    handle = _open_out(args.out)
    try:
        echo = _config_echo("simulate", values)
        for line in echo:
            handle.write(line + "\n")
        report.to_csv(handle)
    finally:
        if args.out:
            handle.close()
    return 0


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="protoldpc",
        description="Protograph LDPC design for ASK constellations",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="bit-channel rate profile over an SNR grid")
    p.add_argument("--config", required=True)
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("threshold", help="PEXIT threshold and gap for a basematrix")
    p.add_argument("basematrix", help="basematrix config file")
    p.add_argument("--config", default=None)
    p.set_defaults(func=cmd_threshold)

    p = sub.add_parser("optimize", help="differential-evolution basematrix search")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="overrides the config seed (default 0)")
    p.add_argument("--out", default=None, help="basematrix output path")
    p.set_defaults(func=cmd_optimize)

    p = sub.add_parser("lift", help="quasi-cyclic expansion to an alist file")
    p.add_argument("basematrix", help="basematrix config file")
    p.add_argument("--n", type=int, required=True, help="target blocklength")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--min-girth", type=int, default=6, dest="min_girth")
    p.add_argument("--out", required=True, help="alist output path")
    p.set_defaults(func=cmd_lift)

    p = sub.add_parser("simulate", help="Monte Carlo BER/FER from an alist")
    p.add_argument("alist", help="parity-check matrix in alist form")
    p.add_argument("--config", required=True)
    p.add_argument("--seed", type=int, default=None,
                   help="overrides the config seed (default 0)")
    p.add_argument("--jobs", type=int, default=None,
                   help="overrides the config worker count (default 1)")
    p.add_argument("--out", default=None, help="CSV path (default stdout)")
    p.set_defaults(func=cmd_simulate)

    return parser


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        return args.func(args)
    except ProtoLdpcError as exc:
        print(f"error: {exc.category}: {exc}", file=sys.stderr)
        return _EXIT_CODES.get(exc.category, 1)
    except OSError as exc:
        print(f"error: io: {exc}", file=sys.stderr)
        return _EXIT_CODES["io"]


if __name__ == "__main__":
    sys.exit(main())
