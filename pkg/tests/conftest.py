"""Shared fixtures: reference designs, a small lifted code, result recording."""

from __future__ import annotations

import numpy as np
import pytest

from protoldpc import Basematrix, build_encoder, lift


@pytest.fixture(scope="session")
def base_r12() -> Basematrix:
    """Rate-1/2 design for 4-ASK, amplitude columns first, sign group last."""
    entries = np.array(
        [
            [2, 1, 1, 2, 1, 4],
            [1, 1, 1, 2, 2, 5],
            [1, 0, 0, 1, 0, 6],
        ]
    )
    return Basematrix(entries=entries, max_parallel=6, bit_map=(2, 2, 2, 1, 1, 1))


@pytest.fixture(scope="session")
def base_r34() -> Basematrix:
    """Rate-3/4 design for 4-ASK."""
    entries = np.array(
        [
            [1, 1, 1, 1, 6, 6, 1, 1],
            [1, 1, 2, 2, 6, 6, 2, 2],
        ]
    )
    return Basematrix(
        entries=entries, max_parallel=6, bit_map=(2, 2, 2, 2, 1, 1, 1, 1)
    )


@pytest.fixture(scope="session")
def base_r56() -> Basematrix:
    """Rate-5/6 design for 64-ASK with shaped input, two columns per level."""
    entries = np.array(
        [
            [2, 2, 2, 1, 2, 2, 6, 2, 2, 0, 6, 6],
            [1, 1, 1, 2, 1, 1, 6, 1, 0, 2, 6, 6],
        ]
    )
    return Basematrix(
        entries=entries,
        max_parallel=6,
        bit_map=(2, 2, 3, 3, 4, 4, 5, 5, 6, 6, 1, 1),
    )


@pytest.fixture(scope="session")
def small_lift(base_r12):
    """n = 2520 quasi-cyclic expansion of the rate-1/2 design."""
    return lift(base_r12, 12, 35, seed=7)


@pytest.fixture(scope="session")
def small_codec(small_lift):
    return build_encoder(small_lift)


_ACCEPTANCE: list[str] = []


@pytest.fixture
def record_criterion():
    """Collect one human-readable pass/fail line per acceptance criterion."""

    def _record(name: str, ok: bool, detail: str) -> None:
        _ACCEPTANCE.append(f"{'PASS' if ok else 'FAIL'} {name}: {detail}")

    return _record


def pytest_terminal_summary(terminalreporter) -> None:
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
