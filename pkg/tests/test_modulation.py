"""Constellations, Gray labels, and Maxwell-Boltzmann shaping."""

from __future__ import annotations

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from protoldpc import (
    ChannelSpec,
    Constellation,
    ParameterError,
    bmd_rate,
    brgc_labels,
    maxwell_boltzmann,
    optimize_shaping,
    shaped_constellation,
    shaping_for_entropy,
    uniform_constellation,
    with_snr,
)
from oracles import shaping_scan


def test_brgc_m1() -> None:
    assert brgc_labels(1) == ["0", "1"]


def test_brgc_m3_reference_order() -> None:
    assert brgc_labels(3) == [
        "000", "001", "011", "010", "110", "111", "101", "100",
    ]


@given(st.integers(min_value=1, max_value=10))
def test_brgc_gray_property(m: int) -> None:
    labels = brgc_labels(m)
    assert len(set(labels)) == 2**m
    for a, b in zip(labels, labels[1:]):
        assert sum(x != y for x, y in zip(a, b)) == 1
    # bit 1 is the sign: 0 on the left half, 1 on the right, flipping once
    assert all(lab[0] == "0" for lab in labels[: 2 ** (m - 1)])
    assert all(lab[0] == "1" for lab in labels[2 ** (m - 1):])


@pytest.mark.parametrize("bad", [0, 17, 2.0, "3"])
def test_brgc_rejects_bad_length(bad) -> None:
    with pytest.raises(ParameterError):
        brgc_labels(bad)


def test_channel_spec_delta() -> None:
    # uniform 4-ASK has E[X^2] = 5, so delta = 1 exactly at 10 log10(5) dB
    spec = ChannelSpec(snr_db=10.0 * math.log10(5.0))
    assert spec.delta_for(5.0) == pytest.approx(1.0, abs=1e-12)
    with pytest.raises(ParameterError):
        spec.delta_for(0.0)
    with pytest.raises(ParameterError):
        ChannelSpec(snr_db=math.inf)


def test_uniform_constellation_m2() -> None:
    c = uniform_constellation(2, 10.0 * math.log10(5.0))
    assert np.array_equal(c.points, [-3.0, -1.0, 1.0, 3.0])
    assert c.labels == ("00", "01", "11", "10")
    assert c.delta == pytest.approx(1.0, abs=1e-12)
    assert c.is_uniform
    assert c.snr_db == pytest.approx(10.0 * math.log10(5.0), abs=1e-12)


def test_constellation_validation() -> None:
    base = uniform_constellation(2, 5.0)
    with pytest.raises(ParameterError):
        Constellation(m=2, delta=base.delta, points=base.points[::-1],
                      labels=base.labels, prob=base.prob)
    with pytest.raises(ParameterError):
        Constellation(m=2, delta=base.delta, points=base.points,
                      labels=("00", "11", "01", "10"), prob=base.prob)
    with pytest.raises(ParameterError):
        Constellation(m=2, delta=-1.0, points=base.points,
                      labels=base.labels, prob=base.prob)
    with pytest.raises(ParameterError):
        Constellation(m=2, delta=base.delta, points=base.points,
                      labels=base.labels, prob=np.array([0.7, 0.1, 0.1, 0.1]))
    with pytest.raises(ParameterError):
        Constellation(m=2, delta=base.delta, points=base.points,
                      labels=base.labels, prob=np.array([0.5, 0.1, 0.1, 0.3]))


def test_maxwell_boltzmann_shape() -> None:
    prob = maxwell_boltzmann(3, 0.05)
    points = np.arange(-7, 8, 2)
    assert prob.shape == (8,)
    assert prob.sum() == pytest.approx(1.0, abs=1e-12)
    assert np.allclose(prob, prob[::-1], atol=1e-15)
    # strictly decreasing in |x|
    mags = np.abs(points)
    order = np.argsort(mags, kind="stable")
    assert np.all(np.diff(prob[order]) <= 0)
    # direct formula check against exp(-nu x^2) up to normalization
    direct = np.exp(-0.05 * points.astype(float) ** 2)
    direct /= direct.sum()
    assert np.allclose(prob, direct, atol=1e-13)


def test_maxwell_boltzmann_nu_zero_is_uniform() -> None:
    assert np.allclose(maxwell_boltzmann(2, 0.0), 0.25, atol=1e-15)


def test_shaped_constellation_operating_point() -> None:
    c = shaped_constellation(4, 18.0, 0.01)
    assert c.snr_db == pytest.approx(18.0, abs=1e-10)
    assert not c.is_uniform
    assert np.allclose(c.prob, maxwell_boltzmann(4, 0.01), atol=1e-15)


def test_with_snr_rescales_only() -> None:
    c = shaped_constellation(3, 12.0, 0.03)
    moved = with_snr(c, 17.0)
    assert moved.snr_db == pytest.approx(17.0, abs=1e-10)
    assert np.array_equal(moved.prob, c.prob)
    assert moved.labels == c.labels
    assert moved.delta != c.delta


@pytest.mark.parametrize("m,target", [(2, 1.4), (4, 3.1), (6, 5.2)])
def test_shaping_for_entropy_round_trip(m: int, target: float) -> None:
    nu = shaping_for_entropy(m, target)
    prob = maxwell_boltzmann(m, nu)
    entropy = float(-np.sum(prob * np.log2(prob)))
    assert entropy == pytest.approx(target, abs=1e-9)


def test_shaping_for_entropy_rejects_unreachable() -> None:
    with pytest.raises(ParameterError):
        shaping_for_entropy(2, 2.5)
    with pytest.raises(ParameterError):
        shaping_for_entropy(2, 0.0)


@pytest.mark.parametrize("m,snr_db", [(2, 6.0), (4, 15.0)])
def test_optimize_shaping_matches_grid_scan(m: int, snr_db: float) -> None:
    nu, c = optimize_shaping(m, snr_db)
    assert c.snr_db == pytest.approx(snr_db, abs=1e-10)
    rate = bmd_rate(c).bmd_rate
    _, scan_rate = shaping_scan(m, snr_db)
    # the returned point must be at least as good as an independent grid scan
    assert rate >= scan_rate - 1e-8
    assert nu >= 0.0


@settings(max_examples=20, deadline=None)
@given(m=st.integers(min_value=1, max_value=6),
       nu=st.floats(min_value=0.0, max_value=0.5),
       snr_db=st.floats(min_value=-5.0, max_value=30.0))
def test_shaped_constellation_invariants(m: int, nu: float, snr_db: float) -> None:
    c = shaped_constellation(m, snr_db, nu)
    assert c.prob.sum() == pytest.approx(1.0, abs=1e-12)
    # outermost weights exp(-nu x^2) can underflow to exact 0 at large nu*m
    assert np.all(c.prob >= 0)
    assert np.all(c.prob > 0) or nu * (2**m - 1) ** 2 > 700
    assert c.mean_square <= float(np.max(c.points) ** 2)
    assert c.snr_db == pytest.approx(snr_db, abs=1e-9)
