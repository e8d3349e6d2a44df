"""Tests for rareseries.markers."""

import numpy as np
import pytest

from rareseries.markers import (
    SectorLayout,
    buildMarkers,
    sectorLayout,
    sparseCuts,
    subdivideGap,
)


def _cLongMinimal(m: int, r: int) -> int:
    for cLong in range(m // (r + 1) + 1):
        if (m - cLong * (r + 1)) % r == 0:
            return cLong
    raise AssertionError((m, r))


def test_subdivideGap_examples():
    assert subdivideGap(9, 3) == [3, 3, 3]
    assert subdivideGap(10, 3) == [3, 3, 4]
    assert subdivideGap(18, 4) == [4, 4, 5, 5]


def test_subdivideGap_fewest_long_pieces():
    for r in range(2, 13):
        for m in range(r * r, 3 * r * r + 1):
            lPiece = subdivideGap(m, r)
            assert sum(lPiece) == m
            assert set(lPiece) <= {r, r + 1}
            assert lPiece.count(r + 1) == _cLongMinimal(m, r)
            assert lPiece == sorted(lPiece)


def test_subdivideGap_unsolvable():
    with pytest.raises(ValueError, match="cannot be split"):
        subdivideGap(7, 4)
    with pytest.raises(ValueError):
        subdivideGap(10, 0)


def test_sparseCuts_gaps():
    for r in (3, 10, 40):
        for seed in range(5):
            aryCut = sparseCuts(100_000, r, seed)
            aryGap = np.diff(aryCut)
            assert aryGap.min() >= r * r
            assert aryGap.max() <= 2 * r * r
            assert 0 <= aryCut[0] < r * r
            assert 100_000 - aryCut[-1] <= 2 * r * r


def test_sparseCuts_deterministic():
    assert np.array_equal(sparseCuts(50_000, 7, 3), sparseCuts(50_000, 7, 3))
    assert not np.array_equal(sparseCuts(50_000, 7, 3), sparseCuts(50_000, 7, 4))


def test_sparseCuts_too_short():
    with pytest.raises(ValueError, match="too short"):
        sparseCuts(25, 5, 0)
    with pytest.raises(ValueError):
        sparseCuts(1000, 1, 0)


def test_buildMarkers_interior_gaps():
    for r in (5, 10, 20):
        for seed in range(5):
            markers = buildMarkers(1_000_000, r, seed)
            assert set(np.unique(markers.aryGap()).tolist()) <= {r, r + 1}
            assert markers.iHead == sparseCuts(1_000_000, r, seed)[0]
            assert markers.nEdge() == markers.iHead + 1_000_000 - markers.iTail
            assert markers.nEdge() < 3 * r * r


def test_buildMarkers_lands_on_cuts():
    markers = buildMarkers(200_000, 9, 2)
    aryCut = sparseCuts(200_000, 9, 2)
    assert np.isin(aryCut, markers.aryPos).all()


def test_sectorLayout_nests_in_markers():
    markers = buildMarkers(400_000, 10, 1)
    layout = sectorLayout(markers, nR1=4000, nSector=4, nSectorLength=1000)

    assert np.isin(layout.aryR1Pos, markers.aryPos).all()
    aryGapR1 = np.diff(layout.aryR1Pos)
    assert np.abs(aryGapR1 - 4000).max() <= 11
    assert layout.cSpan == aryGapR1.size
    assert layout.nEdge() == layout.iLo + 400_000 - layout.iHi


def test_sectorLayout_too_short():
    markers = buildMarkers(1000, 5, 0)
    with pytest.raises(ValueError, match="no complete span"):
        sectorLayout(markers, nR1=5000, nSector=2, nSectorLength=2500)


def test_SectorLayout_sectorOf():
    layout = SectorLayout(
        aryR1Pos=np.array([10, 50, 90]), nSector=3, nSectorLength=12, nLength=100
    )
    arySpan, arySector = layout.sectorOf(np.array([5, 10, 21, 22, 45, 49, 50, 89, 90]))

    # The last sector absorbs the remainder; positions from the last r1-marker on are outside.

    assert arySpan.tolist() == [-1, 0, 0, 0, 0, 0, 1, 1, -1]
    assert arySector.tolist() == [-1, 0, 0, 1, 2, 2, 0, 2, -1]
    assert layout.nEdge() == 20
