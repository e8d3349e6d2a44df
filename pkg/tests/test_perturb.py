"""Tests for rareseries.perturb."""

import numpy as np
import pytest

from rareseries.perturb import (
    PerturbationPlan,
    WFamily,
    cChangeOutsideWrites,
    cCodeAvailable,
    familyFromStrings,
    familyOccurrences,
    makeWFamily,
    overlapTriples,
    perturb,
    planFromMapping,
)
from rareseries.symbols import SymbolSequence


def test_makeWFamily_shape():
    family = makeWFamily(2, 7, seed=0)
    assert len(family) == 2
    assert family.m == 3
    lStrW = family.lStrW()
    assert len(set(lStrW)) == 2
    for strW in lStrW:
        assert len(strW) == 7
        assert strW[0] == "1"
        assert strW[3:] == "1000"
        assert strW[1:3] != "00"


def test_makeWFamily_deterministic_in_seed():
    assert makeWFamily(5, 11, seed=3).lCodePrime == makeWFamily(5, 11, seed=3).lCodePrime


def test_makeWFamily_prefers_blocks_rare_in_base():
    # Plant W' = 01 many times; the family must avoid it while others remain.

    seqBase = SymbolSequence.fromString("1011000" * 50)
    family = makeWFamily(2, 7, seed=0, seqBase=seqBase)
    assert 1 not in family.lCodePrime


def test_makeWFamily_errors():
    assert cCodeAvailable(7) == 3
    with pytest.raises(ValueError, match="allows only 3"):
        makeWFamily(4, 7, seed=0)
    with pytest.raises(ValueError, match="odd"):
        makeWFamily(2, 8, seed=0)
    with pytest.raises(ValueError, match="odd"):
        makeWFamily(1, 3, seed=0)


def test_overlapTriples_none_at_full_size():
    for nL in (7, 9, 11, 13):
        family = makeWFamily(cCodeAvailable(nL), nL, seed=1)
        assert overlapTriples(family) == []


def test_overlapTriples_detects_overlap():
    # Blocks outside the family shape do overlap; the check must see it.

    aryW = np.array([[1, 0, 1, 0, 1, 0, 1]], dtype=np.uint8)
    family = WFamily(nL=7, aryW=aryW, lCodePrime=[0])
    assert (0, 0, 2) in overlapTriples(family)


def test_familyFromStrings():
    family = familyFromStrings(["1011000", "1101000"])
    assert family.lCodePrime == [1, 2]
    assert familyFromStrings(family.lStrW()).lCodePrime == [1, 2]

    familyMade = makeWFamily(8, 11, seed=4)
    assert familyFromStrings(familyMade.lStrW()).lCodePrime == familyMade.lCodePrime


def test_familyFromStrings_errors():
    with pytest.raises(ValueError, match="all-zero"):
        familyFromStrings(["1001000"])
    with pytest.raises(ValueError, match="not of the form"):
        familyFromStrings(["1010100"])
    with pytest.raises(ValueError, match="distinct"):
        familyFromStrings(["1011000", "1011000"])
    with pytest.raises(ValueError, match="one length"):
        familyFromStrings(["1011000", "101100000"])
    with pytest.raises(ValueError):
        familyFromStrings([])


def test_familyOccurrences():
    family = familyFromStrings(["1011000", "1101000"])

    # 1111000 has the family shape but its W' is not in the family.

    seq = SymbolSequence.fromString("0" + "1101000" + "00" + "1011000" + "1111000")
    aryStart, aryK = familyOccurrences(seq.arySymbol, family)
    assert aryStart.tolist() == [1, 10]
    assert aryK.tolist() == [1, 0]


def test_PerturbationPlan_derived():
    plan = PerturbationPlan(gEpsilon=0.5, gDelta=0.6, nL=11, r=40, nM=4000)
    assert plan.nK == 8
    assert plan.nR1 == 32000
    assert plan.nN == 82


def test_PerturbationPlan_refuses_small_r():
    with pytest.raises(ValueError, match="too small"):
        PerturbationPlan(gEpsilon=0.5, gDelta=0.6, nL=11, r=30, nM=4000)


def test_PerturbationPlan_validation():
    with pytest.raises(ValueError, match="N = 50 is too small"):
        PerturbationPlan(gEpsilon=0.5, gDelta=0.6, nL=11, r=40, nM=4000, nN=50)
    with pytest.raises(ValueError, match="Sector length"):
        PerturbationPlan(gEpsilon=0.5, gDelta=0.6, nL=11, r=40, nM=50)
    with pytest.raises(ValueError, match="increase L"):
        PerturbationPlan(gEpsilon=0.1, gDelta=0.6, nL=11, r=40, nM=4000)
    with pytest.raises(ValueError, match="epsilon"):
        PerturbationPlan(gEpsilon=1.0, gDelta=0.6, nL=11, r=40, nM=4000)
    with pytest.raises(ValueError, match="delta"):
        PerturbationPlan(gEpsilon=0.5, gDelta=0.0, nL=11, r=40, nM=4000)


def test_planFromMapping():
    plan = PerturbationPlan(gEpsilon=0.5, gDelta=0.6, nL=11, r=40, nM=4000, nN=90, seed=3)
    mp = plan.mpToMapping()
    assert mp["K"] == 8
    assert mp["r1"] == 32000
    assert planFromMapping(mp) == plan

    with pytest.raises(ValueError, match="Unknown plan keys: colour"):
        planFromMapping({**mp, "colour": 1})
    with pytest.raises(ValueError, match="missing keys: M"):
        planFromMapping({"epsilon": 0.5, "delta": 0.6, "L": 11, "r": 40})


def test_cChangeOutsideWrites():
    seqBefore = SymbolSequence.fromString("0000000000")
    seqAfter = SymbolSequence.fromString("0110000001")
    assert cChangeOutsideWrites(seqBefore, seqAfter, np.array([0]), 5) == 1
    assert cChangeOutsideWrites(seqBefore, seqAfter, np.array([0, 7]), 3) == 0


def test_perturb_change_within_bound(seqDeskBase, planDesk, resultDesk):
    report = resultDesk.report
    assert resultDesk.gChangeFraction > 0.0
    assert resultDesk.gChangeFraction <= report.gBound
    assert resultDesk.gChangeFraction <= planDesk.gDelta + report.gEdgeTerm
    assert report.gBoundMarker == pytest.approx(11 / 40)

    nL = planDesk.nL
    assert cChangeOutsideWrites(seqDeskBase, resultDesk.seq, resultDesk.aryWriteStart, nL) == 0
    assert report.cChangedMarker + report.cChangedFamily >= int(
        np.count_nonzero(seqDeskBase.arySymbol != resultDesk.seq.arySymbol)
    )


def test_perturb_report_counts(planDesk, resultDesk):
    report = resultDesk.report
    assert report.cSpan >= 60
    assert len(report.lCWrittenPerSector) == planDesk.nK
    assert sum(report.lCWrittenPerSector) == report.cMarkerWritten
    assert min(report.lCWrittenPerSector) > 0
    assert sum(report.lCReplacedPerSector) == report.cReplaced
    assert report.lStrW == resultDesk.family.lStrW()
    assert report.nEdge == report.iLo + len(resultDesk.seq) - report.iHi


def test_perturb_leaves_edges(seqDeskBase, resultDesk):
    iLo, iHi = resultDesk.report.iLo, resultDesk.report.iHi
    arySymOld = seqDeskBase.arySymbol
    arySymNew = resultDesk.seq.arySymbol
    assert np.array_equal(arySymOld[:iLo], arySymNew[:iLo])
    assert np.array_equal(arySymOld[iHi:], arySymNew[iHi:])


def test_perturb_no_stray_family_blocks(planDesk, resultDesk):
    layout = resultDesk.layout
    aryStart, aryK = familyOccurrences(resultDesk.seq.arySymbol, resultDesk.family)
    fInside = (aryStart >= layout.iLo) & (aryStart + planDesk.nL <= layout.iHi)
    _, arySector = layout.sectorOf(aryStart[fInside])
    assert np.array_equal(aryK[fInside], arySector)


def test_perturb_rerun_is_noop(planDesk, resultDesk):
    resultAgain = perturb(resultDesk.seq, planDesk, family=resultDesk.family)
    assert resultAgain.report.cReplaced == 0
    assert resultAgain.gChangeFraction == 0.0
    assert np.array_equal(resultAgain.seq.arySymbol, resultDesk.seq.arySymbol)


def test_perturb_family_must_fit_plan(seqDeskBase, planDesk):
    with pytest.raises(ValueError, match="does not fit"):
        perturb(seqDeskBase, planDesk, family=makeWFamily(2, 11, seed=0))
