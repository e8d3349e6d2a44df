"""Tests for rareseries.verify."""

import numpy as np
import pytest

from rareseries.markers import SectorLayout
from rareseries.processes import ProcessSpec, generate
from rareseries.recurrence import ecdfFromSamples, entryTimes, returnGaps
from rareseries.symbols import (
    Block,
    OccurrenceList,
    SymbolSequence,
    blockGroups,
    scanOccurrences,
)
from rareseries.verify import (
    aryEntryAtEpsilon,
    aryReturnAtEpsilon,
    entryCdfAt,
    summarizeLength,
    verifyTheorem,
)


def test_entryCdfAt_example():
    # Origins 0..4 wait 3, 2, 1, 2, 1; normalized by mu = 1/2 two of five are <= 0.9.

    seq = SymbolSequence.fromString("0100101")
    occ = scanOccurrences(seq, Block.fromString("01"))
    assert entryCdfAt(occ, 0.9) == pytest.approx(0.4)

    with pytest.raises(ValueError, match="at least 2"):
        entryCdfAt(occ, 0.9, iLo=4)


def test_atEpsilon_matches_recurrence_cdfs():
    rng = np.random.default_rng(8)
    seq = SymbolSequence.fromSymbols(rng.integers(0, 2, size=500))
    gEpsilon = 0.37

    for n in (2, 3, 5):
        groups = blockGroups(seq, n).filtered(2)
        aryEntry = aryEntryAtEpsilon(groups, 0, len(seq), gEpsilon)
        aryReturn = aryReturnAtEpsilon(groups, 0, len(seq), gEpsilon)

        for iGroup in range(len(groups)):
            occ = OccurrenceList(groups.aryPosOfGroup(iGroup).copy(), len(seq), n)
            iFirst = int(occ.aryPos[0])
            block = Block(seq.alphabet, seq.arySymbol[iFirst : iFirst + n])

            gaps = returnGaps(occ)
            cdfReturn = ecdfFromSamples(gaps.aryGap, gaps.gMuHat, "return")
            entry = entryTimes(seq, block, occ)
            cdfEntry = ecdfFromSamples(entry.aryTime, gaps.gMuHat, "entry")

            assert aryEntry[iGroup] == pytest.approx(cdfEntry(gEpsilon))
            assert aryReturn[iGroup] == pytest.approx(cdfReturn(gEpsilon))


def test_summarizeLength_visit_counts():
    # Cells: 0 visits sector 0 seven times and sector 1 nine times; 1 visits them 3 and 1 times.

    seq = SymbolSequence.fromString("0111000000" + "0010000000")
    layout = SectorLayout(aryR1Pos=np.array([0, 20]), nSector=2, nSectorLength=10, nLength=20)

    summary = summarizeLength(seq, 1, 0, 20, 2, 0.5, layout=layout)
    assert summary.cBlock == 2
    assert summary.cVisitMin == 1
    assert summary.gVisitMedian == 5.0


def test_verifyTheorem_perturbed_passes(planDesk, resultDesk):
    report = verifyTheorem(resultDesk.seq, planDesk, 82, 86, 600, 0.5)

    assert report.fPass
    assert report.gThreshold == pytest.approx(0.25)
    assert report.gWorstValue < 0.25
    assert report.gWorstValue == report.gWorstEntry
    assert report.cBlockTotal > 0
    assert report.iLo == resultDesk.report.iLo
    assert report.nEdge == resultDesk.report.nEdge
    assert [summary.n for summary in report.lLength] == [82, 83, 84, 85, 86]

    # Long blocks visit their sector in bursts of many occurrences.

    summary = report.lLength[0]
    assert summary.cVisitMin is not None
    assert summary.gVisitMedian is not None and summary.gVisitMedian >= 10


def test_verifyTheorem_unperturbed_fails(seqDeskBase):
    # Blocks holding a single 1 are nearly exponential: F(0.5) is close to 1 - exp(-0.5).

    report = verifyTheorem(seqDeskBase, None, 82, 86, 600, 0.5)
    assert not report.fPass
    assert report.gWorstValue >= 0.3
    assert report.strWorstBlock.count("1") == 1
    assert report.iLo == 0
    assert report.nEdge == 0


def test_verifyTheorem_return_reading(planDesk, resultDesk):
    # Return gaps inside a burst are one marker apart, so the return reading is near 1.

    report = verifyTheorem(resultDesk.seq, planDesk, 82, 83, 600, 0.5, strStatistic="return")
    assert report.strStatistic == "return"
    assert report.gWorstValue == report.gWorstReturn
    assert report.gWorstValue > 0.9
    assert not report.fPass


def test_verifyTheorem_threads_agree(planDesk, resultDesk):
    reportSerial = verifyTheorem(resultDesk.seq, planDesk, 82, 84, 600, 0.5)
    reportParallel = verifyTheorem(resultDesk.seq, planDesk, 82, 84, 600, 0.5, nThreads=3)
    assert reportParallel == reportSerial


def test_verifyTheorem_clamps_range(capsys):
    seq = SymbolSequence.fromString("01" * 500)
    report = verifyTheorem(seq, None, 2, 10, 2, 0.5)
    assert report.fClamped
    assert report.nMax == 4
    assert len(report.lLength) == 3
    assert "Warning: N_hi = 10 exceeds N**2 = 4; clamped." in capsys.readouterr().err


def test_verifyTheorem_no_qualifying_blocks():
    seq = generate(ProcessSpec("iid", seed=2, lGProb=(0.5, 0.5)), 20_000)
    with pytest.raises(ValueError, match="No block of length"):
        verifyTheorem(seq, None, 30, 32, 600, 0.5)


def test_verifyTheorem_argument_errors(planDesk, resultDesk):
    seq = SymbolSequence.fromString("01" * 50)
    with pytest.raises(ValueError, match="min_count"):
        verifyTheorem(seq, None, 2, 3, 1, 0.5)
    with pytest.raises(ValueError, match="Statistic"):
        verifyTheorem(seq, None, 2, 3, 2, 0.5, strStatistic="hitting")
    with pytest.raises(ValueError, match="epsilon"):
        verifyTheorem(seq, None, 2, 3, 2, 1.5)
    with pytest.raises(ValueError, match="length range"):
        verifyTheorem(seq, None, 3, 2, 2, 0.5)
    with pytest.raises(ValueError, match="threshold 82"):
        verifyTheorem(resultDesk.seq, planDesk, 40, 50, 600, 0.5)
