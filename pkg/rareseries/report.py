"""JSON records and CSV tables for every analysis result.

JSON is the canonical output. CSV covers only the flat tables: ECDF
steps and classifier margins.
"""

import csv
import dataclasses
import json
import sys
from pathlib import Path
from typing import Any

import numpy as np

from . import __version__
from .ingest import BurstReport
from .laws import (
    EXP_LAW,
    G_EPSILON_DEFAULT,
    LG_T_GRID_DEFAULT,
    ClusterVerdict,
    EntropyBoundReport,
    checkEntropyBound,
    classify,
    starResidual,
)
from .perturb import PerturbationPlan, PlanReport
from .recurrence import (
    ClusterStats,
    clusterStats,
    ecdfFromSamples,
    entryTimes,
    kacStatistic,
    ksDistance,
    returnGaps,
)
from .symbols import Block, OccurrenceList, SymbolSequence
from .verify import LengthSummary, VerificationReport

LSTR_FORMAT = ("json", "csv")

LSTR_CSV_HEADER = ("block", "table", "t", "value", "verdict")

STR_CSV_CONFIG_PREFIX = "# config "


def mpCluster(stats: ClusterStats) -> dict[str, object]:
    return {
        "t": stats.gT,
        "window": stats.nWindow,
        "mean_I": stats.gMeanI,
        "p_pos": stats.gPPos,
        "mean_I_given_pos": stats.gMeanIGivenPos,
    }


def mpVerdict(verdict: ClusterVerdict) -> dict[str, object]:
    return {
        "verdict": verdict.strOverall,
        "margins": verdict.lPairMargin,
        "verdicts": verdict.lStrVerdict,
        "tolerance": verdict.gTol,
        "reference": verdict.strReference,
        "strong": verdict.fStrong,
        "epsilon": verdict.gEpsilon,
        "F_entry_eps": verdict.gFEntryEps,
        "F_return_eps": verdict.gFReturnEps,
    }


def mpEntropyBound(bound: EntropyBoundReport) -> dict[str, object]:
    return {
        "max_excess": bound.gMaxExcess,
        "t_at_max": bound.gTAtMax,
        "tolerance": bound.gTol,
        "flagged": bound.fFlagged,
        "entropy_rate": bound.gEntropyRate,
        "zero_entropy_exception": bound.fZeroEntropyException,
        "caveat": bound.strCaveat,
    }


def mpBlockStats(
    seq: SymbolSequence,
    block: Block,
    occ: OccurrenceList,
    lT: list[float] | tuple[float, ...] = LG_T_GRID_DEFAULT,
    gEpsilon: float = G_EPSILON_DEFAULT,
    nStride: int = 1,
    gEntropyRate: float | None = None,
) -> dict[str, object]:
    """The statistics record of one block: recurrence statistics plus the verdict.

    Needs at least 2 occurrences. Window statistics are skipped for t
    whose window does not fit the sequence.
    """

    gaps = returnGaps(occ)
    entry = entryTimes(seq, block, occ, nStride)
    cdfReturn = ecdfFromSamples(gaps.aryGap, gaps.gMuHat, "return")
    cdfEntry = ecdfFromSamples(entry.aryTime, gaps.gMuHat, "entry")

    verdict = classify(
        cdfEntry, lT=lT, gEpsilon=gEpsilon, cSample=len(gaps), cdfReturn=cdfReturn
    )
    bound = checkEntropyBound(cdfEntry, verdict.gTol, max(lT), gEntropyRate)

    lMpCluster: list[dict[str, object]] = []
    for t in lT:
        if t <= 0.0 or int(t / gaps.gMuHat) + 1 > occ.cSlot():
            continue
        lMpCluster.append(mpCluster(clusterStats(seq, block, occ, t, nStride)))

    return {
        "block": block.strPattern(),
        "n": len(block),
        "count": len(occ),
        "mu_hat": gaps.gMuHat,
        "kac": kacStatistic(gaps),
        "ecdf_return": cdfReturn.lPairStep(),
        "ecdf_entry": cdfEntry.lPairStep(),
        "censored": entry.cCensored,
        "star_residual": starResidual(cdfEntry, cdfReturn, max(lT)),
        "ks_entry": ksDistance(cdfEntry, EXP_LAW),
        "ks_return": ksDistance(cdfReturn, EXP_LAW),
        "cluster": lMpCluster,
        **mpVerdict(verdict),
        "entropy_bound": mpEntropyBound(bound),
    }


def mpPlanReport(plan: PerturbationPlan, report: PlanReport) -> dict[str, object]:
    return {
        "plan": plan.mpToMapping(),
        "markers": {
            "r_markers": report.cMarker,
            "r_markers_written": report.cMarkerWritten,
            "r1_markers": report.cR1Marker,
            "spans": report.cSpan,
        },
        "region": [report.iLo, report.iHi],
        "edge": report.nEdge,
        "family": report.lStrW,
        "written_per_sector": report.lCWrittenPerSector,
        "replacements_per_sector": report.lCReplacedPerSector,
        "replacements": report.cReplaced,
        "straddles": report.cStraddle,
        "changed_by_markers": report.cChangedMarker,
        "changed_by_replacements": report.cChangedFamily,
        "change_fraction": report.gChangeFraction,
        "bound": {
            "markers": report.gBoundMarker,
            "family": report.gBoundFamily,
            "edge": report.gEdgeTerm,
            "total": report.gBound,
        },
    }


def _mpLength(summary: LengthSummary) -> dict[str, object]:
    return {
        "n": summary.n,
        "blocks": summary.cBlock,
        "worst_block": summary.strWorstBlock,
        "worst_value": summary.gWorstValue,
        "worst_entry": summary.gWorstEntry,
        "worst_return": summary.gWorstReturn,
        "worst_count": summary.cWorstCount,
        "visits_min": summary.cVisitMin,
        "visits_median": summary.gVisitMedian,
    }


def mpVerification(report: VerificationReport) -> dict[str, object]:
    return {
        "statistic": report.strStatistic,
        "epsilon": report.gEpsilon,
        "n_range": [report.nMin, report.nMax],
        "clamped": report.fClamped,
        "min_count": report.cMin,
        "region": [report.iLo, report.iHi],
        "edge": report.nEdge,
        "blocks": report.cBlockTotal,
        "worst_block": report.strWorstBlock,
        "worst_n": report.nWorst,
        "worst_value": report.gWorstValue,
        "worst_entry": report.gWorstEntry,
        "worst_return": report.gWorstReturn,
        "threshold": report.gThreshold,
        "pass": report.fPass,
        "lengths": [_mpLength(summary) for summary in report.lLength],
    }


def mpBurstReport(report: BurstReport) -> dict[str, object]:
    return {
        "block": "1",
        "n": 1,
        "count": report.cOccupied,
        "mu_hat": report.gMuHat,
        "kac": report.gKac,
        "ecdf_return": report.cdfReturn.lPairStep(),
        "ecdf_entry": report.cdfEntry.lPairStep(),
        **mpVerdict(report.verdict),
        "bin_width": report.gBinWidth,
        "n_events": report.cEvent,
        "n_bins": report.cBin,
        "duplicates": report.cDuplicate,
        "censored": report.cCensored,
        "burstiness": report.gBurstiness,
        "gap_histogram": report.lPairGapHistogram,
    }


def _jsonDefault(obj: Any) -> Any:
    if isinstance(obj, np.integer):
        return int(obj)
    if isinstance(obj, np.floating):
        return float(obj)
    if isinstance(obj, np.ndarray):
        return obj.tolist()
    if isinstance(obj, Path):
        return str(obj)
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return dataclasses.asdict(obj)
    raise TypeError(f"Cannot write {type(obj).__name__} as JSON.")


def mpWithConfig(mp: dict[str, object], mpConfig: dict[str, object]) -> dict[str, object]:
    """Embed the effective run configuration, with the tool version."""

    return {"config": {**mpConfig, "version": __version__}, **mp}


def writeJson(mp: dict[str, object], path: Path | None) -> None:
    """Write mp as indented JSON to path, or to stdout when path is None."""

    strJson = json.dumps(mp, indent=2, default=_jsonDefault)
    if path is None:
        sys.stdout.write(strJson + "\n")
        return
    path.write_text(strJson + "\n", encoding="utf-8")


def readJson(path: Path) -> dict[str, Any]:
    if not path.is_file():
        raise FileNotFoundError(f"JSON file not found: {path}")
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except json.JSONDecodeError as err:
        raise ValueError(f"{path}: {err}") from None


def lRowCsv(mpRecord: dict[str, Any]) -> list[list[object]]:
    """Flat rows of one statistics record: ECDF steps, then margins."""

    strBlock = str(mpRecord["block"])
    lRow: list[list[object]] = []
    for strTable in ("ecdf_return", "ecdf_entry"):
        for t, g in mpRecord.get(strTable, []):
            lRow.append([strBlock, strTable, t, g, ""])
    for (t, g), strVerdict in zip(mpRecord.get("margins", []), mpRecord.get("verdicts", [])):
        lRow.append([strBlock, "margin", t, g, strVerdict])
    return lRow


def writeCsv(
    lMpRecord: list[dict[str, Any]],
    path: Path | None,
    mpConfig: dict[str, object] | None = None,
) -> None:
    """Write the flat tables of every record as one CSV file (stdout when path is None).

    The run configuration, when given, leads the file as one '# config ' comment
    line holding compact JSON.
    """

    if path is None:
        _writeCsvRows(lMpRecord, sys.stdout, mpConfig)
        return
    with path.open("w", newline="", encoding="utf-8") as file:
        _writeCsvRows(lMpRecord, file, mpConfig)


def _writeCsvRows(
    lMpRecord: list[dict[str, Any]], file: Any, mpConfig: dict[str, object] | None
) -> None:
    if mpConfig is not None:
        strConfig = json.dumps(
            {**mpConfig, "version": __version__}, separators=(",", ":"), default=_jsonDefault
        )
        file.write(f"{STR_CSV_CONFIG_PREFIX}{strConfig}\n")

    writer = csv.writer(file)
    writer.writerow(LSTR_CSV_HEADER)
    for mpRecord in lMpRecord:
        writer.writerows(lRowCsv(mpRecord))
