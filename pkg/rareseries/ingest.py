"""Event timestamps brought into the block-occurrence framework.

A series of event times is cut into bins of width w; a bin holding at
least one event becomes symbol 1, an empty bin symbol 0. Clustering of
the events is then clustering of the block "1".
"""

import math
import sys
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .laws import G_EPSILON_DEFAULT, LG_T_GRID_DEFAULT, ClusterVerdict, classify
from .processes import rngFromSeed
from .recurrence import (
    EmpiricalCdf,
    ecdfFromSamples,
    entryTimes,
    kacStatistic,
    returnGaps,
)
from .symbols import Alphabet, Block, SymbolSequence, scanOccurrences

SALT_POISSON = 0x706F_6973
SALT_BURST = 0x6275_7273

C_EVENT_MIN = 3


@dataclass(frozen=True, eq=False)
class EventSeries:
    """Strictly increasing event times inside [gStart, gEnd]."""

    aryT: np.ndarray
    gStart: float
    gEnd: float
    cDuplicate: int = 0
    fSorted: bool = True

    def __len__(self) -> int:
        return int(self.aryT.size)


def eventSeriesFromTimes(
    lT: list[float] | np.ndarray,
    gStart: float | None = None,
    gEnd: float | None = None,
) -> EventSeries:
    """Sort, collapse duplicates, and take the span from the events unless given."""

    aryRaw = np.asarray(lT, dtype=np.float64)
    if aryRaw.ndim != 1:
        raise ValueError("Event times must be one-dimensional.")
    if aryRaw.size == 0:
        raise ValueError("An event series needs at least one event.")
    if not np.all(np.isfinite(aryRaw)):
        raise ValueError("Event times must be finite.")

    fSorted = bool(np.all(np.diff(aryRaw) >= 0.0))
    aryT = np.unique(aryRaw)
    cDuplicate = int(aryRaw.size - aryT.size)

    gStart = float(aryT[0]) if gStart is None else gStart
    gEnd = float(aryT[-1]) if gEnd is None else gEnd
    if aryT[0] < gStart or aryT[-1] > gEnd:
        raise ValueError(
            f"Events [{aryT[0]}, {aryT[-1]}] fall outside the span [{gStart}, {gEnd}]."
        )

    aryT.flags.writeable = False
    return EventSeries(aryT=aryT, gStart=gStart, gEnd=gEnd, cDuplicate=cDuplicate, fSorted=fSorted)


def parseEvents(path: Path, iColumn: int | None = None) -> EventSeries:
    """Read one timestamp per line, or column iColumn (0-based) of a CSV file.

    Blank lines and lines starting with '#' are skipped; a first line
    that does not parse is taken as a header. Unsorted input is sorted
    and duplicates are collapsed, each with a warning.
    """

    if not path.is_file():
        raise FileNotFoundError(f"Event file not found: {path}")

    lT: list[float] = []
    fFirst = True
    with path.open("r", encoding="utf-8") as file:
        for iLine, strLine in enumerate(file, start=1):
            strLine = strLine.strip()
            if not strLine or strLine.startswith("#"):
                continue

            lStrField = strLine.split(",") if iColumn is not None else [strLine]
            try:
                strField = lStrField[iColumn or 0]
                lT.append(float(strField.strip()))
            except (IndexError, ValueError):
                if fFirst:
                    fFirst = False
                    continue
                raise ValueError(
                    f"{path}:{iLine}: cannot read a timestamp from {strLine!r}."
                ) from None
            fFirst = False

    if not lT:
        raise ValueError(f"{path}: no events found.")

    ev = eventSeriesFromTimes(lT)
    if not ev.fSorted:
        print(f"Warning: {path}: events were not in time order; sorted.", file=sys.stderr)
    if ev.cDuplicate:
        print(
            f"Warning: {path}: {ev.cDuplicate} duplicate timestamp(s) collapsed.",
            file=sys.stderr,
        )
    return ev


def binarize(ev: EventSeries, gBinWidth: float) -> SymbolSequence:
    """Symbol i is 1 iff some event lies in [start + i w, start + (i + 1) w)."""

    if not gBinWidth > 0.0 or not math.isfinite(gBinWidth):
        raise ValueError(f"Bin width must be positive, got {gBinWidth}.")

    aryBin = np.floor((ev.aryT - ev.gStart) / gBinWidth).astype(np.int64)
    nBin = max(math.ceil((ev.gEnd - ev.gStart) / gBinWidth), int(aryBin[-1]) + 1, 1)

    arySym = np.zeros(nBin, dtype=np.uint8)
    arySym[aryBin] = 1
    return SymbolSequence(Alphabet(2), arySym)


def defaultBinWidth(ev: EventSeries) -> float:
    """A quarter of the median inter-event gap."""

    if len(ev) < 2:
        raise ValueError("A default bin width needs at least 2 events.")
    return float(np.median(np.diff(ev.aryT))) / 4.0


def burstiness(aryGap: np.ndarray) -> float:
    """(sigma - mean) / (sigma + mean) of the gaps: -1 periodic, 0 Poisson, toward 1 bursty."""

    gMean = float(np.mean(aryGap))
    gSigma = float(np.std(aryGap))
    if gMean + gSigma == 0.0:
        return 0.0
    return (gSigma - gMean) / (gSigma + gMean)


@dataclass(frozen=True)
class BurstReport:
    """Clustering of the block 1 in a binarized event series."""

    gBinWidth: float
    cEvent: int
    cDuplicate: int
    cBin: int
    cOccupied: int
    gMuHat: float
    gKac: float
    gBurstiness: float
    cCensored: int
    verdict: ClusterVerdict
    cdfReturn: EmpiricalCdf
    cdfEntry: EmpiricalCdf
    lPairGapHistogram: list[list[int]]


def burstReport(
    ev: EventSeries,
    gBinWidth: float | None = None,
    lT: list[float] | tuple[float, ...] = LG_T_GRID_DEFAULT,
    gEpsilon: float = G_EPSILON_DEFAULT,
) -> BurstReport:
    """Binarize, then compare the entry law of block 1 with the exponential law."""

    if len(ev) < C_EVENT_MIN:
        raise ValueError(f"A burst report needs at least {C_EVENT_MIN} events, got {len(ev)}.")

    gBinWidth = defaultBinWidth(ev) if gBinWidth is None else gBinWidth
    seq = binarize(ev, gBinWidth)
    block = Block(seq.alphabet, np.array([1], dtype=np.uint8))

    occ = scanOccurrences(seq, block)
    if len(occ) < 2:
        raise ValueError(
            f"Bin width {gBinWidth:g} puts all events into one bin; use a narrower width."
        )

    gaps = returnGaps(occ)
    entry = entryTimes(seq, block, occ)
    cdfReturn = ecdfFromSamples(gaps.aryGap, gaps.gMuHat, "return")
    cdfEntry = ecdfFromSamples(entry.aryTime, gaps.gMuHat, "entry")

    verdict = classify(
        cdfEntry, lT=lT, gEpsilon=gEpsilon, cSample=len(gaps), cdfReturn=cdfReturn
    )

    aryGapValue, aryGapCount = np.unique(gaps.aryGap, return_counts=True)

    return BurstReport(
        gBinWidth=gBinWidth,
        cEvent=len(ev),
        cDuplicate=ev.cDuplicate,
        cBin=len(seq),
        cOccupied=len(occ),
        gMuHat=gaps.gMuHat,
        gKac=kacStatistic(gaps),
        gBurstiness=burstiness(np.diff(ev.aryT)),
        cCensored=entry.cCensored,
        verdict=verdict,
        cdfReturn=cdfReturn,
        cdfEntry=cdfEntry,
        lPairGapHistogram=[[int(g), int(c)] for g, c in zip(aryGapValue, aryGapCount)],
    )


def sweepBurstReport(
    ev: EventSeries,
    lBinWidth: list[float],
    lT: list[float] | tuple[float, ...] = LG_T_GRID_DEFAULT,
    gEpsilon: float = G_EPSILON_DEFAULT,
) -> list[BurstReport]:
    """One report per bin width, to expose how the verdict depends on w."""

    if not lBinWidth:
        raise ValueError("The bin-width sweep needs at least one width.")
    return [burstReport(ev, gBinWidth, lT, gEpsilon) for gBinWidth in lBinWidth]


# -- Synthetic event sources ------------------------------------------------------


def poissonEvents(cEvent: int, gRate: float, seed: int) -> EventSeries:
    """Homogeneous Poisson arrivals: exponential gaps of mean 1 / rate from t = 0."""

    if cEvent < 1 or not gRate > 0.0:
        raise ValueError(f"Need cEvent >= 1 and a positive rate, got {cEvent}, {gRate}.")

    rng = rngFromSeed(seed, SALT_POISSON)
    aryT = np.cumsum(rng.exponential(1.0 / gRate, size=cEvent))
    return eventSeriesFromTimes(aryT, gStart=0.0)


def burstEvents(
    cCluster: int,
    seed: int,
    cPerCluster: int = 5,
    gIntraGap: float = 1.0,
    gSilence: float = 50.0,
) -> EventSeries:
    """Clusters of cPerCluster events gIntraGap apart, separated by silences.

    Each silence lasts gSilence * (1 + Exp(1)), so it is never shorter
    than gSilence.
    """

    if cCluster < 1 or cPerCluster < 1:
        raise ValueError("Need at least one cluster and one event per cluster.")
    if not gIntraGap > 0.0 or not gSilence > 0.0:
        raise ValueError("Intra-cluster gap and silence must be positive.")

    rng = rngFromSeed(seed, SALT_BURST)
    arySilence = gSilence * (1.0 + rng.exponential(1.0, size=cCluster))
    aryPeriod = arySilence + (cPerCluster - 1) * gIntraGap
    aryClusterStart = np.cumsum(aryPeriod) - aryPeriod[0]

    aryT = (aryClusterStart[:, None] + gIntraGap * np.arange(cPerCluster)).ravel()
    return eventSeriesFromTimes(aryT)


def periodicEvents(cEvent: int, gPeriod: float = 1.0) -> EventSeries:
    """Evenly spaced events at 0, period, 2 period, ..."""

    if cEvent < 1 or not gPeriod > 0.0:
        raise ValueError(f"Need cEvent >= 1 and a positive period, got {cEvent}, {gPeriod}.")
    return eventSeriesFromTimes(gPeriod * np.arange(cEvent, dtype=np.float64))
