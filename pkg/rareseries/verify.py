"""Empirical check of strong clustering across all blocks of a range of lengths.

For every block B of length n in [nMin, nMax] occurring at least cMin
times, F_B(eps) is computed in one vectorized pass per length: the
fraction of origins whose normalized waiting time to the next occurrence
of B is <= eps (entry reading), or the fraction of normalized return
gaps <= eps (return reading). The check passes when the worst block
stays below eps**2.
"""

import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .markers import SectorLayout
from .perturb import PerturbationPlan, planLayout
from .symbols import BlockGroups, OccurrenceList, SymbolSequence, blockGroups

LSTR_STATISTIC = ("entry", "return")


def _aryDeltaAndWindow(
    groups: BlockGroups, iLo: int, cSlot: int, gEpsilon: float
) -> tuple[np.ndarray, np.ndarray]:
    """Per-window distance to the previous occurrence (or to iLo), and per-group floor(eps / mu)."""

    aryDelta = np.diff(groups.aryStart, prepend=iLo)
    aryDelta[groups.aryGroupStart] = groups.aryStart[groups.aryGroupStart] - iLo

    aryWindow = np.floor(gEpsilon * cSlot / groups.aryCount).astype(np.int64)
    return aryDelta, aryWindow


def aryEntryAtEpsilon(groups: BlockGroups, iLo: int, iHi: int, gEpsilon: float) -> np.ndarray:
    """Entry CDF at eps of every group, over origins in [iLo, iHi - n].

    Origins between two occurrences d apart wait 1..d, so min(d, w) of
    them wait at most w = floor(eps / mu). Origins after the last
    occurrence are censored and left out.
    """

    cSlot = iHi - iLo - groups.n + 1
    aryDelta, aryWindow = _aryDeltaAndWindow(groups, iLo, cSlot, gEpsilon)

    aryHit = np.minimum(aryDelta, np.repeat(aryWindow, groups.aryCount))
    aryLast = groups.aryStart[groups.aryGroupStart + groups.aryCount - 1]
    return np.add.reduceat(aryHit, groups.aryGroupStart) / (aryLast - iLo)


def aryReturnAtEpsilon(groups: BlockGroups, iLo: int, iHi: int, gEpsilon: float) -> np.ndarray:
    """Return CDF at eps of every group: share of its return gaps <= floor(eps / mu)."""

    if groups.aryCount.size and int(groups.aryCount.min()) < 2:
        raise ValueError("Return CDFs need at least 2 occurrences per block.")

    cSlot = iHi - iLo - groups.n + 1
    aryDelta, aryWindow = _aryDeltaAndWindow(groups, iLo, cSlot, gEpsilon)

    fShort = aryDelta <= np.repeat(aryWindow, groups.aryCount)
    fShort[groups.aryGroupStart] = False
    return np.add.reduceat(fShort.astype(np.int64), groups.aryGroupStart) / (groups.aryCount - 1)


def entryCdfAt(occ: OccurrenceList, gEpsilon: float, iLo: int = 0, iHi: int | None = None) -> float:
    """Entry CDF at eps of one block, counting only occurrences inside [iLo, iHi)."""

    iHi = occ.nSequence if iHi is None else iHi
    aryPos = occ.aryPos[(occ.aryPos >= iLo) & (occ.aryPos + occ.nBlock <= iHi)]
    if aryPos.size < 2:
        raise ValueError(f"Entry CDF needs at least 2 occurrences in range, got {aryPos.size}.")

    groups = BlockGroups(
        n=occ.nBlock,
        aryStart=aryPos,
        aryGroupStart=np.zeros(1, dtype=np.int64),
        aryCount=np.array([aryPos.size], dtype=np.int64),
    )
    return float(aryEntryAtEpsilon(groups, iLo, iHi, gEpsilon)[0])


@dataclass(frozen=True)
class LengthSummary:
    """Worst qualifying block of one length; visit counts are per occupied sector."""

    n: int
    cBlock: int
    strWorstBlock: str = ""
    iWorstFirst: int = -1
    cWorstCount: int = 0
    gWorstValue: float = 0.0
    gWorstEntry: float = 0.0
    gWorstReturn: float = 0.0
    cVisitMin: int | None = None
    gVisitMedian: float | None = None


@dataclass(frozen=True)
class VerificationReport:
    strStatistic: str
    gEpsilon: float
    gThreshold: float
    nMin: int
    nMax: int
    fClamped: bool
    cMin: int
    iLo: int
    iHi: int
    nEdge: int
    cBlockTotal: int
    strWorstBlock: str
    nWorst: int
    gWorstValue: float
    gWorstEntry: float
    gWorstReturn: float
    fPass: bool
    lLength: list[LengthSummary] = field(default_factory=list)


def _visitCounts(groups: BlockGroups, layout: SectorLayout) -> np.ndarray:
    """Occurrences of each block in each (span, sector) cell it visits."""

    arySpan, arySector = layout.sectorOf(groups.aryStart)
    aryGroup = np.repeat(np.arange(len(groups), dtype=np.int64), groups.aryCount)
    aryCell = (aryGroup * layout.cSpan + arySpan) * layout.nSector + arySector
    _, aryVisit = np.unique(aryCell[arySpan >= 0], return_counts=True)
    return aryVisit


def summarizeLength(
    seq: SymbolSequence,
    n: int,
    iLo: int,
    iHi: int,
    cMin: int,
    gEpsilon: float,
    strStatistic: str = "entry",
    layout: SectorLayout | None = None,
) -> LengthSummary:
    """Evaluate every block of length n occurring >= cMin times inside [iLo, iHi)."""

    groups = blockGroups(seq, n, iLo, iHi).filtered(cMin)
    if len(groups) == 0:
        return LengthSummary(n=n, cBlock=0)

    aryEntry = aryEntryAtEpsilon(groups, iLo, iHi, gEpsilon)
    aryReturn = aryReturnAtEpsilon(groups, iLo, iHi, gEpsilon)
    aryValue = aryEntry if strStatistic == "entry" else aryReturn

    iWorst = int(np.argmax(aryValue))
    iFirst = int(groups.aryStart[groups.aryGroupStart[iWorst]])

    cVisitMin = None
    gVisitMedian = None
    if layout is not None:
        aryVisit = _visitCounts(groups, layout)
        if aryVisit.size:
            cVisitMin = int(aryVisit.min())
            gVisitMedian = float(np.median(aryVisit))

    return LengthSummary(
        n=n,
        cBlock=len(groups),
        strWorstBlock=seq.alphabet.strSymbols(seq.arySymbol[iFirst : iFirst + n]),
        iWorstFirst=iFirst,
        cWorstCount=int(groups.aryCount[iWorst]),
        gWorstValue=float(aryValue[iWorst]),
        gWorstEntry=float(aryEntry[iWorst]),
        gWorstReturn=float(aryReturn[iWorst]),
        cVisitMin=cVisitMin,
        gVisitMedian=gVisitMedian,
    )


def verifyTheorem(
    seq: SymbolSequence,
    plan: PerturbationPlan | None,
    nMin: int,
    nMax: int,
    cMin: int,
    gEpsilon: float,
    strStatistic: str = "entry",
    nThreads: int = 1,
    fVerbose: bool = False,
) -> VerificationReport:
    """Worst F_B(eps) over all qualifying blocks with nMin <= |B| <= nMax; pass iff < eps**2.

    With a plan, only the complete r1-spans the plan laid out are
    examined; without one, the whole sequence. nMax is clamped to nMin**2.
    Lengths are evaluated in parallel on up to nThreads workers.
    """

    if strStatistic not in LSTR_STATISTIC:
        raise ValueError(f"Statistic must be one of {LSTR_STATISTIC}, got {strStatistic!r}.")
    if not 0.0 < gEpsilon < 1.0:
        raise ValueError(f"epsilon must lie in (0, 1), got {gEpsilon}.")
    if cMin < 2:
        raise ValueError(f"min_count must be >= 2, got {cMin}.")
    if nMin < 1 or nMax < nMin:
        raise ValueError(f"Invalid length range [{nMin}, {nMax}].")
    if nThreads < 1:
        raise ValueError(f"Thread count must be >= 1, got {nThreads}.")

    layout = None
    iLo, iHi = 0, len(seq)
    if plan is not None:
        if nMin < plan.nN:
            raise ValueError(f"N = {nMin} is below the plan's threshold {plan.nN}.")
        _, layout = planLayout(plan, len(seq))
        iLo, iHi = layout.iLo, layout.iHi

    fClamped = nMax > nMin * nMin
    if fClamped:
        print(
            f"Warning: N_hi = {nMax} exceeds N**2 = {nMin * nMin}; clamped.",
            file=sys.stderr,
        )
        nMax = nMin * nMin

    nMax = min(nMax, iHi - iLo)
    if nMax < nMin:
        raise ValueError(f"Range of {iHi - iLo} symbols is too short for blocks of length {nMin}.")

    def summarize(n: int) -> LengthSummary:
        return summarizeLength(seq, n, iLo, iHi, cMin, gEpsilon, strStatistic, layout)

    lN = list(range(nMin, nMax + 1))
    if nThreads == 1:
        lLength = [summarize(n) for n in lN]
    else:
        with ThreadPoolExecutor(max_workers=nThreads) as executor:
            lLength = list(executor.map(summarize, lN))

    if fVerbose:
        for summary in lLength:
            print(
                f"  n={summary.n}: {summary.cBlock} block(s), worst {summary.gWorstValue:.4f}",
                file=sys.stderr,
            )

    lQualified = [summary for summary in lLength if summary.cBlock > 0]
    if not lQualified:
        raise ValueError(
            f"No block of length {nMin}..{nMax} occurs at least {cMin} times; "
            f"lower --min-count or use a longer sequence."
        )

    worst = max(lQualified, key=lambda summary: summary.gWorstValue)
    gThreshold = gEpsilon**2

    return VerificationReport(
        strStatistic=strStatistic,
        gEpsilon=gEpsilon,
        gThreshold=gThreshold,
        nMin=nMin,
        nMax=nMax,
        fClamped=fClamped,
        cMin=cMin,
        iLo=iLo,
        iHi=iHi,
        nEdge=len(seq) - (iHi - iLo),
        cBlockTotal=sum(summary.cBlock for summary in lLength),
        strWorstBlock=worst.strWorstBlock,
        nWorst=worst.n,
        gWorstValue=worst.gWorstValue,
        gWorstEntry=worst.gWorstEntry,
        gWorstReturn=worst.gWorstReturn,
        fPass=worst.gWorstValue < gThreshold,
        lLength=lLength,
    )
