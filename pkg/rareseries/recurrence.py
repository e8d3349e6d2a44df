"""Return-time and entry-time statistics of a block.

Return times are the gaps between consecutive occurrences; entry times
are waiting times from arbitrary origins to the next occurrence. Both
use k >= 1. Times are normalized by the empirical measure of the block
(Kac normalization), so that under independence both laws approach the
parameter-one exponential.
"""

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .symbols import Block, OccurrenceList, SymbolSequence, empiricalMeasure

LSTR_CDF_KIND = ("return", "entry")


@dataclass(frozen=True, eq=False)
class GapList:
    """Return times of a block: differences of consecutive occurrence positions."""

    aryGap: np.ndarray
    gMuHat: float

    def __len__(self) -> int:
        return int(self.aryGap.size)


@dataclass(frozen=True, eq=False)
class EntryTimes:
    """Entry times from sampled origins; right-censored origins are only counted."""

    aryTime: np.ndarray
    cCensored: int
    cOrigin: int
    nStride: int


def returnGaps(occ: OccurrenceList) -> GapList:
    if len(occ) < 2:
        raise ValueError(
            f"Return times need at least 2 occurrences, got {len(occ)} (no return observed)."
        )
    return GapList(aryGap=np.diff(occ.aryPos), gMuHat=empiricalMeasure(occ))


def _checkOccurrences(seq: SymbolSequence, block: Block, occ: OccurrenceList) -> None:
    if occ.nSequence != len(seq) or occ.nBlock != len(block):
        raise ValueError(
            f"Occurrence list (T={occ.nSequence}, n={occ.nBlock}) does not belong to this "
            f"sequence (T={len(seq)}) and block (n={len(block)})."
        )


def entryTimes(
    seq: SymbolSequence,
    block: Block,
    occ: OccurrenceList,
    nStride: int = 1,
) -> EntryTimes:
    """Least k >= 1 with an occurrence at i + k, for origins i = 0, nStride, ...

    Origins range over the T - n + 1 slots. An origin with no later
    occurrence is dropped and counted in cCensored.
    """

    _checkOccurrences(seq, block, occ)
    if len(occ) == 0:
        raise ValueError("Entry times need at least one occurrence of the block.")
    if nStride < 1:
        raise ValueError(f"Origin stride must be >= 1, got {nStride}.")

    aryOrigin = np.arange(0, occ.cSlot(), nStride, dtype=np.int64)
    aryNext = np.searchsorted(occ.aryPos, aryOrigin, side="right")
    fFound = aryNext < len(occ)

    return EntryTimes(
        aryTime=occ.aryPos[aryNext[fFound]] - aryOrigin[fFound],
        cCensored=int(np.count_nonzero(~fFound)),
        cOrigin=int(aryOrigin.size),
        nStride=nStride,
    )


@dataclass(frozen=True, eq=False)
class EmpiricalCdf:
    """Right-continuous step CDF of normalized times mu_hat * tau.

    F(t) is the fraction of samples <= t; aryLeft gives F(t-).
    """

    strKind: str
    arySupport: np.ndarray
    gMuHat: float

    def __post_init__(self) -> None:
        if self.strKind not in LSTR_CDF_KIND:
            raise ValueError(f"CDF kind must be one of {LSTR_CDF_KIND}, got {self.strKind!r}.")
        arySupport = np.sort(np.asarray(self.arySupport, dtype=np.float64))
        if arySupport.size == 0:
            raise ValueError("An empirical CDF needs at least one sample.")
        arySupport.flags.writeable = False
        object.__setattr__(self, "arySupport", arySupport)

        # Prefix sums for the closed-form integral of the survival function.

        aryPrefix = np.concatenate(([0.0], np.cumsum(arySupport)))
        aryPrefix.flags.writeable = False
        object.__setattr__(self, "_aryPrefix", aryPrefix)

    @property
    def cSample(self) -> int:
        return int(self.arySupport.size)

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        ary = np.searchsorted(self.arySupport, t, side="right") / self.cSample
        return float(ary) if np.ndim(ary) == 0 else ary

    def aryLeft(self, t: float | np.ndarray) -> float | np.ndarray:
        """F(t-): fraction of samples strictly below t."""

        ary = np.searchsorted(self.arySupport, t, side="left") / self.cSample
        return float(ary) if np.ndim(ary) == 0 else ary

    def integratedSurvival(self, t: float | np.ndarray) -> float | np.ndarray:
        """Integral of 1 - F over [0, t]; equals the mean of min(sample, t)."""

        aryT = np.asarray(t, dtype=np.float64)
        aryK = np.searchsorted(self.arySupport, aryT, side="right")
        ary = (self._aryPrefix[aryK] + aryT * (self.cSample - aryK)) / self.cSample
        return float(ary) if np.ndim(ary) == 0 else ary

    def lPairStep(self) -> list[list[float]]:
        """[[t, F(t)]] at each distinct jump point, for export."""

        aryT, aryCount = np.unique(self.arySupport, return_counts=True)
        aryF = np.cumsum(aryCount) / self.cSample
        return [[float(t), float(g)] for t, g in zip(aryT, aryF)]


def ecdfFromSamples(
    aryTau: np.ndarray | list[int],
    gMuHat: float,
    strKind: str = "return",
) -> EmpiricalCdf:
    """Step CDF of the normalized times gMuHat * tau."""

    aryTau = np.asarray(aryTau)
    if aryTau.size == 0:
        raise ValueError("An empirical CDF needs at least one sample.")
    if not gMuHat > 0.0:
        raise ValueError(f"Normalizing measure must be positive, got {gMuHat}.")

    return EmpiricalCdf(strKind=strKind, arySupport=gMuHat * aryTau, gMuHat=gMuHat)


def kacStatistic(gaps: GapList) -> float:
    """mu_hat times the mean return time; tends to 1 for ergodic sources."""

    if len(gaps) == 0:
        raise ValueError("Kac statistic needs at least one return time.")
    return gaps.gMuHat * float(gaps.aryGap.mean())


@dataclass(frozen=True)
class ClusterStats:
    """Statistics of I, the number of occurrences among positions i..i+nSpan.

    nSpan = floor(t / mu_hat) and the window holds nWindow = nSpan + 1 positions.
    """

    gT: float
    nSpan: int
    nWindow: int
    gMeanI: float
    gMeanIGivenPos: float
    gPPos: float
    cOrigin: int


def clusterStats(
    seq: SymbolSequence,
    block: Block,
    occ: OccurrenceList,
    gT: float,
    nStride: int = 1,
    gMu: float | None = None,
) -> ClusterStats:
    """Slide the window over sampled origins and average the occurrence count I.

    gMu overrides mu_hat when an exact probability is known.
    """

    _checkOccurrences(seq, block, occ)
    if not gT > 0.0:
        raise ValueError(f"Normalized window length t must be positive, got {gT}.")
    if nStride < 1:
        raise ValueError(f"Origin stride must be >= 1, got {nStride}.")

    gMuUsed = empiricalMeasure(occ) if gMu is None else gMu
    if not gMuUsed > 0.0:
        raise ValueError("Cluster statistics need a block of positive measure.")

    nSpan = math.floor(gT / gMuUsed)
    if nSpan + 1 > occ.cSlot():
        raise ValueError(
            f"Window of {nSpan + 1} positions exceeds the {occ.cSlot()} slots of the sequence."
        )

    aryOrigin = np.arange(0, occ.cSlot() - nSpan, nStride, dtype=np.int64)
    aryI = np.searchsorted(occ.aryPos, aryOrigin + nSpan, side="right") - np.searchsorted(
        occ.aryPos, aryOrigin, side="left"
    )

    fPos = aryI > 0
    cPos = int(np.count_nonzero(fPos))
    cTotal = int(aryI.sum())

    return ClusterStats(
        gT=gT,
        nSpan=nSpan,
        nWindow=nSpan + 1,
        gMeanI=cTotal / aryOrigin.size,
        gMeanIGivenPos=cTotal / cPos if cPos else 0.0,
        gPPos=cPos / aryOrigin.size,
        cOrigin=int(aryOrigin.size),
    )


def ksDistance(cdf: EmpiricalCdf, cdfReference: Callable[[np.ndarray], np.ndarray]) -> float:
    """sup |F - G|, checked on both sides of every jump of F.

    G must be nondecreasing and continuous, so the supremum is attained
    at a jump of F.
    """

    aryT = np.unique(cdf.arySupport)
    aryG = np.asarray(cdfReference(aryT), dtype=np.float64)

    gRight = float(np.abs(cdf(aryT) - aryG).max())
    gLeft = float(np.abs(cdf.aryLeft(aryT) - aryG).max())
    return max(gRight, gLeft)
