"""Semiperiodic r-markers on finite sequences, and the sectors built on them.

Markers are produced in two stages: sparse cuts whose gaps are all in
[r**2, 2 r**2], then each gap subdivided into pieces of length r and
r + 1 (fewest r + 1 pieces, placed rightmost). Interior marker gaps are
therefore exactly r or r + 1. The stretch before the first cut and
after the last cut carries no markers; its length is reported as the
edge.

r1-markers are the r-markers nearest to the multiples of r1 counted from
the first marker, so every sector boundary sits on an existing r-marker
grid and each span between r1-markers splits into K sectors.
"""

from dataclasses import dataclass

import numpy as np

from .processes import rngFromSeed

# Salts separating the marker stream from other draws made with the same seed.

SALT_CUTS = 0x6375_7473


@dataclass(frozen=True, eq=False)
class MarkerSet:
    """Marker positions: interior gaps in {r, r + 1}, markers in [iHead, iTail]."""

    r: int
    aryPos: np.ndarray
    nLength: int

    def __len__(self) -> int:
        return int(self.aryPos.size)

    @property
    def iHead(self) -> int:
        return int(self.aryPos[0])

    @property
    def iTail(self) -> int:
        return int(self.aryPos[-1])

    def aryGap(self) -> np.ndarray:
        return np.diff(self.aryPos)

    def nEdge(self) -> int:
        """Positions before the first marker plus positions from the last marker on."""

        return self.iHead + (self.nLength - self.iTail)


def sparseCuts(nLength: int, r: int, seed: int) -> np.ndarray:
    """Cut positions with consecutive gaps in [r**2, 2 r**2]; deterministic in seed."""

    if r < 2:
        raise ValueError(f"Marker period r must be >= 2, got {r}.")

    nGapMin = r * r
    if nLength <= nGapMin:
        raise ValueError(f"Sequence of length {nLength} is too short for r = {r} (needs > r**2).")

    rng = rngFromSeed(seed, SALT_CUTS)
    iFirst = int(rng.integers(0, nGapMin))
    cGap = (nLength - iFirst) // nGapMin + 1
    aryGap = rng.integers(nGapMin, 2 * nGapMin + 1, size=cGap)

    aryCut = iFirst + np.concatenate(([0], np.cumsum(aryGap)))
    return aryCut[aryCut < nLength].astype(np.int64)


def subdivideGap(m: int, r: int) -> list[int]:
    """Split m into pieces r and r + 1 with the fewest r + 1 pieces, those rightmost.

    b = m mod r pieces of length r + 1 is the minimum, since
    a r + b (r + 1) = m forces b = m (mod r). Always solvable for m >= r**2.
    """

    if r < 1:
        raise ValueError(f"Piece length r must be >= 1, got {r}.")

    cLong = m % r
    cShort = (m - cLong * (r + 1)) // r
    if m < 1 or cShort < 0:
        raise ValueError(f"{m} cannot be split into pieces of length {r} and {r + 1}.")

    return [r] * cShort + [r + 1] * cLong


def buildMarkers(nLength: int, r: int, seed: int) -> MarkerSet:
    """Sparse cuts refined into r / r + 1 pieces."""

    aryCut = sparseCuts(nLength, r, seed)

    # Vectorized subdivideGap over all cut gaps: cShort pieces of r, then cLong of r + 1.

    aryM = np.diff(aryCut)
    aryLong = aryM % r
    aryShort = (aryM - aryLong * (r + 1)) // r

    aryPiece = np.repeat(
        np.tile(np.array([r, r + 1], dtype=np.int64), aryM.size),
        np.column_stack((aryShort, aryLong)).ravel(),
    )
    aryPos = aryCut[0] + np.concatenate(([0], np.cumsum(aryPiece)))

    return MarkerSet(r=r, aryPos=aryPos.astype(np.int64), nLength=nLength)


@dataclass(frozen=True, eq=False)
class SectorLayout:
    """Spans between consecutive r1-markers, each split into nSector sectors.

    Sector k of a span starting at a covers [a + k M, a + (k + 1) M);
    the last sector absorbs the remainder of the span.
    """

    aryR1Pos: np.ndarray
    nSector: int
    nSectorLength: int
    nLength: int

    @property
    def iLo(self) -> int:
        return int(self.aryR1Pos[0])

    @property
    def iHi(self) -> int:
        return int(self.aryR1Pos[-1])

    @property
    def cSpan(self) -> int:
        return int(self.aryR1Pos.size) - 1

    def nEdge(self) -> int:
        """Positions outside complete spans; never modified nor verified."""

        return self.iLo + (self.nLength - self.iHi)

    def sectorOf(self, aryPos: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        """(span index, sector index) of each position; (-1, -1) outside the spans."""

        aryPos = np.asarray(aryPos, dtype=np.int64)
        arySpan = np.searchsorted(self.aryR1Pos, aryPos, side="right") - 1
        fIn = (arySpan >= 0) & (arySpan < self.cSpan)

        arySpanClipped = np.clip(arySpan, 0, self.cSpan - 1)
        arySector = np.minimum(
            (aryPos - self.aryR1Pos[arySpanClipped]) // self.nSectorLength, self.nSector - 1
        )

        return np.where(fIn, arySpan, -1), np.where(fIn, arySector, -1)


def sectorLayout(markers: MarkerSet, nR1: int, nSector: int, nSectorLength: int) -> SectorLayout:
    """Nest r1-markers in the r-marker set and lay out the sectors."""

    aryPos = markers.aryPos
    cR1 = (markers.iTail - markers.iHead) // nR1 + 1
    aryTarget = markers.iHead + nR1 * np.arange(cR1, dtype=np.int64)

    # Nearest r-marker to each target; ties go left.

    iRight = np.clip(np.searchsorted(aryPos, aryTarget, side="left"), 0, aryPos.size - 1)
    iLeft = np.clip(iRight - 1, 0, aryPos.size - 1)
    fLeft = np.abs(aryPos[iLeft] - aryTarget) <= np.abs(aryPos[iRight] - aryTarget)
    aryR1Pos = np.unique(aryPos[np.where(fLeft, iLeft, iRight)])

    if aryR1Pos.size < 2:
        raise ValueError(
            f"Sequence of length {markers.nLength} holds no complete span of r1 = {nR1} "
            f"between markers; it needs to be several r1 long."
        )

    return SectorLayout(
        aryR1Pos=aryR1Pos,
        nSector=nSector,
        nSectorLength=nSectorLength,
        nLength=markers.nLength,
    )
