"""The strong-clustering perturbation of a binary-coded sequence.

Each span between r1-markers is cut into K sectors. Sector k is branded
with the block W_k: it is written right of every r-marker in the sector,
and every other family block found starting in the sector is rewritten
as W_k. Blocks long enough to always contain a branded marker can then
only occur in one sector per span, so their visits come in bursts.

W_k = 1 + W'_k + 1 + 0^m with L = 2m + 1 and |W'_k| = m - 1. The 1 at
index m meets the zero tail of any copy shifted by 0 < s < L, so no two
family blocks (equal or not) can overlap.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .markers import MarkerSet, SectorLayout, buildMarkers, sectorLayout
from .processes import rngFromSeed
from .symbols import SymbolSequence, hammingFraction

SALT_FAMILY = 0x6661_6D69

# Plan keys as they appear in plan files and reports.

g_mpStrKeyStrField: dict[str, str] = {
    "epsilon": "gEpsilon",
    "delta": "gDelta",
    "L": "nL",
    "r": "r",
    "M": "nM",
    "N": "nN",
    "seed": "seed",
}

# Derived values that reports carry next to the plan; ignored on input.

LSTR_KEY_DERIVED = ("K", "r1")


@dataclass(frozen=True, eq=False)
class WFamily:
    """K blocks W_k of odd length L; row k of aryW is W_(k+1)."""

    nL: int
    aryW: np.ndarray
    lCodePrime: list[int]

    def __len__(self) -> int:
        return int(self.aryW.shape[0])

    @property
    def m(self) -> int:
        return (self.nL - 1) // 2

    def lStrW(self) -> list[str]:
        return ["".join(str(int(sym)) for sym in aryRow) for aryRow in self.aryW]


def _aryWFromCode(nCode: int, nL: int) -> np.ndarray:
    m = (nL - 1) // 2
    lBit = [(nCode >> iBit) & 1 for iBit in range(m - 2, -1, -1)]
    return np.array([1, *lBit, 1] + [0] * m, dtype=np.uint8)


def cCodeAvailable(nL: int) -> int:
    """Number of usable W' words: nonzero binary words of length m - 1."""

    return (1 << ((nL - 1) // 2 - 1)) - 1


def _checkFamilyShape(nK: int, nL: int) -> None:
    if nL < 5 or nL % 2 == 0:
        raise ValueError(f"Family block length L must be odd and >= 5, got {nL}.")
    if nK < 1:
        raise ValueError(f"Family size K must be >= 1, got {nK}.")
    if nK > cCodeAvailable(nL):
        raise ValueError(
            f"L = {nL} allows only {cCodeAvailable(nL)} distinct blocks, fewer than K = {nK}; "
            f"increase L."
        )


def _shapeMatches(arySym: np.ndarray, nL: int) -> tuple[np.ndarray, np.ndarray]:
    """Starts of every 1 ? 1 0^m window with a binary middle, and the middle's code.

    Candidates are filtered one position at a time, as in scanOccurrences.
    """

    m = (nL - 1) // 2
    c = arySym.size - nL + 1
    if c <= 0:
        return np.empty(0, dtype=np.int64), np.empty(0, dtype=np.int64)

    aryCand = np.flatnonzero((arySym[:c] == 1) & (arySym[m : m + c] == 1))
    for iOffset in range(m + 1, nL):
        aryCand = aryCand[arySym[aryCand + iOffset] == 0]

    aryCode = np.zeros(aryCand.size, dtype=np.int64)
    fBinary = np.ones(aryCand.size, dtype=bool)
    for iOffset in range(1, m):
        arySymMid = arySym[aryCand + iOffset].astype(np.int64)
        fBinary &= arySymMid <= 1
        aryCode = 2 * aryCode + arySymMid

    return aryCand[fBinary].astype(np.int64), aryCode[fBinary]


def familyOccurrences(arySym: np.ndarray, family: WFamily) -> tuple[np.ndarray, np.ndarray]:
    """(start, k) of every family block in arySym, by increasing start; k is 0-based."""

    aryStart, aryCode = _shapeMatches(arySym, family.nL)

    aryCodeFamily = np.asarray(family.lCodePrime, dtype=np.int64)
    aryOrder = np.argsort(aryCodeFamily)
    aryCodeSorted = aryCodeFamily[aryOrder]

    iSorted = np.clip(np.searchsorted(aryCodeSorted, aryCode), 0, aryCodeSorted.size - 1)
    fMember = aryCodeSorted[iSorted] == aryCode

    return aryStart[fMember], aryOrder[iSorted[fMember]].astype(np.int64)


def makeWFamily(
    nK: int,
    nL: int,
    seed: int,
    seqBase: SymbolSequence | None = None,
) -> WFamily:
    """Pick K distinct nonzero W' words.

    With a base sequence, the words whose W is rarest in it come first;
    ties (and the whole order, without a base) are broken by a seeded
    shuffle.
    """

    _checkFamilyShape(nK, nL)

    m = (nL - 1) // 2
    aryCandidate = np.arange(1, 1 << (m - 1), dtype=np.int64)

    if seqBase is None:
        aryCount = np.zeros(aryCandidate.size, dtype=np.int64)
    else:
        _, aryCode = _shapeMatches(seqBase.arySymbol, nL)
        aryCount = np.bincount(aryCode, minlength=1 << (m - 1))[aryCandidate]

    aryTie = rngFromSeed(seed, SALT_FAMILY).permutation(aryCandidate.size)
    aryOrder = np.lexsort((aryTie, aryCount))
    lCodePrime = [int(nCode) for nCode in aryCandidate[aryOrder[:nK]]]

    aryW = np.stack([_aryWFromCode(nCode, nL) for nCode in lCodePrime])
    return WFamily(nL=nL, aryW=aryW, lCodePrime=lCodePrime)


def familyFromStrings(lStrW: list[str]) -> WFamily:
    """Rebuild a family from its block strings (as written to a plan report)."""

    if not lStrW:
        raise ValueError("A W family needs at least one block.")

    nL = len(lStrW[0])
    _checkFamilyShape(len(lStrW), nL)
    m = (nL - 1) // 2

    lCodePrime: list[int] = []
    for strW in lStrW:
        if len(strW) != nL:
            raise ValueError(f"Family blocks must share one length: {lStrW}.")
        if strW[0] != "1" or strW[m] != "1" or strW[m + 1 :] != "0" * m:
            raise ValueError(f"{strW!r} is not of the form 1 W' 1 0^{m}.")
        nCode = int(strW[1:m], 2)
        if nCode == 0:
            raise ValueError(f"{strW!r} has an all-zero W'.")
        lCodePrime.append(nCode)

    if len(set(lCodePrime)) != len(lCodePrime):
        raise ValueError(f"Family blocks must be distinct: {lStrW}.")

    aryW = np.stack([_aryWFromCode(nCode, nL) for nCode in lCodePrime])
    return WFamily(nL=nL, aryW=aryW, lCodePrime=lCodePrime)


def overlapTriples(family: WFamily) -> list[tuple[int, int, int]]:
    """Every (j, k, s) with W_k placed s positions after W_j agreeing on their overlap.

    Exhaustive over ordered pairs (self pairs included) and shifts 0 < s < L.
    """

    nL = family.nL
    lTriple: list[tuple[int, int, int]] = []
    for j, aryWJ in enumerate(family.aryW):
        for k, aryWK in enumerate(family.aryW):
            for s in range(1, nL):
                if np.array_equal(aryWJ[s:], aryWK[: nL - s]):
                    lTriple.append((j, k, s))
    return lTriple


@dataclass(frozen=True)
class PerturbationPlan:
    """Parameters of the construction; K = ceil(2 / eps**2) and r1 = K M are derived.

    nN = 0 selects the smallest threshold 2 r + 2.
    """

    gEpsilon: float
    gDelta: float
    nL: int
    r: int
    nM: int
    nN: int = 0
    seed: int = 0
    nK: int = field(init=False)
    nR1: int = field(init=False)

    def __post_init__(self) -> None:
        if not 0.0 < self.gEpsilon < 1.0:
            raise ValueError(f"epsilon must lie in (0, 1), got {self.gEpsilon}.")
        if not 0.0 < self.gDelta <= 1.0:
            raise ValueError(f"delta must lie in (0, 1], got {self.gDelta}.")

        # round() keeps 2 / 0.5**2 from becoming 9 through float error.

        nK = math.ceil(round(2.0 / self.gEpsilon**2, 9))
        object.__setattr__(self, "nK", nK)
        _checkFamilyShape(nK, self.nL)

        gRMin = 2.0 * self.nL / self.gDelta
        if not self.r > gRMin:
            raise ValueError(
                f"r = {self.r} is too small: it must exceed 2 L / delta = {gRMin:.4g}, "
                f"since marker writes alone change about L / r of the sequence and that "
                f"share must stay below delta / 2."
            )

        nNMin = 2 * self.r + 2
        if self.nN == 0:
            object.__setattr__(self, "nN", nNMin)
        elif self.nN < nNMin:
            raise ValueError(
                f"N = {self.nN} is too small: blocks shorter than 2 r + 2 = {nNMin} need not "
                f"contain a branded marker."
            )

        if self.nM < 2 * (self.r + 1):
            raise ValueError(
                f"Sector length M = {self.nM} must be at least 2 (r + 1) = {2 * (self.r + 1)} "
                f"so every sector holds a marker."
            )
        if not 0 <= self.seed < 1 << 64:
            raise ValueError(f"Seed must be a 64-bit nonnegative integer, got {self.seed}.")

        object.__setattr__(self, "nR1", nK * self.nM)

    def mpToMapping(self) -> dict[str, object]:
        mp: dict[str, object] = {
            strKey: getattr(self, strField) for strKey, strField in g_mpStrKeyStrField.items()
        }
        mp["K"] = self.nK
        mp["r1"] = self.nR1
        return mp


def planFromMapping(mp: dict[str, object]) -> PerturbationPlan:
    """Build a plan from report keys; derived K and r1 are recomputed, not trusted."""

    lStrUnknown = sorted(set(mp) - set(g_mpStrKeyStrField) - set(LSTR_KEY_DERIVED))
    if lStrUnknown:
        raise ValueError(f"Unknown plan keys: {', '.join(lStrUnknown)}")

    lStrMissing = [strKey for strKey in ("epsilon", "delta", "L", "r", "M") if strKey not in mp]
    if lStrMissing:
        raise ValueError(f"Plan is missing keys: {', '.join(lStrMissing)}")

    mpField = {
        strField: mp[strKey] for strKey, strField in g_mpStrKeyStrField.items() if strKey in mp
    }
    return PerturbationPlan(**mpField)  # type: ignore[arg-type]


def planLayout(plan: PerturbationPlan, nLength: int) -> tuple[MarkerSet, SectorLayout]:
    """The r-markers and sectors a plan lays over a sequence of nLength symbols."""

    markers = buildMarkers(nLength, plan.r, plan.seed)
    return markers, sectorLayout(markers, plan.nR1, plan.nK, plan.nM)


@dataclass(frozen=True)
class PlanReport:
    """What perturb did, with the a-priori change bounds beside the realized changes."""

    cMarker: int
    cMarkerWritten: int
    cR1Marker: int
    cSpan: int
    iLo: int
    iHi: int
    nEdge: int
    lCWrittenPerSector: list[int]
    lCReplacedPerSector: list[int]
    cReplaced: int
    cStraddle: int
    cChangedMarker: int
    cChangedFamily: int
    gChangeFraction: float
    gBoundMarker: float
    gBoundFamily: float
    gEdgeTerm: float
    lStrW: list[str]

    @property
    def gBound(self) -> float:
        return self.gBoundMarker + self.gBoundFamily + self.gEdgeTerm


@dataclass(frozen=True, eq=False)
class PerturbResult:
    seq: SymbolSequence
    gChangeFraction: float
    report: PlanReport
    family: WFamily
    layout: SectorLayout
    aryWriteStart: np.ndarray


def _aryCoverMask(aryStart: np.ndarray, nL: int, nLength: int) -> np.ndarray:
    """Boolean mask of the union of [p, p + nL) over starts p."""

    aryDelta = np.zeros(nLength + 1, dtype=np.int64)
    np.add.at(aryDelta, aryStart, 1)
    np.add.at(aryDelta, aryStart + nL, -1)
    return np.cumsum(aryDelta[:-1]) > 0


def cChangeOutsideWrites(
    seqBefore: SymbolSequence,
    seqAfter: SymbolSequence,
    aryWriteStart: np.ndarray,
    nL: int,
) -> int:
    """Changed positions not covered by any written block; zero for a sound perturbation."""

    if len(seqBefore) != len(seqAfter):
        raise ValueError(f"Length mismatch: {len(seqBefore)} vs {len(seqAfter)}.")

    fChanged = seqBefore.arySymbol != seqAfter.arySymbol
    fCovered = _aryCoverMask(np.asarray(aryWriteStart, dtype=np.int64), nL, len(seqBefore))
    return int(np.count_nonzero(fChanged & ~fCovered))


def perturb(
    seq: SymbolSequence,
    plan: PerturbationPlan,
    family: WFamily | None = None,
) -> PerturbResult:
    """Brand every sector with its family block and purge the other family blocks.

    Only complete r1-spans are touched. Passing the family of an earlier
    run makes a rerun a no-op; left to None, the family is chosen from
    the rarest blocks of seq.
    """

    if family is None:
        family = makeWFamily(plan.nK, plan.nL, plan.seed, seqBase=seq)
    elif family.nL != plan.nL or len(family) != plan.nK:
        raise ValueError(
            f"Family of {len(family)} blocks of length {family.nL} does not fit the plan "
            f"(K = {plan.nK}, L = {plan.nL})."
        )

    nLength = len(seq)
    nL = plan.nL
    markers, layout = planLayout(plan, nLength)
    iLo, iHi = layout.iLo, layout.iHi

    arySymOld = seq.arySymbol
    arySym = arySymOld.copy()

    # Brand: W_k right of every r-marker whose block fits inside the spans.

    aryMarker = markers.aryPos[(markers.aryPos >= iLo) & (markers.aryPos + nL <= iHi)]
    _, arySectorMarker = layout.sectorOf(aryMarker)
    arySym[aryMarker[:, None] + np.arange(nL)] = family.aryW[arySectorMarker]

    # Purge: family blocks starting in the spans that do not match their sector.

    aryStart, aryK = familyOccurrences(arySym, family)
    fInside = (aryStart >= iLo) & (aryStart + nL <= iHi)
    aryStart, aryK = aryStart[fInside], aryK[fInside]

    _, arySector = layout.sectorOf(aryStart)
    _, arySectorEnd = layout.sectorOf(aryStart + nL - 1)
    fStray = aryK != arySector

    aryReplace = aryStart[fStray]
    if aryReplace.size:
        arySym[aryReplace[:, None] + np.arange(nL)] = family.aryW[arySector[fStray]]

    seqNew = SymbolSequence(seq.alphabet, arySym)

    fChanged = arySymOld != arySym
    cChangedMarker = int(np.count_nonzero(fChanged & _aryCoverMask(aryMarker, nL, nLength)))
    cChangedFamily = int(np.count_nonzero(fChanged & _aryCoverMask(aryReplace, nL, nLength)))

    aryStartBase, _ = familyOccurrences(arySymOld, family)
    gChangeFraction = hammingFraction(seq, seqNew)

    report = PlanReport(
        cMarker=len(markers),
        cMarkerWritten=int(aryMarker.size),
        cR1Marker=int(layout.aryR1Pos.size),
        cSpan=layout.cSpan,
        iLo=iLo,
        iHi=iHi,
        nEdge=layout.nEdge(),
        lCWrittenPerSector=np.bincount(arySectorMarker, minlength=plan.nK).tolist(),
        lCReplacedPerSector=np.bincount(arySector[fStray], minlength=plan.nK).tolist(),
        cReplaced=int(aryReplace.size),
        cStraddle=int(np.count_nonzero(arySector != arySectorEnd)),
        cChangedMarker=cChangedMarker,
        cChangedFamily=cChangedFamily,
        gChangeFraction=gChangeFraction,
        gBoundMarker=nL / plan.r,
        gBoundFamily=nL * aryStartBase.size / (nLength - nL + 1),
        gEdgeTerm=nL / nLength,
        lStrW=family.lStrW(),
    )

    return PerturbResult(
        seq=seqNew,
        gChangeFraction=gChangeFraction,
        report=report,
        family=family,
        layout=layout,
        aryWriteStart=np.sort(np.concatenate((aryMarker, aryReplace))),
    )
