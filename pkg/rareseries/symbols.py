"""Symbol sequences, blocks, and exact occurrence scanning.

Everything else in rareseries consumes these types. Sequences are flat
uint8 arrays (alphabets of at most 256 symbols), blocks are short
patterns over the same alphabet, and an OccurrenceList holds the start
positions of a block, overlaps included.
"""

from dataclasses import dataclass
from typing import Callable

import numpy as np

N_ALPHABET_MAX = 256

# Windows whose exact code fits in this many bits are grouped exactly;
# longer windows are bucketed by a 128-bit polynomial fingerprint and
# every bucket is then checked window by window.

N_BIT_EXACT = 62

# Odd multipliers for the two 64-bit rolling fingerprints.

G_L_HASH_BASE: tuple[int, int] = (
    0x9E3779B97F4A7C15,
    0xC2B2AE3D27D4EB4F,
)

U_MOD_64 = 1 << 64

# Bytes compared per chunk when checking fingerprint buckets.

N_CHECK_CELLS = 1 << 24


@dataclass(frozen=True)
class Alphabet:
    """Symbols are the integers 0..nSize-1."""

    nSize: int

    def __post_init__(self) -> None:
        if not 2 <= self.nSize <= N_ALPHABET_MAX:
            raise ValueError(
                f"Alphabet size must be between 2 and {N_ALPHABET_MAX}, got {self.nSize}."
            )

    def strSymbols(self, arySym: np.ndarray) -> str:
        """Render symbols as a digit string (l <= 10) or comma-separated integers."""

        if self.nSize <= 10:
            return "".join(str(int(sym)) for sym in arySym)
        return ",".join(str(int(sym)) for sym in arySym)


def _arySymbolValidated(arySym: object, alphabet: Alphabet, strWhat: str) -> np.ndarray:
    """Check range and shape, then freeze a contiguous uint8 copy."""

    ary = np.asarray(arySym)
    if ary.ndim != 1:
        raise ValueError(f"{strWhat} must be one-dimensional, got shape {ary.shape}.")
    if ary.size == 0:
        raise ValueError(f"{strWhat} must not be empty.")
    if not np.issubdtype(ary.dtype, np.integer):
        raise ValueError(f"{strWhat} must hold integer symbols, got dtype {ary.dtype}.")
    if int(ary.min()) < 0 or int(ary.max()) >= alphabet.nSize:
        raise ValueError(
            f"{strWhat} has symbols outside 0..{alphabet.nSize - 1} "
            f"(min {int(ary.min())}, max {int(ary.max())})."
        )

    aryFrozen = np.ascontiguousarray(ary, dtype=np.uint8).copy()
    aryFrozen.flags.writeable = False
    return aryFrozen


@dataclass(frozen=True, eq=False)
class SymbolSequence:
    """A finite window of a symbolic process: positions 0..len-1."""

    alphabet: Alphabet
    arySymbol: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "arySymbol", _arySymbolValidated(self.arySymbol, self.alphabet, "Sequence")
        )

    def __len__(self) -> int:
        return int(self.arySymbol.size)

    @classmethod
    def fromSymbols(cls, lSym: object, nAlphabet: int = 2) -> "SymbolSequence":
        return cls(Alphabet(nAlphabet), np.asarray(lSym))

    @classmethod
    def fromString(cls, strSym: str, nAlphabet: int = 2) -> "SymbolSequence":
        """Build from a digit string such as '0101' (alphabets up to 10 symbols)."""

        return cls(Alphabet(nAlphabet), np.array([int(ch) for ch in strSym], dtype=np.int64))

    def strSymbols(self) -> str:
        return self.alphabet.strSymbols(self.arySymbol)


@dataclass(frozen=True, eq=False)
class Block:
    """A cylinder pattern: the rare event whose occurrences are studied."""

    alphabet: Alphabet
    aryPattern: np.ndarray

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "aryPattern", _arySymbolValidated(self.aryPattern, self.alphabet, "Block")
        )

    def __len__(self) -> int:
        return int(self.aryPattern.size)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, Block):
            return NotImplemented
        return self.alphabet == other.alphabet and bool(
            np.array_equal(self.aryPattern, other.aryPattern)
        )

    def __hash__(self) -> int:
        return hash((self.alphabet.nSize, self.aryPattern.tobytes()))

    @classmethod
    def fromSymbols(cls, lSym: object, nAlphabet: int = 2) -> "Block":
        return cls(Alphabet(nAlphabet), np.asarray(lSym))

    @classmethod
    def fromString(cls, strSym: str, nAlphabet: int = 2) -> "Block":
        """Parse '010' (digits) or '3,11,2' (comma-separated, for large alphabets)."""

        if "," in strSym:
            lSym = [int(strPart) for strPart in strSym.split(",")]
        else:
            lSym = [int(ch) for ch in strSym.strip()]
        return cls(Alphabet(nAlphabet), np.array(lSym, dtype=np.int64))

    def strPattern(self) -> str:
        return self.alphabet.strSymbols(self.aryPattern)


@dataclass(frozen=True, eq=False)
class OccurrenceList:
    """Start positions of a block in a sequence, strictly increasing."""

    aryPos: np.ndarray
    nSequence: int
    nBlock: int

    def __post_init__(self) -> None:
        aryPos = np.array(self.aryPos, dtype=np.int64)
        if aryPos.ndim != 1:
            raise ValueError("Occurrence positions must be one-dimensional.")
        if aryPos.size > 0:
            if np.any(np.diff(aryPos) <= 0):
                raise ValueError("Occurrence positions must be strictly increasing.")
            if int(aryPos[0]) < 0 or int(aryPos[-1]) + self.nBlock > self.nSequence:
                raise ValueError(
                    f"Occurrence positions must satisfy 0 <= p and p + {self.nBlock} "
                    f"<= {self.nSequence}."
                )
        aryPos.flags.writeable = False
        object.__setattr__(self, "aryPos", aryPos)

    def __len__(self) -> int:
        return int(self.aryPos.size)

    def cSlot(self) -> int:
        """Positions that could host an occurrence: T - n + 1."""

        return self.nSequence - self.nBlock + 1


def _checkSameAlphabet(alphabetA: Alphabet, alphabetB: Alphabet) -> None:
    if alphabetA != alphabetB:
        raise ValueError(
            f"Alphabet mismatch: {alphabetA.nSize} symbols vs {alphabetB.nSize} symbols."
        )


def scanOccurrences(seq: SymbolSequence, block: Block) -> OccurrenceList:
    """Return every start i with seq[i:i+n] == block, overlaps included.

    Candidates start as the positions matching the first symbol and are
    filtered one pattern symbol at a time, so the work shrinks with the
    candidate set.
    """

    _checkSameAlphabet(seq.alphabet, block.alphabet)

    nSeq = len(seq)
    nBlock = len(block)
    if nBlock > nSeq:
        return OccurrenceList(np.empty(0, dtype=np.int64), nSeq, nBlock)

    arySym = seq.arySymbol
    aryPattern = block.aryPattern

    aryCand = np.flatnonzero(arySym[: nSeq - nBlock + 1] == aryPattern[0])
    for iSym in range(1, nBlock):
        if aryCand.size == 0:
            break
        aryCand = aryCand[arySym[aryCand + iSym] == aryPattern[iSym]]

    return OccurrenceList(aryCand.astype(np.int64), nSeq, nBlock)


def empiricalMeasure(occ: OccurrenceList) -> float:
    """Fraction of the T - n + 1 slots where the block occurs."""

    if occ.nSequence < occ.nBlock:
        raise ValueError(
            f"Sequence of length {occ.nSequence} is shorter than the block ({occ.nBlock})."
        )
    return len(occ) / occ.cSlot()


def hammingFraction(seqA: SymbolSequence, seqB: SymbolSequence) -> float:
    """Fraction of positions where two equal-length sequences differ."""

    _checkSameAlphabet(seqA.alphabet, seqB.alphabet)
    if len(seqA) != len(seqB):
        raise ValueError(f"Length mismatch: {len(seqA)} vs {len(seqB)}.")

    return int(np.count_nonzero(seqA.arySymbol != seqB.arySymbol)) / len(seqA)


# -- Window grouping -------------------------------------------------------------


def _aryDoubled(
    aryValue: np.ndarray,
    n: int,
    combine: Callable[[np.ndarray, int, np.ndarray], np.ndarray],
) -> np.ndarray:
    """Fold per-position values into per-window values by binary doubling.

    aryPow holds the values of windows of length nPow, aryAcc those of
    length nAcc; combine(left, nRight, right) appends a right window of
    length nRight to a left one. O(T log n) vectorized work.
    """

    aryAcc: np.ndarray | None = None
    nAcc = 0
    aryPow = aryValue
    nPow = 1
    nRest = n

    while True:
        if nRest & 1:
            if aryAcc is None:
                aryAcc, nAcc = aryPow, nPow
            else:
                c = aryValue.size - (nAcc + nPow) + 1
                aryAcc = combine(aryAcc[:c], nPow, aryPow[nAcc : nAcc + c])
                nAcc += nPow

        nRest >>= 1
        if nRest == 0:
            assert aryAcc is not None
            return aryAcc

        c = aryPow.size - nPow
        aryPow = combine(aryPow[:c], nPow, aryPow[nPow : nPow + c])
        nPow *= 2


def _lAryWindowKey(arySym: np.ndarray, nAlphabet: int, n: int) -> list[np.ndarray]:
    """Per-window keys: one exact code, or two independent fingerprints."""

    nBit = max(1, (nAlphabet - 1).bit_length())

    if n * nBit <= N_BIT_EXACT:
        aryValue = arySym.astype(np.uint64)

        def combineExact(aryLeft: np.ndarray, nRight: int, aryRight: np.ndarray) -> np.ndarray:
            return (aryLeft << np.uint64(nRight * nBit)) | aryRight

        return [_aryDoubled(aryValue, n, combineExact)]

    aryValue = arySym.astype(np.uint64) + np.uint64(1)
    lAryKey: list[np.ndarray] = []

    for uBase in G_L_HASH_BASE:

        def combineHash(
            aryLeft: np.ndarray, nRight: int, aryRight: np.ndarray, uBase: int = uBase
        ) -> np.ndarray:
            # uint64 array arithmetic wraps, i.e. works modulo 2**64.

            return aryLeft * np.uint64(pow(uBase, nRight, U_MOD_64)) + aryRight

        lAryKey.append(_aryDoubled(aryValue, n, combineHash))

    return lAryKey


def _splitCollisions(
    arySym: np.ndarray,
    n: int,
    aryOrder: np.ndarray,
    aryGroupStart: np.ndarray,
) -> tuple[np.ndarray, np.ndarray]:
    """Split fingerprint groups that hold different windows.

    Every window is compared with the first window of its group. Groups
    with a mismatch are regrouped by exact row comparison; the others
    are kept as they are. Returns the new (aryOrder, aryGroupStart).
    """

    aryWindow = np.lib.stride_tricks.sliding_window_view(arySym, n)
    aryCount = np.diff(np.append(aryGroupStart, aryOrder.size))
    aryGroupId = np.repeat(np.arange(aryCount.size), aryCount)
    aryLeader = aryOrder[aryGroupStart][aryGroupId]

    iMember = np.flatnonzero(aryCount[aryGroupId] >= 2)
    fMismatch = np.zeros(aryOrder.size, dtype=bool)
    cChunk = max(1, N_CHECK_CELLS // n)
    for iChunk in range(0, iMember.size, cChunk):
        aryI = iMember[iChunk : iChunk + cChunk]
        fMismatch[aryI] = np.any(aryWindow[aryOrder[aryI]] != aryWindow[aryLeader[aryI]], axis=1)

    aryGroupBad = np.unique(aryGroupId[fMismatch])
    if aryGroupBad.size == 0:
        return aryOrder, aryGroupStart

    arySub = np.zeros(aryOrder.size, dtype=np.int64)
    for iGroup in aryGroupBad:
        iStart = int(aryGroupStart[iGroup])
        iEnd = iStart + int(aryCount[iGroup])
        _, aryInverse = np.unique(aryWindow[aryOrder[iStart:iEnd]], axis=0, return_inverse=True)
        arySub[iStart:iEnd] = aryInverse.reshape(-1)

    # lexsort is stable, so positions stay increasing inside each group.

    aryResort = np.lexsort((arySub, aryGroupId))
    aryGroupId = aryGroupId[aryResort]
    arySub = arySub[aryResort]

    fNew = np.ones(aryOrder.size, dtype=bool)
    fNew[1:] = (aryGroupId[1:] != aryGroupId[:-1]) | (arySub[1:] != arySub[:-1])
    return aryOrder[aryResort], np.flatnonzero(fNew)


@dataclass(frozen=True, eq=False)
class BlockGroups:
    """All windows of one length, grouped by content.

    aryStart lists window starts ordered by group and, within a group,
    by position; group g occupies aryStart[aryGroupStart[g]:][:aryCount[g]].
    """

    n: int
    aryStart: np.ndarray
    aryGroupStart: np.ndarray
    aryCount: np.ndarray

    def __len__(self) -> int:
        return int(self.aryCount.size)

    def filtered(self, cMin: int) -> "BlockGroups":
        """Keep only groups with at least cMin windows."""

        fKeep = self.aryCount >= cMin
        aryCount = self.aryCount[fKeep]
        aryStart = self.aryStart[np.repeat(fKeep, self.aryCount)]
        aryGroupStart = np.cumsum(aryCount) - aryCount

        return BlockGroups(
            n=self.n,
            aryStart=aryStart,
            aryGroupStart=aryGroupStart.astype(np.int64),
            aryCount=aryCount.astype(np.int64),
        )

    def aryPosOfGroup(self, iGroup: int) -> np.ndarray:
        iStart = int(self.aryGroupStart[iGroup])
        return self.aryStart[iStart : iStart + int(self.aryCount[iGroup])]


def blockGroups(
    seq: SymbolSequence,
    n: int,
    iLo: int = 0,
    iHi: int | None = None,
) -> BlockGroups:
    """Group every length-n window lying inside [iLo, iHi) by content."""

    iHi = len(seq) if iHi is None else iHi
    if not 0 <= iLo < iHi <= len(seq):
        raise ValueError(f"Invalid window range [{iLo}, {iHi}) for length {len(seq)}.")
    if not 1 <= n <= iHi - iLo:
        raise ValueError(f"Block length {n} out of range 1..{iHi - iLo}.")

    arySym = seq.arySymbol[iLo:iHi]
    lAryKey = _lAryWindowKey(arySym, seq.alphabet.nSize, n)

    # Stable sorts keep positions increasing inside each group.

    if len(lAryKey) == 1:
        aryOrder = np.argsort(lAryKey[0], kind="stable")
    else:
        aryOrder = np.lexsort(tuple(reversed(lAryKey)))

    fNew = np.zeros(aryOrder.size, dtype=bool)
    fNew[0] = True
    for aryKey in lAryKey:
        aryKeySorted = aryKey[aryOrder]
        fNew[1:] |= aryKeySorted[1:] != aryKeySorted[:-1]

    aryGroupStart = np.flatnonzero(fNew)
    if len(lAryKey) > 1:
        aryOrder, aryGroupStart = _splitCollisions(arySym, n, aryOrder, aryGroupStart)
    aryCount = np.diff(np.append(aryGroupStart, aryOrder.size))

    return BlockGroups(
        n=n,
        aryStart=(aryOrder + iLo).astype(np.int64),
        aryGroupStart=aryGroupStart.astype(np.int64),
        aryCount=aryCount.astype(np.int64),
    )


def enumerateBlocks(
    seq: SymbolSequence,
    n: int,
    cMin: int = 1,
) -> list[tuple[Block, OccurrenceList]]:
    """All distinct length-n blocks occurring at least cMin times.

    Returned in order of first occurrence. One grouping pass over the
    sequence; the occurrence lists equal what scanOccurrences returns.
    """

    if not 1 <= n <= len(seq):
        raise ValueError(f"Block length {n} out of range 1..{len(seq)}.")

    groups = blockGroups(seq, n).filtered(cMin)
    aryFirst = groups.aryStart[groups.aryGroupStart]

    lResult: list[tuple[Block, OccurrenceList]] = []
    for iGroup in np.argsort(aryFirst, kind="stable"):
        aryPos = groups.aryPosOfGroup(int(iGroup))
        iFirst = int(aryPos[0])
        block = Block(seq.alphabet, seq.arySymbol[iFirst : iFirst + n])
        lResult.append((block, OccurrenceList(aryPos.copy(), len(seq), n)))

    return lResult


def distinctBlockCounts(seq: SymbolSequence, nMax: int) -> list[int]:
    """Complexity function: number of distinct blocks of each length 1..nMax."""

    return [len(blockGroups(seq, n)) for n in range(1, nMax + 1)]


def blockEntropy(seq: SymbolSequence, n: int) -> float:
    """Shannon entropy (bits) of the empirical distribution of length-n blocks."""

    aryCount = blockGroups(seq, n).aryCount
    aryP = aryCount / aryCount.sum()
    return float(-(aryP * np.log2(aryP)).sum())


def entropyRateEstimate(seq: SymbolSequence, n: int) -> float:
    """Conditional block entropy H_n - H_(n-1), in bits per symbol."""

    if n < 1:
        raise ValueError(f"Block length must be >= 1, got {n}.")
    if n == 1:
        return blockEntropy(seq, 1)
    return max(0.0, blockEntropy(seq, n) - blockEntropy(seq, n - 1))
