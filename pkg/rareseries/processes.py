"""Seeded generators of stationary symbolic processes.

Four kinds of test-bed process are supported: independent (iid),
Markov, codings of an irrational circle rotation, and periodic words.

Reproducibility contract: every generator draws from
numpy.random.Generator(PCG64(SeedSequence([seed]))), a platform-stable
64-bit generator. iid draws one float per position and picks the first
symbol whose cumulative probability exceeds it; Markov does the same
against the current row; rotation draws the phase from the first float
and emits the index of the half-open cell [c_i, c_(i+1)) holding
(phase + k * alpha) mod 1, the last cell wrapping around through 0.
"""

import bisect
import math
import tomllib
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .symbols import Alphabet, Block, SymbolSequence

LSTR_KIND = ("iid", "markov", "rotation", "periodic")

G_SUM_TOLERANCE = 1e-12

U_SEED_LIMIT = 1 << 64

# Keys accepted in a process spec file, mapped to ProcessSpec fields.

g_mpStrKeyStrField: dict[str, str] = {
    "kind": "strKind",
    "seed": "seed",
    "alphabet": "nAlphabet",
    "p": "lGProb",
    "matrix": "llGTransition",
    "initial": "lGInitial",
    "alpha": "gAlpha",
    "cuts": "lGCut",
    "word": "lSymWord",
}


def rngFromSeed(seed: int, *lSalt: int) -> np.random.Generator:
    """The documented PRNG: PCG64 seeded through SeedSequence([seed, *salt])."""

    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([seed, *lSalt])))


def _checkProbabilityVector(lGProb: tuple[float, ...], strWhat: str) -> None:
    if len(lGProb) < 1:
        raise ValueError(f"{strWhat} must not be empty.")
    if any(not math.isfinite(g) or g < 0.0 for g in lGProb):
        raise ValueError(f"{strWhat} must be finite and nonnegative: {list(lGProb)}.")
    if abs(math.fsum(lGProb) - 1.0) > G_SUM_TOLERANCE:
        raise ValueError(f"{strWhat} must sum to 1 (within {G_SUM_TOLERANCE}): {list(lGProb)}.")


def stationaryDistribution(llGTransition: tuple[tuple[float, ...], ...]) -> tuple[float, ...]:
    """Solve pi P = pi with sum(pi) = 1 by least squares."""

    aryP = np.asarray(llGTransition, dtype=np.float64)
    nState = aryP.shape[0]

    aryA = np.vstack([aryP.T - np.eye(nState), np.ones((1, nState))])
    aryB = np.zeros(nState + 1)
    aryB[-1] = 1.0

    aryPi = np.linalg.lstsq(aryA, aryB, rcond=None)[0]
    aryPi = np.clip(aryPi, 0.0, None)
    aryPi /= aryPi.sum()
    return tuple(float(g) for g in aryPi)


@dataclass(frozen=True)
class ProcessSpec:
    """Parameters of one test-bed process. Only the fields of strKind are used.

    nAlphabet is inferred from the parameters when left at 0.
    """

    strKind: str
    seed: int = 0
    nAlphabet: int = 0
    lGProb: tuple[float, ...] = ()
    llGTransition: tuple[tuple[float, ...], ...] = ()
    lGInitial: tuple[float, ...] = ()
    gAlpha: float = 0.0
    lGCut: tuple[float, ...] = ()
    lSymWord: tuple[int, ...] = ()

    def __post_init__(self) -> None:
        # Normalize list inputs (e.g. from TOML) to tuples.

        object.__setattr__(self, "lGProb", tuple(float(g) for g in self.lGProb))
        object.__setattr__(
            self, "llGTransition", tuple(tuple(float(g) for g in lG) for lG in self.llGTransition)
        )
        object.__setattr__(self, "lGInitial", tuple(float(g) for g in self.lGInitial))
        object.__setattr__(self, "lGCut", tuple(float(g) for g in self.lGCut))
        object.__setattr__(self, "lSymWord", tuple(int(sym) for sym in self.lSymWord))

        if self.strKind not in LSTR_KIND:
            raise ValueError(
                f"Unknown process kind {self.strKind!r}. Known kinds: {', '.join(LSTR_KIND)}"
            )
        if not 0 <= self.seed < U_SEED_LIMIT:
            raise ValueError(f"Seed must be a 64-bit nonnegative integer, got {self.seed}.")

        nInferred = self._nAlphabetValidated()
        nAlphabet = self.nAlphabet or nInferred
        if nAlphabet < nInferred:
            raise ValueError(
                f"Alphabet size {nAlphabet} is smaller than the {nInferred} symbols "
                f"the {self.strKind} parameters use."
            )
        Alphabet(nAlphabet)
        object.__setattr__(self, "nAlphabet", nAlphabet)

    def _nAlphabetValidated(self) -> int:
        """Validate the kind-specific parameters; return the symbol count they imply."""

        match self.strKind:
            case "iid":
                _checkProbabilityVector(self.lGProb, "iid probability vector p")
                return max(2, len(self.lGProb))

            case "markov":
                nState = len(self.llGTransition)
                if nState < 2 or any(len(lG) != nState for lG in self.llGTransition):
                    raise ValueError("Markov matrix must be square with at least 2 states.")
                for iRow, lG in enumerate(self.llGTransition):
                    _checkProbabilityVector(lG, f"Markov matrix row {iRow}")
                if self.lGInitial:
                    if len(self.lGInitial) != nState:
                        raise ValueError(
                            "Markov initial distribution must have one entry per state."
                        )
                    _checkProbabilityVector(self.lGInitial, "Markov initial distribution")
                else:
                    object.__setattr__(
                        self, "lGInitial", stationaryDistribution(self.llGTransition)
                    )
                return nState

            case "rotation":
                if not math.isfinite(self.gAlpha) or not 0.0 < self.gAlpha < 1.0:
                    raise ValueError(f"Rotation angle must lie in (0, 1), got {self.gAlpha}.")
                if len(self.lGCut) < 2:
                    raise ValueError("Rotation needs at least 2 cut points.")
                if any(not 0.0 <= g < 1.0 for g in self.lGCut) or any(
                    gB <= gA for gA, gB in zip(self.lGCut, self.lGCut[1:])
                ):
                    raise ValueError(
                        f"Rotation cut points must be strictly increasing in [0, 1): "
                        f"{list(self.lGCut)}."
                    )
                return len(self.lGCut)

            case "periodic":
                if not self.lSymWord or min(self.lSymWord) < 0:
                    raise ValueError("Periodic word must be a nonempty list of symbols >= 0.")
                return max(2, max(self.lSymWord) + 1)

        raise AssertionError(self.strKind)

    def mpToMapping(self) -> dict[str, object]:
        """The spec-file form of this spec (only the fields of its kind)."""

        mp: dict[str, object] = {
            "kind": self.strKind,
            "seed": self.seed,
            "alphabet": self.nAlphabet,
        }
        match self.strKind:
            case "iid":
                mp["p"] = list(self.lGProb)
            case "markov":
                mp["matrix"] = [list(lG) for lG in self.llGTransition]
                mp["initial"] = list(self.lGInitial)
            case "rotation":
                mp["alpha"] = self.gAlpha
                mp["cuts"] = list(self.lGCut)
            case "periodic":
                mp["word"] = list(self.lSymWord)
        return mp


def processSpecFromMapping(mp: dict[str, object], seed: int | None = None) -> ProcessSpec:
    """Build a ProcessSpec from spec-file keys; an explicit seed overrides the file's."""

    lStrUnknown = sorted(set(mp) - set(g_mpStrKeyStrField))
    if lStrUnknown:
        raise ValueError(f"Unknown process spec keys: {', '.join(lStrUnknown)}")
    if "kind" not in mp:
        raise ValueError("Process spec must set 'kind'.")

    mpField = {g_mpStrKeyStrField[strKey]: value for strKey, value in mp.items()}
    if seed is not None:
        mpField["seed"] = seed

    return ProcessSpec(**mpField)  # type: ignore[arg-type]


def processSpecFromToml(path: Path, seed: int | None = None) -> ProcessSpec:
    """Load a ProcessSpec from a TOML spec file."""

    if not path.is_file():
        raise FileNotFoundError(f"Process spec file not found: {path}")

    with path.open("rb") as file:
        try:
            mp = tomllib.load(file)
        except tomllib.TOMLDecodeError as err:
            raise ValueError(f"{path}: {err}") from None

    return processSpecFromMapping(mp, seed=seed)


def _aryCumulative(lGProb: tuple[float, ...]) -> np.ndarray:
    """Cumulative sums with the last entry pinned to exactly 1."""

    aryCum = np.cumsum(np.asarray(lGProb, dtype=np.float64))
    aryCum[-1] = 1.0
    return aryCum


def generate(spec: ProcessSpec, nLength: int) -> SymbolSequence:
    """Generate nLength symbols; bit-identical for a fixed spec and seed."""

    if nLength < 1:
        raise ValueError(f"Sequence length must be >= 1, got {nLength}.")

    rng = rngFromSeed(spec.seed)

    match spec.strKind:
        case "iid":
            aryU = rng.random(nLength)
            arySym = np.searchsorted(_aryCumulative(spec.lGProb), aryU, side="right")

        case "markov":
            aryU = rng.random(nLength)
            lLGCum = [_aryCumulative(lG).tolist() for lG in spec.llGTransition]

            iState = int(np.searchsorted(_aryCumulative(spec.lGInitial), aryU[0], side="right"))
            lSym = [iState]
            for gU in aryU[1:].tolist():
                iState = bisect.bisect_right(lLGCum[iState], gU)
                lSym.append(iState)
            arySym = np.array(lSym, dtype=np.int64)

        case "rotation":
            gPhase = float(rng.random())
            aryX = np.mod(gPhase + spec.gAlpha * np.arange(nLength, dtype=np.float64), 1.0)
            arySym = np.searchsorted(np.asarray(spec.lGCut), aryX, side="right") - 1
            arySym[arySym < 0] = len(spec.lGCut) - 1

        case "periodic":
            arySym = np.resize(np.asarray(spec.lSymWord, dtype=np.int64), nLength)

        case _:
            raise AssertionError(spec.strKind)

    return SymbolSequence(Alphabet(spec.nAlphabet), arySym)


def exactBlockProbability(spec: ProcessSpec, block: Block) -> float:
    """The stationary measure of the cylinder of block, where it has a closed form."""

    if block.alphabet.nSize != spec.nAlphabet:
        raise ValueError(
            f"Alphabet mismatch: block has {block.alphabet.nSize} symbols, "
            f"process has {spec.nAlphabet}."
        )

    lSym = [int(sym) for sym in block.aryPattern]

    match spec.strKind:
        case "iid":
            lGProb = spec.lGProb + (0.0,) * (spec.nAlphabet - len(spec.lGProb))
            return math.prod(lGProb[sym] for sym in lSym)

        case "markov":
            if max(lSym) >= len(spec.lGInitial):
                return 0.0
            gProb = spec.lGInitial[lSym[0]]
            for symFrom, symTo in zip(lSym, lSym[1:]):
                gProb *= spec.llGTransition[symFrom][symTo]
            return gProb

        case "periodic":
            lSymWord = spec.lSymWord
            nPeriod = len(lSymWord)
            cMatch = sum(
                all(lSymWord[(iStart + j) % nPeriod] == sym for j, sym in enumerate(lSym))
                for iStart in range(nPeriod)
            )
            return cMatch / nPeriod

    raise ValueError(f"No exact block probability for {spec.strKind!r} processes.")
