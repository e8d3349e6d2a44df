"""Reference laws, the entry/return relation, and the clustering classifier.

The reference is the parameter-one exponential law 1 - exp(-t). The
entry CDF F and return CDF G of a block are tied by

    F(t) = integral over [0, t] of (1 - G(s)) ds,

whose only fixed point is the exponential law. A block clusters
(attracts) when F(t) <= 1 - exp(-t); for positive-entropy limits that
inequality always holds, which is why an excess is only a warning sign
for zero-entropy data.
"""

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .recurrence import EmpiricalCdf

LG_T_GRID_DEFAULT: tuple[float, ...] = (0.1, 0.25, 0.5, 1.0, 2.0, 4.0)

G_ALPHA_DEFAULT = 0.01
G_EPSILON_DEFAULT = 0.5

# Entropy rates (bits per symbol) below this are treated as zero entropy.

G_ZERO_ENTROPY_RATE = 0.01

N_GRID_MAX = 100_001

STR_ENTROPY_CAVEAT = (
    "F(t) <= 1 - exp(-t) is guaranteed only for limits of positive-entropy processes; "
    "an excess on zero-entropy data is an expected exception, not a contradiction."
)


def expLaw(t: float | np.ndarray) -> float | np.ndarray:
    """1 - exp(-t) for t >= 0."""

    aryT = np.asarray(t, dtype=np.float64)
    if np.any(aryT < 0.0):
        raise ValueError("The exponential law is defined for t >= 0.")

    ary = -np.expm1(-aryT)
    return float(ary) if np.ndim(ary) == 0 else ary


class ExponentialLaw:
    """The parameter-one exponential law as a CDF object."""

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        return expLaw(t)

    def integratedSurvival(self, t: float | np.ndarray) -> float | np.ndarray:
        # The integral of exp(-s) over [0, t] is the law itself.

        return expLaw(t)


class LatticeExponentialLaw:
    """Exponential law seen on the lattice of a discrete-time sample.

    With slot probability mu, a memoryless block has entry time
    geometric(mu), so the normalized CDF is 1 - (1 - mu) ** floor(t / mu).
    It tends to 1 - exp(-t) as mu -> 0.
    """

    def __init__(self, gMu: float) -> None:
        if not 0.0 < gMu <= 1.0:
            raise ValueError(f"Lattice step must lie in (0, 1], got {gMu}.")
        self.gMu = gMu

    def __call__(self, t: float | np.ndarray) -> float | np.ndarray:
        aryT = np.asarray(t, dtype=np.float64)
        if np.any(aryT < 0.0):
            raise ValueError("The exponential law is defined for t >= 0.")

        ary = 1.0 - np.power(1.0 - self.gMu, np.floor(aryT / self.gMu))
        return float(ary) if np.ndim(ary) == 0 else ary


EXP_LAW = ExponentialLaw()


def starTransform(cdfReturn: EmpiricalCdf | ExponentialLaw) -> Callable[[float], float]:
    """The function t -> integral over [0, t] of (1 - G(s)) ds.

    Exact for step CDFs (piecewise linear between jumps, no quadrature).
    """

    return cdfReturn.integratedSurvival


def _checkSameNormalization(cdfEntry: EmpiricalCdf, cdfReturn: EmpiricalCdf) -> None:
    if not math.isclose(cdfEntry.gMuHat, cdfReturn.gMuHat, rel_tol=1e-12):
        raise ValueError(
            "Entry and return CDFs must come from the same block and sequence "
            f"(mu_hat {cdfEntry.gMuHat} vs {cdfReturn.gMuHat})."
        )


def aryLatticeGrid(gMu: float, gTMax: float) -> np.ndarray:
    """Normalized times mu * k, k = 0..floor(tMax / mu), thinned to N_GRID_MAX points."""

    kMax = math.floor(gTMax / gMu)
    aryK = np.arange(kMax + 1, dtype=np.int64)
    if aryK.size > N_GRID_MAX:
        aryK = np.unique(np.round(np.linspace(0, kMax, N_GRID_MAX)).astype(np.int64))
    return gMu * aryK


def starResidual(cdfEntry: EmpiricalCdf, cdfReturn: EmpiricalCdf, gTMax: float) -> float:
    """sup over [0, tMax] of |F_entry - starTransform(F_return)|.

    The sup is taken on the lattice mu_hat * k of whole time steps: a
    discrete-time sample only sees the relation at integer times, where
    it holds exactly for stationary processes.

    t_max = 0 leaves only t = 0, where both sides vanish.
    """

    _checkSameNormalization(cdfEntry, cdfReturn)
    if not gTMax >= 0.0:
        raise ValueError(f"t_max must be >= 0, got {gTMax}.")

    aryT = aryLatticeGrid(cdfReturn.gMuHat, gTMax)
    aryTransform = starTransform(cdfReturn)(aryT)
    return float(np.abs(cdfEntry(aryT) - aryTransform).max())


@dataclass(frozen=True)
class EntropyBoundReport:
    """Largest excess of F over the exponential law on (0, tMax]."""

    gMaxExcess: float
    gTAtMax: float
    gTol: float
    fFlagged: bool
    gEntropyRate: float | None
    fZeroEntropyException: bool
    strCaveat: str = STR_ENTROPY_CAVEAT


def checkEntropyBound(
    cdfEntry: Callable[[np.ndarray], np.ndarray],
    gTol: float,
    gTMax: float = 4.0,
    gEntropyRate: float | None = None,
) -> EntropyBoundReport:
    """max over t of F(t) - (1 - exp(-t)), flagged when above gTol.

    Empirical CDFs are checked at every jump (where the excess peaks)
    plus a uniform grid; t = 0 is excluded since both sides vanish there.
    """

    aryT = np.linspace(gTMax / 400, gTMax, 400)
    if isinstance(cdfEntry, EmpiricalCdf):
        arySupport = cdfEntry.arySupport
        aryT = np.union1d(aryT, arySupport[(arySupport > 0.0) & (arySupport <= gTMax)])

    aryExcess = np.asarray(cdfEntry(aryT), dtype=np.float64) - expLaw(aryT)
    iMax = int(np.argmax(aryExcess))
    gMaxExcess = float(aryExcess[iMax])
    fFlagged = gMaxExcess > gTol

    return EntropyBoundReport(
        gMaxExcess=gMaxExcess,
        gTAtMax=float(aryT[iMax]),
        gTol=gTol,
        fFlagged=fFlagged,
        gEntropyRate=gEntropyRate,
        fZeroEntropyException=(
            fFlagged and gEntropyRate is not None and gEntropyRate < G_ZERO_ENTROPY_RATE
        ),
    )


def defaultTolerance(cSample: int, gAlpha: float = G_ALPHA_DEFAULT) -> float:
    """3 * sqrt(ln(2 / alpha) / (2 n)): three times the DKW band."""

    if cSample < 1:
        raise ValueError("Tolerance needs at least one sample.")
    return 3.0 * math.sqrt(math.log(2.0 / gAlpha) / (2.0 * cSample))


@dataclass(frozen=True)
class ClusterVerdict:
    """Per-t margins F(t) - reference(t), their verdicts, and the overall verdict."""

    lT: list[float]
    lGMargin: list[float]
    lStrVerdict: list[str]
    strOverall: str
    gTol: float
    strReference: str
    gEpsilon: float
    gFEntryEps: float
    fStrong: bool
    gFReturnEps: float | None = None
    lPairMargin: list[list[float]] = field(default_factory=list)


def _strVerdict(gMargin: float, gTol: float) -> str:
    if gMargin < -gTol:
        return "attracting"
    if gMargin > gTol:
        return "repelling"
    return "neutral"


def classify(
    cdfEntry: Callable[[np.ndarray], np.ndarray],
    lT: list[float] | tuple[float, ...] = LG_T_GRID_DEFAULT,
    gTol: float | None = None,
    gEpsilon: float = G_EPSILON_DEFAULT,
    cSample: int | None = None,
    cdfReturn: EmpiricalCdf | None = None,
    fLattice: bool = True,
) -> ClusterVerdict:
    """Attract/repel/neutral verdicts of an entry CDF against the exponential law.

    Overall: attracting iff every margin is <= gTol and at least one is
    < -gTol; neutral iff every |margin| <= gTol; repelling otherwise.
    Strong clustering means F(eps) < eps**2.

    For an empirical CDF the reference is the exponential law on the
    sample's time lattice (see LatticeExponentialLaw) unless fLattice is
    False. gTol defaults to defaultTolerance(cSample), cSample defaulting
    to the CDF's own sample count.
    """

    if len(lT) == 0:
        raise ValueError("The t grid must not be empty.")
    if any(t < 0.0 for t in lT):
        raise ValueError("The t grid must hold nonnegative times.")

    if gTol is None:
        if cSample is None:
            if not isinstance(cdfEntry, EmpiricalCdf):
                raise ValueError("A tolerance or a sample count is needed for this CDF.")
            cSample = cdfEntry.cSample
        gTol = defaultTolerance(cSample)
    if gTol < 0.0:
        raise ValueError(f"Tolerance must be >= 0, got {gTol}.")

    gMu = getattr(cdfEntry, "gMuHat", None)
    if fLattice and gMu is not None:
        reference: Callable[[np.ndarray], np.ndarray] = LatticeExponentialLaw(gMu)
        strReference = f"lattice-exponential(mu={gMu:.6g})"
    else:
        reference = EXP_LAW
        strReference = "exponential"

    aryT = np.asarray(lT, dtype=np.float64)
    aryMargin = np.asarray(cdfEntry(aryT), dtype=np.float64) - np.asarray(reference(aryT))
    lGMargin = [float(g) for g in aryMargin]
    lStrVerdict = [_strVerdict(g, gTol) for g in lGMargin]

    if all(g <= gTol for g in lGMargin) and any(g < -gTol for g in lGMargin):
        strOverall = "attracting"
    elif all(abs(g) <= gTol for g in lGMargin):
        strOverall = "neutral"
    else:
        strOverall = "repelling"

    gFEntryEps = float(cdfEntry(gEpsilon))

    return ClusterVerdict(
        lT=[float(t) for t in aryT],
        lGMargin=lGMargin,
        lStrVerdict=lStrVerdict,
        strOverall=strOverall,
        gTol=gTol,
        strReference=strReference,
        gEpsilon=gEpsilon,
        gFEntryEps=gFEntryEps,
        fStrong=gFEntryEps < gEpsilon**2,
        gFReturnEps=None if cdfReturn is None else float(cdfReturn(gEpsilon)),
        lPairMargin=[[float(t), g] for t, g in zip(aryT, lGMargin)],
    )
