"""Command-line interface for rareseries."""

import argparse
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from . import formats
from .ingest import burstReport, parseEvents, sweepBurstReport
from .laws import G_EPSILON_DEFAULT, LG_T_GRID_DEFAULT
from .perturb import (
    PerturbationPlan,
    WFamily,
    familyFromStrings,
    perturb,
    planFromMapping,
)
from .processes import generate, processSpecFromToml
from .report import (
    LSTR_FORMAT,
    mpBlockStats,
    mpBurstReport,
    mpPlanReport,
    mpVerification,
    mpWithConfig,
    readJson,
    writeCsv,
    writeJson,
)
from .symbols import Block, enumerateBlocks, entropyRateEstimate, scanOccurrences
from .verify import LSTR_STATISTIC, verifyTheorem

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2
EXIT_DATA = 3

N_ENTROPY_LENGTH_DEFAULT = 8
C_MIN_VERIFY_DEFAULT = 200


class UsageError(Exception):
    """Invalid option values or combinations detected after parsing."""


@dataclass(frozen=True)
class RunConfig:
    """The effective, validated options of one run; echoed into every output."""

    strCommand: str
    seed: int | None
    nThreads: int
    pathOut: Path | None
    strFormat: str
    mpOption: dict[str, Any]

    def mpToMapping(self) -> dict[str, object]:
        mpOption = {
            strKey: str(value) if isinstance(value, Path) else value
            for strKey, value in self.mpOption.items()
        }
        return {
            "command": self.strCommand,
            "seed": self.seed,
            "threads": self.nThreads,
            "out": None if self.pathOut is None else str(self.pathOut),
            "format": self.strFormat,
            **mpOption,
        }


def runConfigFromArgs(args: argparse.Namespace) -> RunConfig:
    if args.nThreads < 1:
        raise UsageError(f"--threads must be >= 1, got {args.nThreads}.")
    if args.seed is not None and not 0 <= args.seed < 1 << 64:
        raise UsageError(f"--seed must be a 64-bit nonnegative integer, got {args.seed}.")

    lStrCommon = ("strCommand", "seed", "nThreads", "pathOut", "strFormat", "fVerbose", "func")
    mpOption = {strKey: value for strKey, value in vars(args).items() if strKey not in lStrCommon}

    return RunConfig(
        strCommand=args.strCommand,
        seed=args.seed,
        nThreads=args.nThreads,
        pathOut=args.pathOut,
        strFormat=args.strFormat,
        mpOption=mpOption,
    )


def _lGFromCsv(strValue: str) -> list[float]:
    """Parse '0.5,1,2' into floats."""

    try:
        lG = [float(strPart) for strPart in strValue.split(",") if strPart.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"expected comma-separated numbers, got {strValue!r}"
        ) from None
    if not lG:
        raise argparse.ArgumentTypeError("expected at least one number")
    return lG


def buildParser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="rareseries",
        description=(
            "Recurrence statistics, clustering verdicts and strong-clustering perturbations "
            "of rare blocks in symbol sequences."
        ),
    )

    # Flags shared by every subcommand.

    parserCommon = argparse.ArgumentParser(add_help=False)

    parserCommon.add_argument(
        "--seed",
        dest="seed",
        type=int,
        default=None,
        help="Seed for every random draw (overrides the spec file's seed).",
    )

    parserCommon.add_argument(
        "--threads",
        dest="nThreads",
        type=int,
        default=1,
        help="Maximum number of worker threads (default: 1).",
    )

    parserCommon.add_argument(
        "-o",
        "--out",
        dest="pathOut",
        type=Path,
        default=None,
        help="Output file (default: stdout for reports).",
    )

    parserCommon.add_argument(
        "--format",
        dest="strFormat",
        choices=LSTR_FORMAT,
        default="json",
        help="Report format; csv holds only ECDF and margin tables (default: json).",
    )

    parserCommon.add_argument(
        "-v",
        "--verbose",
        dest="fVerbose",
        action="store_true",
        default=False,
        help="Print progress and details to stderr.",
    )

    subparsers = parser.add_subparsers(dest="strCommand", required=True, metavar="COMMAND")

    # gen

    parserGen = subparsers.add_parser(
        "gen", parents=[parserCommon], help="Generate a sequence from a process spec file."
    )
    parserGen.add_argument(
        "--spec", dest="pathSpec", type=Path, required=True, help="TOML process spec file."
    )
    parserGen.add_argument(
        "--length", dest="nLength", type=int, required=True, help="Number of symbols."
    )
    parserGen.set_defaults(func=_cmdGen)

    # stats

    parserStats = subparsers.add_parser(
        "stats", parents=[parserCommon], help="Recurrence statistics and verdicts of blocks."
    )
    parserStats.add_argument("pathSeq", metavar="SEQUENCE", type=Path, help="Sequence file.")
    grpBlock = parserStats.add_mutually_exclusive_group(required=True)
    grpBlock.add_argument(
        "--block", dest="strBlock", default=None, help="Block as digits ('010') or '3,11,2'."
    )
    grpBlock.add_argument(
        "--all-length",
        dest="nAllLength",
        type=int,
        default=None,
        help="Analyze every block of this length.",
    )
    parserStats.add_argument(
        "--min-count",
        dest="cMin",
        type=int,
        default=2,
        help="With --all-length, skip blocks occurring fewer times (default: 2).",
    )
    parserStats.add_argument(
        "--t-grid",
        dest="lT",
        type=_lGFromCsv,
        default=list(LG_T_GRID_DEFAULT),
        help="Comma-separated normalized times for the margins (default: 0.1,...,4).",
    )
    parserStats.add_argument(
        "--epsilon",
        dest="gEpsilon",
        type=float,
        default=G_EPSILON_DEFAULT,
        help="Strong-clustering epsilon (default: 0.5).",
    )
    parserStats.add_argument(
        "--stride",
        dest="nStride",
        type=int,
        default=1,
        help="Sample every stride-th origin for entry times and windows (default: 1).",
    )
    parserStats.add_argument(
        "--entropy-length",
        dest="nEntropyLength",
        type=int,
        default=N_ENTROPY_LENGTH_DEFAULT,
        help="Block length of the entropy-rate estimate (default: 8).",
    )
    parserStats.set_defaults(func=_cmdStats)

    # perturb

    parserPerturb = subparsers.add_parser(
        "perturb", parents=[parserCommon], help="Apply the strong-clustering perturbation."
    )
    parserPerturb.add_argument("pathSeq", metavar="SEQUENCE", type=Path, help="Sequence file.")
    parserPerturb.add_argument(
        "--epsilon", dest="gEpsilon", type=float, default=G_EPSILON_DEFAULT, help="Target eps."
    )
    parserPerturb.add_argument(
        "--delta", dest="gDelta", type=float, default=None, help="Change budget delta."
    )
    parserPerturb.add_argument(
        "--L", dest="nL", type=int, default=None, help="Odd family block length (>= 5)."
    )
    parserPerturb.add_argument(
        "--r", dest="r", type=int, default=None, help="Marker period r (> 2 L / delta)."
    )
    parserPerturb.add_argument(
        "--M", dest="nM", type=int, default=None, help="Sector length M (>= 2 (r + 1))."
    )
    parserPerturb.add_argument(
        "--N", dest="nN", type=int, default=0, help="Verification threshold (default: 2 r + 2)."
    )
    parserPerturb.add_argument(
        "--plan",
        dest="pathPlan",
        type=Path,
        default=None,
        help="Reuse the plan and W family of an earlier perturb report (ignores plan flags).",
    )
    parserPerturb.set_defaults(func=_cmdPerturb)

    # verify

    parserVerify = subparsers.add_parser(
        "verify", parents=[parserCommon], help="Check F_B(eps) < eps**2 over a length range."
    )
    parserVerify.add_argument("pathSeq", metavar="SEQUENCE", type=Path, help="Sequence file.")
    parserVerify.add_argument(
        "--plan",
        dest="pathPlan",
        type=Path,
        default=None,
        help="Perturb report; restricts the check to the spans its plan modified.",
    )
    parserVerify.add_argument(
        "--N", dest="nN", type=int, default=None, help="Shortest block length (default: plan N)."
    )
    parserVerify.add_argument(
        "--N-hi", dest="nNHi", type=int, default=None, help="Longest block length (default: N)."
    )
    parserVerify.add_argument(
        "--epsilon",
        dest="gEpsilon",
        type=float,
        default=None,
        help="Epsilon (default: the plan's, else 0.5).",
    )
    parserVerify.add_argument(
        "--min-count",
        dest="cMin",
        type=int,
        default=C_MIN_VERIFY_DEFAULT,
        help=f"Skip blocks occurring fewer times (default: {C_MIN_VERIFY_DEFAULT}).",
    )
    parserVerify.add_argument(
        "--statistic",
        dest="strStatistic",
        choices=LSTR_STATISTIC,
        default="entry",
        help="entry: waiting times from all origins; return: gaps between visits.",
    )
    parserVerify.set_defaults(func=_cmdVerify)

    # ingest

    parserIngest = subparsers.add_parser(
        "ingest", parents=[parserCommon], help="Clustering report of an event series."
    )
    parserIngest.add_argument("pathEvents", metavar="EVENTS", type=Path, help="Event file.")
    parserIngest.add_argument(
        "--column", dest="iColumn", type=int, default=None, help="0-based CSV column."
    )
    parserIngest.add_argument(
        "--bin-width",
        dest="gBinWidth",
        type=float,
        default=None,
        help="Bin width (default: median inter-event gap / 4).",
    )
    parserIngest.add_argument(
        "--sweep",
        dest="lBinWidth",
        type=_lGFromCsv,
        default=None,
        help="Comma-separated bin widths; one report per width.",
    )
    parserIngest.add_argument(
        "--t-grid", dest="lT", type=_lGFromCsv, default=list(LG_T_GRID_DEFAULT), help="t grid."
    )
    parserIngest.add_argument(
        "--epsilon", dest="gEpsilon", type=float, default=G_EPSILON_DEFAULT, help="Epsilon."
    )
    parserIngest.set_defaults(func=_cmdIngest)

    return parser


def _pathSidecar(path: Path) -> Path:
    return path.with_name(path.name + ".json")


def _writeReport(
    config: RunConfig, lMpRecord: list[dict[str, Any]], mp: dict[str, object]
) -> None:
    """Write JSON (the full report) or CSV (flat tables of the records)."""

    if config.strFormat == "csv":
        writeCsv(lMpRecord, config.pathOut, config.mpToMapping())
    else:
        writeJson(mpWithConfig(mp, config.mpToMapping()), config.pathOut)


def _cmdGen(args: argparse.Namespace, config: RunConfig) -> int:
    if config.pathOut is None:
        raise UsageError("gen needs --out for the sequence file.")
    if args.nLength < 1:
        raise UsageError(f"--length must be >= 1, got {args.nLength}.")

    try:
        spec = processSpecFromToml(args.pathSpec, seed=config.seed)
    except (FileNotFoundError, ValueError) as err:
        raise UsageError(str(err)) from None

    seq = generate(spec, args.nLength)
    formats.writeSequence(seq, config.pathOut)

    mpConfig = {**config.mpToMapping(), "seed": spec.seed}
    writeJson({"config": mpConfig, "process": spec.mpToMapping()}, _pathSidecar(config.pathOut))

    print(f"{args.pathSpec} -> {config.pathOut}")
    return EXIT_OK


def _cmdStats(args: argparse.Namespace, config: RunConfig) -> int:
    seq = formats.readSequence(args.pathSeq)

    if args.nStride < 1:
        raise UsageError(f"--stride must be >= 1, got {args.nStride}.")
    if any(t < 0.0 for t in args.lT):
        raise UsageError("--t-grid values must be >= 0.")

    nEntropy = min(args.nEntropyLength, len(seq))
    gEntropyRate = entropyRateEstimate(seq, nEntropy) if nEntropy >= 1 else None

    if args.strBlock is not None:
        try:
            block = Block.fromString(args.strBlock, seq.alphabet.nSize)
        except ValueError as err:
            raise UsageError(str(err)) from None
        lPair = [(block, scanOccurrences(seq, block))]
    else:
        lPair = enumerateBlocks(seq, args.nAllLength, cMin=max(2, args.cMin))
        if not lPair:
            raise ValueError(
                f"No block of length {args.nAllLength} occurs at least {args.cMin} times."
            )

    lMpRecord = []
    for block, occ in lPair:
        if args.fVerbose:
            print(f"  block {block.strPattern()}: {len(occ)} occurrence(s)", file=sys.stderr)
        mpRecord = mpBlockStats(
            seq, block, occ, args.lT, args.gEpsilon, args.nStride, gEntropyRate
        )
        if args.fVerbose and mpRecord["censored"]:
            print(
                f"Warning: block {block.strPattern()}: {mpRecord['censored']} entry "
                "sample(s) right-censored.",
                file=sys.stderr,
            )
        lMpRecord.append(mpRecord)

    _writeReport(config, lMpRecord, {"entropy_rate": gEntropyRate, "records": lMpRecord})
    if config.pathOut is not None:
        print(f"{args.pathSeq} -> {config.pathOut}")
    return EXIT_OK


def _planAndFamily(
    args: argparse.Namespace, config: RunConfig
) -> tuple[PerturbationPlan, WFamily | None]:
    if args.pathPlan is not None:
        try:
            mpReport = readJson(args.pathPlan)
            plan = planFromMapping(mpReport["plan"])
            family = familyFromStrings(mpReport["family"])
        except (FileNotFoundError, KeyError, TypeError, ValueError) as err:
            raise UsageError(f"{args.pathPlan}: invalid perturb report ({err}).") from None
        return plan, family

    lStrMissing = [
        strFlag
        for strFlag, value in (("--delta", args.gDelta), ("--L", args.nL), ("--r", args.r))
        if value is None
    ]
    if args.nM is None:
        lStrMissing.append("--M")
    if lStrMissing:
        raise UsageError(f"perturb needs {', '.join(lStrMissing)} (or --plan).")

    try:
        plan = PerturbationPlan(
            gEpsilon=args.gEpsilon,
            gDelta=args.gDelta,
            nL=args.nL,
            r=args.r,
            nM=args.nM,
            nN=args.nN,
            seed=0 if config.seed is None else config.seed,
        )
    except ValueError as err:
        raise UsageError(str(err)) from None
    return plan, None


def _cmdPerturb(args: argparse.Namespace, config: RunConfig) -> int:
    if config.pathOut is None:
        raise UsageError("perturb needs --out for the perturbed sequence.")

    plan, family = _planAndFamily(args, config)
    seq = formats.readSequence(args.pathSeq)

    if args.fVerbose:
        print(
            f"  plan: eps={plan.gEpsilon} delta={plan.gDelta} K={plan.nK} L={plan.nL} "
            f"r={plan.r} M={plan.nM} r1={plan.nR1} N={plan.nN}",
            file=sys.stderr,
        )

    result = perturb(seq, plan, family)
    formats.writeSequence(result.seq, config.pathOut)

    mp = mpWithConfig(mpPlanReport(plan, result.report), config.mpToMapping())
    writeJson(mp, _pathSidecar(config.pathOut))

    if args.fVerbose:
        report = result.report
        print(
            f"  {report.cMarkerWritten} marker(s) branded in {report.cSpan} span(s), "
            f"{report.cReplaced} replacement(s), change {report.gChangeFraction:.4f} "
            f"(bound {report.gBound:.4f})",
            file=sys.stderr,
        )

    print(f"{args.pathSeq} -> {config.pathOut}")
    return EXIT_OK


def _cmdVerify(args: argparse.Namespace, config: RunConfig) -> int:
    plan = None
    if args.pathPlan is not None:
        try:
            plan = planFromMapping(readJson(args.pathPlan)["plan"])
        except (FileNotFoundError, KeyError, TypeError, ValueError) as err:
            raise UsageError(f"{args.pathPlan}: invalid perturb report ({err}).") from None

    nMin = args.nN if args.nN is not None else (plan.nN if plan is not None else None)
    if nMin is None:
        raise UsageError("verify needs --N (or --plan).")
    if plan is not None and nMin < plan.nN:
        raise UsageError(f"--N {nMin} is below the plan's threshold N = {plan.nN}.")
    nMax = nMin if args.nNHi is None else args.nNHi
    if nMax < nMin:
        raise UsageError(f"--N-hi {nMax} is below --N {nMin}.")

    gEpsilon = args.gEpsilon
    if gEpsilon is None:
        gEpsilon = plan.gEpsilon if plan is not None else G_EPSILON_DEFAULT
    if args.cMin < 2:
        raise UsageError(f"--min-count must be >= 2, got {args.cMin}.")

    seq = formats.readSequence(args.pathSeq)
    report = verifyTheorem(
        seq,
        plan,
        nMin,
        nMax,
        args.cMin,
        gEpsilon,
        strStatistic=args.strStatistic,
        nThreads=config.nThreads,
        fVerbose=args.fVerbose,
    )

    writeJson(mpWithConfig(mpVerification(report), config.mpToMapping()), config.pathOut)
    if config.pathOut is not None:
        print(f"{args.pathSeq} -> {config.pathOut}")

    return EXIT_OK if report.fPass else EXIT_FAIL


def _cmdIngest(args: argparse.Namespace, config: RunConfig) -> int:
    ev = parseEvents(args.pathEvents, args.iColumn)

    if args.lBinWidth is not None:
        lReport = sweepBurstReport(ev, args.lBinWidth, args.lT, args.gEpsilon)
    else:
        lReport = [burstReport(ev, args.gBinWidth, args.lT, args.gEpsilon)]

    lMpRecord = [mpBurstReport(report) for report in lReport]
    if args.fVerbose:
        for mpRecord in lMpRecord:
            print(f"  w={mpRecord['bin_width']:g}: {mpRecord['verdict']}", file=sys.stderr)

    _writeReport(config, lMpRecord, {"records": lMpRecord})
    if config.pathOut is not None:
        print(f"{args.pathEvents} -> {config.pathOut}")
    return EXIT_OK


def main(lStrArg: list[str] | None = None) -> int:
    parser = buildParser()
    args = parser.parse_args(lStrArg)

    # Usage problems are exit 2 (as argparse's own); bad input data is exit 3.

    try:
        config = runConfigFromArgs(args)
        return args.func(args, config)
    except UsageError as err:
        print(f"Error: {err}", file=sys.stderr)
        return EXIT_USAGE
    except (FileNotFoundError, ValueError) as err:
        print(f"Error: {err}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
