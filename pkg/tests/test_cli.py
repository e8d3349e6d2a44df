"""End-to-end tests of the rareseries command line."""

import json
from pathlib import Path

import numpy as np
import pytest

from rareseries.cli import EXIT_DATA, EXIT_FAIL, EXIT_OK, EXIT_USAGE, main
from rareseries.formats import readSequence, writeSequence
from rareseries.symbols import SymbolSequence


def _pathSpec(tmp_path: Path) -> Path:
    path = tmp_path / "iid.toml"
    path.write_text('kind = "iid"\nseed = 7\np = [0.5, 0.5]\n')
    return path


def _lStrGen(pathSpec: Path, nLength: int, pathOut: Path | None = None) -> list[str]:
    lStrArg = ["gen", "--spec", str(pathSpec), "--length", str(nLength)]
    return lStrArg if pathOut is None else [*lStrArg, "-o", str(pathOut)]


def _pathSequence(tmp_path: Path) -> Path:
    pathSeq = tmp_path / "seq.sym"
    assert main(_lStrGen(_pathSpec(tmp_path), 5000, pathSeq)) == EXIT_OK
    return pathSeq


def test_gen_is_deterministic(tmp_path: Path):
    pathSpec = _pathSpec(tmp_path)
    pathA = tmp_path / "a.sym"
    pathB = tmp_path / "b.sym"

    assert main(_lStrGen(pathSpec, 1000, pathA)) == EXIT_OK
    assert main(_lStrGen(pathSpec, 1000, pathB)) == EXIT_OK
    assert pathA.read_bytes() == pathB.read_bytes()

    mpSidecar = json.loads((tmp_path / "a.sym.json").read_text())
    assert mpSidecar["config"]["seed"] == 7
    assert mpSidecar["process"]["kind"] == "iid"

    pathC = tmp_path / "c.sym"
    assert main([*_lStrGen(pathSpec, 1000, pathC), "--seed", "8"]) == EXIT_OK
    assert pathA.read_bytes() != pathC.read_bytes()


def test_gen_usage_errors(tmp_path: Path, capsys):
    pathOut = tmp_path / "a.sym"
    assert main(_lStrGen(tmp_path / "none.toml", 10, pathOut)) == EXIT_USAGE
    assert "Error:" in capsys.readouterr().err

    assert main(_lStrGen(_pathSpec(tmp_path), 10)) == EXIT_USAGE
    assert main(_lStrGen(_pathSpec(tmp_path), 0, pathOut)) == EXIT_USAGE


def test_stats_block(tmp_path: Path):
    pathSeq = _pathSequence(tmp_path)
    pathOut = tmp_path / "stats.json"

    lStrArg = ["stats", str(pathSeq), "--block", "0110", "--t-grid", "0.5,1", "-o", str(pathOut)]
    assert main(lStrArg) == EXIT_OK

    mp = json.loads(pathOut.read_text())
    assert list(mp)[0] == "config"
    assert mp["config"]["command"] == "stats"
    assert mp["config"]["lT"] == [0.5, 1.0]

    (mpRecord,) = mp["records"]
    assert mpRecord["block"] == "0110"
    assert mpRecord["count"] > 100
    assert [t for t, _ in mpRecord["margins"]] == [0.5, 1.0]
    assert mpRecord["verdict"] in ("attracting", "neutral", "repelling")
    assert "entropy_bound" in mpRecord
    assert 0.0 <= mpRecord["ks_entry"] <= 1.0
    assert mpRecord["ecdf_entry"][-1][1] == 1.0

    # A grid holding only t = 0 still yields a record.

    lStrArg = ["stats", str(pathSeq), "--block", "0", "--t-grid", "0", "-o", str(pathOut)]
    assert main(lStrArg) == EXIT_OK
    (mpRecord,) = json.loads(pathOut.read_text())["records"]
    assert mpRecord["star_residual"] == 0.0
    assert mpRecord["cluster"] == []


def test_stats_all_length_csv(tmp_path: Path):
    pathSeq = _pathSequence(tmp_path)
    pathOut = tmp_path / "stats.csv"

    lStrArg = ["stats", str(pathSeq), "--all-length", "2", "--format", "csv", "-o", str(pathOut)]
    assert main(lStrArg) == EXIT_OK

    lStrLine = pathOut.read_text().splitlines()
    assert lStrLine[0].startswith("# config ")
    mpConfig = json.loads(lStrLine[0].removeprefix("# config "))
    assert mpConfig["command"] == "stats"
    assert mpConfig["nAllLength"] == 2
    assert mpConfig["format"] == "csv"

    assert lStrLine[1] == "block,table,t,value,verdict"
    assert {strLine.split(",")[0] for strLine in lStrLine[2:]} == {"00", "01", "10", "11"}
    assert any(",margin," in strLine for strLine in lStrLine)


def test_stats_errors(tmp_path: Path):
    pathSeq = _pathSequence(tmp_path)
    assert main(["stats", str(tmp_path / "missing.sym"), "--block", "01"]) == EXIT_DATA
    assert main(["stats", str(pathSeq), "--block", "0120"]) == EXIT_USAGE
    assert main(["stats", str(pathSeq), "--block", "01", "--stride", "0"]) == EXIT_USAGE
    assert main(["stats", str(pathSeq), "--block", "01", "--threads", "0"]) == EXIT_USAGE

    with pytest.raises(SystemExit) as excinfo:
        main(["stats", str(pathSeq), "--block", "01", "--all-length", "2"])
    assert excinfo.value.code == 2


def test_perturb_refuses_bad_plan(tmp_path: Path, capsys):
    pathSeq = _pathSequence(tmp_path)
    pathOut = tmp_path / "out.sym"

    lStrArg = ["perturb", str(pathSeq), "--delta", "0.6", "--L", "11", "--M", "4000"]
    lStrArg += ["-o", str(pathOut)]
    assert main([*lStrArg, "--r", "30"]) == EXIT_USAGE
    assert "too small" in capsys.readouterr().err
    assert not pathOut.exists()

    assert main(lStrArg) == EXIT_USAGE
    assert "--r" in capsys.readouterr().err

    pathPlan = tmp_path / "plan.json"
    pathPlan.write_text('{"plan": {"epsilon": 0.5}}')
    lStrArg = ["perturb", str(pathSeq), "--plan", str(pathPlan), "-o", str(pathOut)]
    assert main(lStrArg) == EXIT_USAGE


def test_perturb_and_verify(tmp_path: Path, seqDeskBase: SymbolSequence, capsys):
    pathBase = tmp_path / "base.sym"
    writeSequence(seqDeskBase, pathBase)
    pathPerturbed = tmp_path / "perturbed.sym"

    lStrPlan = ["--epsilon", "0.5", "--delta", "0.6", "--L", "11", "--r", "40", "--M", "4000"]
    lStrArg = ["perturb", str(pathBase), *lStrPlan, "--seed", "5", "-o", str(pathPerturbed)]
    assert main(lStrArg) == EXIT_OK

    pathPlan = tmp_path / "perturbed.sym.json"
    mpPlan = json.loads(pathPlan.read_text())
    assert mpPlan["plan"]["K"] == 8
    assert mpPlan["plan"]["N"] == 82
    assert len(mpPlan["family"]) == 8
    assert mpPlan["change_fraction"] <= mpPlan["bound"]["total"]

    # Verification over the perturbed spans passes; the base sequence fails.

    pathVerify = tmp_path / "verify.json"
    lStrVerify = ["--N-hi", "84", "--min-count", "600"]
    lStrArg = ["verify", str(pathPerturbed), "--plan", str(pathPlan), *lStrVerify]
    assert main([*lStrArg, "-o", str(pathVerify)]) == EXIT_OK
    mpVerify = json.loads(pathVerify.read_text())
    assert mpVerify["pass"]
    assert mpVerify["n_range"] == [82, 84]
    assert mpVerify["region"] == mpPlan["region"]

    capsys.readouterr()
    assert main(["verify", str(pathBase), "--N", "82", *lStrVerify]) == EXIT_FAIL
    mpFail = json.loads(capsys.readouterr().out)
    assert not mpFail["pass"]
    assert mpFail["worst_value"] >= mpFail["threshold"]

    # Reusing the plan on the perturbed output changes nothing.

    pathAgain = tmp_path / "again.sym"
    assert main(["perturb", str(pathPerturbed), "--plan", str(pathPlan), "-o", str(pathAgain)]) == 0
    assert json.loads((tmp_path / "again.sym.json").read_text())["replacements"] == 0
    assert np.array_equal(readSequence(pathAgain).arySymbol, readSequence(pathPerturbed).arySymbol)


def test_verify_usage_errors(tmp_path: Path):
    pathSeq = tmp_path / "seq.txt"
    writeSequence(SymbolSequence.fromString("01" * 100), pathSeq)

    assert main(["verify", str(pathSeq)]) == EXIT_USAGE
    assert main(["verify", str(pathSeq), "--plan", str(tmp_path / "none.json")]) == EXIT_USAGE
    assert main(["verify", str(pathSeq), "--N", "4", "--N-hi", "3"]) == EXIT_USAGE
    assert main(["verify", str(pathSeq), "--N", "2", "--min-count", "1"]) == EXIT_USAGE
    assert main(["verify", str(pathSeq), "--N", "50", "--min-count", "100"]) == EXIT_DATA


def test_ingest(tmp_path: Path):
    pathEvents = tmp_path / "events.txt"
    pathEvents.write_text("".join(f"{t}\n" for t in range(2000)))
    pathOut = tmp_path / "ingest.json"

    assert main(["ingest", str(pathEvents), "--bin-width", "0.25", "-o", str(pathOut)]) == EXIT_OK
    (mpRecord,) = json.loads(pathOut.read_text())["records"]
    assert mpRecord["block"] == "1"
    assert mpRecord["n_events"] == 2000
    assert mpRecord["bin_width"] == 0.25
    assert mpRecord["verdict"] == "repelling"
    assert mpRecord["burstiness"] == -1.0

    assert main(["ingest", str(pathEvents), "--sweep", "0.25,0.5", "-o", str(pathOut)]) == EXIT_OK
    lMpRecord = json.loads(pathOut.read_text())["records"]
    assert [mpRecord["bin_width"] for mpRecord in lMpRecord] == [0.25, 0.5]


def test_ingest_errors(tmp_path: Path):
    pathEmpty = tmp_path / "empty.txt"
    pathEmpty.write_text("# no events\n")
    assert main(["ingest", str(pathEmpty)]) == EXIT_DATA
    assert main(["ingest", str(tmp_path / "missing.txt")]) == EXIT_DATA

    with pytest.raises(SystemExit) as excinfo:
        main(["ingest", str(pathEmpty), "--sweep", "a,b"])
    assert excinfo.value.code == 2
