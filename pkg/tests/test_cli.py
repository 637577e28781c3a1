import json
import subprocess
import sys
from pathlib import Path

import pytest

from hapdisc.cli import main
from hapdisc.formats import deserialize, read_document

GOLDEN = Path(__file__).parent / "golden"

GOLDEN_COMMANDS = {
    "subcubes_d2.json": ["gen", "subcubes", "--d", "2"],
    "characters_d2_k1.json": ["gen", "characters", "--d", "2", "--k", "1"],
    "hap_n12_prefix.json": ["gen", "hap", "--n", "12", "--mode", "prefix"],
    "embed_d2.json": ["gen", "embed", "--d", "2"],
    "detlb_sylvester_m2.json": ["detlb", "sylvester", "--m", "2"],
    "ternary_n9.json": ["color", "ternary", "--n", "9"],
    "transfer_d2_k1.json": ["verify", "transfer", "--d", "2", "--k", "1"],
    "disc_hap12.json": ["disc", "exact", "hap", "--n", "12"],
    "herdisc_g21.json": ["herdisc", "exact", "characters", "--d", "2", "--k", "1"],
    "eval_hap9_ternary.json": ["eval", "hap", "--n", "9", "--coloring", "ternary"],
    "bf_hap12.json": ["color", "beck-fiala", "hap", "--n", "12", "--mode", "multiples"],
    "maxdet_g21.json": ["maxdet", "characters", "--d", "2", "--k", "1"],
}


def run(argv, tmp_path, name="out.json"):
    out = tmp_path / name
    code = main(argv + ["--out", str(out)])
    return code, out.read_bytes() if out.exists() else None


@pytest.mark.parametrize("name", sorted(GOLDEN_COMMANDS))
def test_commands_reproduce_golden_files(name, tmp_path):
    code, data = run(GOLDEN_COMMANDS[name], tmp_path)
    assert code == 0
    assert data == (GOLDEN / name).read_bytes()


def test_spec_examples(tmp_path, capsys):
    code, data = run(["gen", "embed", "--d", "2"], tmp_path)
    w = deserialize(data)
    assert code == 0 and sorted(w.b_of_u) == [10, 14, 15, 21]
    code, data = run(["verify", "transfer", "--d", "2", "--k", "1", "--trials", "100", "--seed", "0"], tmp_path)
    doc = json.loads(data)
    assert code == 0 and doc["passed"] is True
    assert (doc["metrics"]["herdisc_characters"], doc["metrics"]["factor"], doc["metrics"]["herdisc_subcubes"]) == (2, 2, 1)
    assert "2 <= 2*1" in capsys.readouterr().out
    assert main(["disc", "exact", "hap", "--n", "12", "--mode", "prefix"]) == 0
    captured = capsys.readouterr()
    assert json.loads(captured.out)["value"] == 2
    assert "disc exact: 2" in captured.err


def test_meta_echoes_seed(tmp_path):
    _, data = run(["color", "random", "--n", "10", "--seed", "77"], tmp_path)
    obj, meta = read_document(data)
    assert meta["seed"] == 77 and meta["command"] == "color random" and meta["params"] == {"n": 10}


def test_exit_codes(tmp_path, capsys):
    assert main(["gen", "subcubes", "--d", "40"]) == 3
    assert main(["herdisc", "exact", "subcubes", "--d", "5"]) == 3
    assert main(["disc", "exact"]) == 2
    assert main(["disc", "exact", "subcubes"]) == 2
    assert main(["eval", "--in", str(tmp_path / "missing.json"), "--coloring", "ones"]) == 2
    bad = tmp_path / "bad.json"
    bad.write_text('{"kind":"coloring","version":"1","n":2,"values":[1,0]}\n')
    assert main(["eval", "subcubes", "--d", "1", "--coloring", str(bad)]) == 2
    assert main(["maxdet", "characters", "--d", "2", "--k", "1", "--threshold", "5"]) == 1
    assert main(["color", "ternary", "--n", "5", "--format", "csv"]) == 2
    with pytest.raises(SystemExit) as exc:
        main(["frobnicate"])
    assert exc.value.code == 2
    capsys.readouterr()


def test_failed_check_exits_one(tmp_path):
    _, cert = run(["detlb", "sylvester", "--m", "2"], tmp_path, "cert.json")
    doc = json.loads(cert)
    doc["det"] = "17"
    broken = tmp_path / "broken.json"
    broken.write_text(json.dumps(doc))
    code, data = run(["verify", "cert", "sylvester", "--m", "2", "--cert", str(broken)], tmp_path)
    assert code == 1 and "det mismatch" in json.loads(data)["detail"]
    code, _ = run(["verify", "cert", "sylvester", "--m", "2", "--cert", str(tmp_path / "cert.json")], tmp_path)
    assert code == 0


def test_pipeline_through_files(tmp_path):
    inst = tmp_path / "inst.json"
    assert main(["gen", "hap", "--n", "40", "--mode", "multiples", "--out", str(inst)]) == 0
    col = tmp_path / "col.json"
    assert main(["color", "beck-fiala", "--in", str(inst), "--out", str(col)]) == 0
    code, data = run(["color", "improve", "--in", str(inst), "--coloring", str(col)], tmp_path)
    improved = json.loads(data)
    code2, ev = run(["eval", "--in", str(inst), "--coloring", str(col)], tmp_path, "ev.json")
    assert code == code2 == 0
    assert improved["achieved"] <= json.loads(ev)["value"]


def test_csv_output(tmp_path):
    code, data = run(["verify", "chars", "--d", "4", "--k", "2", "--format", "csv"], tmp_path)
    assert code == 0 and data.startswith(b"name,passed,detail,trials")
    code, data = run(["eval", "hap", "--n", "27", "--coloring", "ternary", "--format", "csv"], tmp_path)
    assert code == 0 and data.splitlines()[0] == b"value,argmax_row"


def test_module_entry_point(tmp_path):
    out = tmp_path / "s.json"
    proc = subprocess.run(
        [sys.executable, "-m", "hapdisc", "gen", "subcubes", "--d", "2", "--out", str(out)],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert out.read_bytes() == (GOLDEN / "subcubes_d2.json").read_bytes()
