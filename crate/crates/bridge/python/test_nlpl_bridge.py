"""Run after `cargo build -p nlpl-bridge -p nlpl-cli`: pytest crates/bridge/python"""

import json
import shutil
import struct
import subprocess
from pathlib import Path

import pytest

import nlpl_bridge as nb

ROOT = Path(__file__).resolve().parents[3]
WORLD = ROOT / "crates" / "cli" / "tests" / "fixtures" / "world"
NLPL = ROOT / "target" / "debug" / "nlpl"
CODE = "def add(a, b):\n    total = a + b\n    return total"


@pytest.fixture
def world(tmp_path):
    for p in WORLD.iterdir():
        shutil.copy(p, tmp_path / p.name)
    return tmp_path


def run(world, *args):
    return subprocess.run([str(NLPL), *args], cwd=world, check=True, capture_output=True).stdout


def read_ecpt(path):
    data = Path(path).read_bytes()
    assert data[:5] == b"ECPT1"
    words = struct.unpack("<%dI" % ((len(data) - 5) // 4), data[5:])
    out, i = [], 0
    while i < len(words):
        a, t = words[i], words[i + 1]
        i += 2
        out.append((list(words[i : i + a]), list(words[i + a : i + a + t])))
        i += a + t
    return out


def test_encode_parity(world):
    (world / "code.py").write_text(CODE)
    cli = [int(t) for t in run(world, "tokenize", "encode", "code.py", "--vocab", "vocab.txt").split()]
    with nb.Session(world / "vocab.txt") as s:
        assert s.encode("") == []
        assert s.encode(CODE) == cli
        assert s.decode(cli) == CODE


def test_version():
    manifest = (ROOT / "Cargo.toml").read_text()
    assert 'version = "%s"' % nb.version() in manifest


def test_no_vocab():
    with nb.Session() as s:
        with pytest.raises(nb.BridgeError, match="vocabulary"):
            s.encode("x")


def test_stream_parity(world):
    run(world, "plan", "--config", "config.json", "--out", "plan.json")
    run(world, "build", "--config", "config.json", "--plan", "plan.json", "--binary", "out.bin")
    s = nb.Session(world / "vocab.txt")
    plan = s.open_plan(world / "config.json", world / "plan.json")
    got = [(i, t) for _, i, t in plan]
    assert got == read_ecpt(world / "out.bin")

    one = s.open_plan(world / "config.json", world / "plan.json", plan.digest)
    two = s.open_plan(world / "config.json", world / "plan.json")
    a, b = one.next_batch(1), one.next_batch(1)
    both = two.next_batch(2)
    assert a["ids"] + b["ids"] == both["ids"]
    assert a["lengths"] + b["lengths"] == both["lengths"]
    assert sum(both["lengths"]) == len(both["ids"])

    with pytest.raises(nb.BridgeError, match="digest"):
        s.open_plan(world / "config.json", world / "plan.json", "0" * 64)


def test_codebleu_parity(world):
    pairs = [("def add(x, y):\n    return x + y", CODE), ("def f(a:\n", CODE)]
    (world / "pairs.jsonl").write_text("".join(json.dumps({"hyp": h, "ref": r}) + "\n" for h, r in pairs))
    report = json.loads(run(world, "eval", "--pairs", "pairs.jsonl", "--metrics", "codebleu"))
    s = nb.Session()
    for i, (h, r) in enumerate(pairs):
        ours = s.codebleu(h, r)
        row = report["per_example"][i]["scores"]
        for k, v in ours.items():
            key = "codebleu" if k == "codebleu" else "codebleu." + k
            assert (v is None and key not in row) or abs(row[key] - v) <= 1e-12
    ident = s.codebleu(CODE, CODE)
    assert all(abs(v - 1.0) <= 1e-12 for v in ident.values())
    broken = s.codebleu("def f(a:\n", CODE)
    assert broken["ast_match"] == 0.0 and broken["dataflow_match"] == 0.0
