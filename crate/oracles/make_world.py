"""Generate the small multi-corpus fixture used by the CLI tests.

Writes crates/cli/tests/fixtures/world/{*.jsonl,manifest.json,config.json}.
The vocabulary next to them is trained with `nlpl train-vocab` on the same
files.
"""
import json
import random
from pathlib import Path

OUT = Path(__file__).resolve().parents[1] / "crates/cli/tests/fixtures/world"

EN = ("the model reads a list of numbers and returns the sum of every value "
      "in order to compute an average we divide the total by the count").split()
ES = ("el modelo lee una lista de numeros y devuelve la suma de cada valor "
      "para calcular un promedio dividimos el total entre la cantidad").split()


def sent(rng, words, lo, hi):
    return " ".join(rng.choice(words) for _ in range(rng.randint(lo, hi))) + "."


def py_func(rng, i):
    name = rng.choice(["total", "average", "count", "scale", "merge"]) + f"_{i}"
    arg = rng.choice(["items", "values", "xs"])
    body = rng.choice([
        f"    acc = 0\n    for v in {arg}:\n        acc += v\n    return acc\n",
        f"    if not {arg}:\n        return None\n    return sum({arg}) / len({arg})\n",
        f"    out = []\n    for v in {arg}:\n        out.append(v * 2)\n    return out\n",
    ])
    return f"def {name}({arg}):\n{body}"


def go_func(rng, i):
    return (f"func Sum{i}(xs []int) int {{\n\ttotal := 0\n\tfor _, v := range xs {{\n"
            f"\t\ttotal += v\n\t}}\n\treturn total\n}}\n")


def write(name, rows):
    with open(OUT / name, "w") as f:
        for r in rows:
            f.write(json.dumps(r, ensure_ascii=False) + "\n")
    return len(rows)


def main():
    rng = random.Random(11)
    OUT.mkdir(parents=True, exist_ok=True)
    counts = {}
    counts["nl_en"] = write("nl_en.jsonl", [
        {"id": f"en{i}", "text": " ".join(sent(rng, EN, 6, 18) for _ in range(3)), "lang": "en", "kind": "NL"}
        for i in range(40)])
    counts["nl_es"] = write("nl_es.jsonl", [
        {"id": f"es{i}", "text": sent(rng, ES, 6, 18), "lang": "es", "kind": "NL"}
        for i in range(10)])
    counts["para_en_es"] = write("para_en_es.jsonl", [
        {"id": f"p{i}", "src": sent(rng, EN, 4, 10), "src_lang": "en",
         "tgt": sent(rng, ES, 4, 10), "tgt_lang": "es", "modality": "NL_NL"}
        for i in range(15)])
    counts["pl_python"] = write("pl_python.jsonl", [
        {"id": f"py{i}", "text": py_func(rng, i), "lang": "Python", "kind": "PL", "pl_name": "Python"}
        for i in range(30)])
    docs = []
    for i in range(20):
        doc = sent(rng, EN, 4, 9)
        code = py_func(rng, 100 + i)
        if i % 4 == 0:
            head, rest = code.split("\n", 1)
            code = f'{head}\n    """{doc}"""\n{rest}'
        row = {"id": f"cd{i}", "code": code, "docstring": doc, "pl_name": "Python"}
        if i % 3 == 0:
            row.update({"nl_lang": "en", "nl_conf": 0.97})
        docs.append(row)
    counts["codedoc_python"] = write("codedoc_python.jsonl", docs)
    counts["codedoc_go"] = write("codedoc_go.jsonl", [
        {"id": f"go{i}", "code": go_func(rng, i), "docstring": sent(rng, ES, 3, 8),
         "pl_name": "Go", "nl_lang": "es", "nl_conf": 0.91}
        for i in range(8)])

    corpora = [
        ("nl_en", "document", "NL", "en"),
        ("nl_es", "document", "NL", "es"),
        ("para_en_es", "parallel", "NL", "en-es"),
        ("pl_python", "document", "PL", "Python"),
        ("codedoc_python", "codedoc", "PL", "Python"),
        ("codedoc_go", "codedoc", "PL", "Go"),
    ]
    manifest = {"entries": [
        {"corpus_id": cid, "path": f"{cid}.jsonl", "kind": kind, "modality": mod,
         "lang": lang, "sample_count": counts[cid]}
        for cid, kind, mod, lang in corpora]}
    (OUT / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    config = {"manifest": "manifest.json", "vocab": "vocab.txt", "seed": 7,
              "epoch_size": 200, "max_len": 512}
    (OUT / "config.json").write_text(json.dumps(config, indent=2) + "\n")


if __name__ == "__main__":
    main()
