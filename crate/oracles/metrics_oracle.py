"""Freeze BLEU and chrF reference values from sacrebleu.

Writes crates/core/tests/fixtures/metrics_pairs.jsonl (one pair per line with
sentence scores) and metrics_corpus.json (corpus scores plus a few named
cases). Rerun only when the fixture set itself changes.
"""
import json
import random
from pathlib import Path

import sacrebleu
from sacrebleu.metrics import BLEU, CHRF

OUT = Path(__file__).resolve().parents[1] / "crates/core/tests/fixtures"

WORDS = (
    "the a cat dog sat ran on under mat table quickly slowly red blue "
    "model data code function returns value list of numbers 3.14 1,000 "
    "it's don't (see) [note] x-y 42 e.g. user's file.txt path/to self"
).split()
PUNCT = [".", ",", "!", "?", ";", ":", "", "", ""]


def sentence(rng, n):
    words = [rng.choice(WORDS) for _ in range(n)]
    return " ".join(words) + rng.choice(PUNCT)


def perturb(rng, s):
    toks = s.split()
    out = []
    for t in toks:
        r = rng.random()
        if r < 0.15:
            continue
        if r < 0.30:
            out.append(rng.choice(WORDS))
        else:
            out.append(t)
        if rng.random() < 0.08:
            out.append(rng.choice(WORDS))
    if rng.random() < 0.2:
        rng.shuffle(out)
    return " ".join(out) if out else rng.choice(WORDS)


def main():
    rng = random.Random(20240611)
    pairs = []
    for i in range(100):
        ref = sentence(rng, rng.randint(4, 25))
        hyp = ref if i % 17 == 0 else perturb(rng, ref)
        pairs.append((hyp, ref))
    sent_bleu = BLEU(effective_order=True)
    chrf = CHRF()
    with open(OUT / "metrics_pairs.jsonl", "w") as f:
        for hyp, ref in pairs:
            row = {
                "hyp": hyp,
                "ref": ref,
                "bleu": sent_bleu.sentence_score(hyp, [ref]).score,
                "chrf": chrf.sentence_score(hyp, [ref]).score,
            }
            f.write(json.dumps(row, ensure_ascii=False) + "\n")
    hyps = [h for h, _ in pairs]
    refs = [r for _, r in pairs]
    corpus = {
        "bleu": BLEU().corpus_score(hyps, [refs]).score,
        "chrf": CHRF().corpus_score(hyps, [refs]).score,
        "cat_mat_bleu": sent_bleu.sentence_score(
            "the cat sat on the mat", ["the cat is on the mat"]).score,
        "abcd_abce_chrf": chrf.sentence_score("abcd", ["abce"]).score,
        "sacrebleu_version": sacrebleu.__version__,
    }
    (OUT / "metrics_corpus.json").write_text(json.dumps(corpus, indent=2) + "\n")


if __name__ == "__main__":
    main()
