"""Independent reference values for the core integration tests.

Writes crates/core/tests/fixtures/test_vocab.txt and core_goldens.json.
Run from the repository root: python3 oracles/core_oracle.py
"""

import json
import math
import os
from collections import Counter

ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
FIX = os.path.join(ROOT, "crates", "core", "tests", "fixtures")
LANGID = os.path.join(ROOT, "crates", "core", "data", "langid")

M64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15
NUM_SPECIAL = 110


def mix64(z):
    z &= M64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & M64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & M64
    return z ^ (z >> 31)


class Rng:
    def __init__(self, key):
        self.key = key & M64
        self.counter = 0

    def next_u64(self):
        self.counter += 1
        return mix64(self.key + self.counter * GOLDEN)

    def below(self, n):
        zone = (M64 // n) * n
        while True:
            x = self.next_u64()
            if x < zone:
                return x % n


def round_half_away(x):
    return int(math.floor(x + 0.5)) if x >= 0 else -int(math.floor(-x + 0.5))


def composition(m, k, rng):
    points = list(range(1, m))
    for i in range(k - 1):
        j = i + rng.below(len(points) - i)
        points[i], points[j] = points[j], points[i]
    cuts = sorted(points[: k - 1]) + [m]
    parts, prev = [], 0
    for c in cuts:
        parts.append(c - prev)
        prev = c
    return parts


def span_mask(n, rate, mean_span, seed):
    rng = Rng(seed)
    noise = min(n - 1, max(1, round_half_away(rate * n)))
    kept = n - noise
    spans = min(max(1, round_half_away(noise / mean_span)), kept + 1, 100)
    noise_parts = composition(noise, spans, rng)
    kept_parts = composition(kept + 2, spans + 1, rng)
    kept_parts[0] -= 1
    kept_parts[-1] -= 1
    out, pos = [], 0
    for k, l in zip(kept_parts, noise_parts):
        pos += k
        out.append([pos, l])
        pos += l
    return out


def sclm(tokens, spans):
    inp, tgt, pos = [], [], 0
    for k, (s, l) in enumerate(spans):
        sentinel = 10 + k
        inp += tokens[pos:s] + [sentinel]
        tgt += [sentinel] + tokens[s : s + l]
        pos = s + l
    return inp + tokens[pos:], tgt + [1]


def rescale(p, alpha):
    powered = [x**alpha for x in p]
    z = sum(powered)
    return [x / z for x in powered]


def normalize(text):
    return " " + " ".join(text.lower().split()) + " "


def trigrams(text):
    s = normalize(text)
    return [s[i : i + 3] for i in range(len(s) - 2)]


def langid(text):
    langs = sorted(f[:-4] for f in os.listdir(LANGID) if f.endswith(".txt"))
    order = ["ar", "bg", "de", "el", "en", "es", "fr", "hi", "ru", "sw", "th", "tr", "ur", "vi", "zh"]
    assert langs == sorted(order)
    counts = []
    for lang in order:
        with open(os.path.join(LANGID, lang + ".txt"), encoding="utf-8") as f:
            counts.append(Counter(trigrams(f.read())))
    types = len(set().union(*counts)) + 1
    grams = trigrams(text)
    scores = []
    for c in counts:
        denom = sum(c.values()) + types
        ll = sum(math.log((c.get(g, 0) + 1) / denom) for g in grams)
        scores.append(math.log(1 / len(order)) + ll)
    mx = max(scores)
    ex = [math.exp(s - mx) for s in scores]
    z = sum(ex)
    post = [e / z for e in ex]
    best = max(range(len(order)), key=lambda i: (post[i], -i))
    return order[best], post[best]


# Scores are exact binary fractions so tied sums stay tied.
VOCAB = [
    ("def", -2.0),
    ("return", -3.0),
    ("re", -2.0),
    ("turn", -2.0),
    ("ab", -1.0),
    ("xy", -1.25),
    ("yz", -1.25),
    ("a", -0.5),
    ("b", -0.5),
    ("x", -0.75),
    ("z", -0.75),
    ("in", -2.5),
    ("the", -2.5),
    ("self", -3.0),
    ("print", -3.5),
    ("==", -2.0),
    ("()", -2.0),
    ("é", -6.0),
    ("ñ", -6.0),
]
SINGLES = (
    "cdefghijklmnopqrstuvwy"
    "ABCDEFGHIJKLMNOPQRSTUVWXYZ0123456789"
    "()[]{}:;.,=+-*/#_'\"<>!?%&|@^~`$\\"
)


def vocab_pieces():
    pieces = list(VOCAB)
    have = {p for p, _ in pieces}
    for c in SINGLES:
        if c not in have:
            pieces.append((c, -4.0))
            have.add(c)
    return pieces


def escape(s):
    return s.replace("\\", "\\\\").replace("\n", "\\n").replace("\t", "\\t")


def special_surfaces():
    fixed = ["<pad>", "</s>", "<unk>", "<SEP>", "<|removed|>", "<space*1>", "<space*2>", "<space*4>", "\t", "\n"]
    return fixed + ["<extra_id_%d>" % k for k in range(100)]


def write_vocab(pieces):
    lines = ["ECVOCAB 1"]
    lines += ["%s\t%r" % (escape(p), s) for p, s in pieces]
    lines.append("[special]")
    lines += [escape(s) for s in special_surfaces()]
    with open(os.path.join(FIX, "test_vocab.txt"), "w", encoding="utf-8") as f:
        f.write("\n".join(lines) + "\n")


def segmentations(s, pieces):
    """Every split of s into vocabulary pieces, with <unk> for any single
    character that is not itself a piece."""
    if not s:
        yield []
        return
    for j in range(1, len(s) + 1):
        head = s[:j]
        if head in pieces:
            for rest in segmentations(s[j:], pieces):
                yield [(head, pieces[head][1], pieces[head][0])] + rest
        elif j == 1:
            unk = min(sc for _, sc in pieces.values()) - 10.0
            for rest in segmentations(s[1:], pieces):
                yield [(head, unk, 2)] + rest


def best_segmentation(s, pieces):
    def key(seg):
        score = 0.0
        for _, sc, _ in reversed(seg):
            score = sc + score
        return (-score, len(seg), [p for p, _, _ in seg])

    return [pid for _, _, pid in min(segmentations(s, pieces), key=key)]


def encode(text, pieces):
    ws = {" " * 4: 7, " " * 2: 6, " ": 5, "\t": 8, "\n": 9}
    ids, i = [], 0
    while i < len(text):
        c = text[i]
        if c in "\t\n":
            ids.append(ws[c])
            i += 1
        elif c == " ":
            j = i
            while j < len(text) and text[j] == " ":
                j += 1
            run = j - i
            ids += [7] * (run // 4)
            if run % 4 >= 2:
                ids.append(6)
            if run % 2:
                ids.append(5)
            i = j
        else:
            j = i
            while j < len(text) and text[j] not in " \t\n":
                j += 1
            ids += best_segmentation(text[i:j], pieces)
            i = j
    return ids


def main():
    pieces = vocab_pieces()
    write_vocab(pieces)
    index = {p: (NUM_SPECIAL + i, s) for i, (p, s) in enumerate(pieces)}

    fixture = "def xyz(ab)\n    return ab"
    fixture_ids = encode(fixture, index)
    assert len(fixture_ids) == 12, fixture_ids
    unk_text = "print(é€)"
    unk_ids = encode(unk_text, index)

    masks = []
    for seed, n in [(42, 10), (0, 20), (7, 50), (42, 137), (123456789, 1000), (5, 2048)]:
        masks.append({"seed": seed, "n": n, "spans": span_mask(n, 0.15, 3.0, seed)})
    tokens = list(range(200, 210))
    inp, tgt = sclm(tokens, masks[0]["spans"])

    rng = Rng(99)
    first_u64 = [rng.next_u64() for _ in range(3)]

    english = (
        "The children walked along the river every morning before school, "
        "watching the boats and talking about the weather, their friends and "
        "the books they were reading together at home in the quiet evenings."
    )
    assert len(english) >= 200, len(english)
    en_lang, en_conf = langid(english)
    a_lang, a_conf = langid("a")

    goldens = {
        "rng_seed99_first3": [str(x) for x in first_u64],
        "span_masks": masks,
        "sclm_seed42": {"tokens": tokens, "input": inp, "target": tgt},
        "rescale_09_01_a03": rescale([0.9, 0.1], 0.3),
        "langid_english": {"text": english, "lang": en_lang, "conf": en_conf},
        "langid_a": {"lang": a_lang, "conf": a_conf},
        "tokenizer_fixture": {"text": fixture, "ids": fixture_ids},
        "tokenizer_unk": {"text": unk_text, "ids": unk_ids},
    }
    with open(os.path.join(FIX, "core_goldens.json"), "w", encoding="utf-8") as f:
        json.dump(goldens, f, indent=2, ensure_ascii=False)
        f.write("\n")
    print(json.dumps(goldens, indent=1, ensure_ascii=False))


if __name__ == "__main__":
    main()
