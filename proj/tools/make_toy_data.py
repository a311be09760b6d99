#!/usr/bin/env python3
"""Regenerates the bundled toy inputs under data/toy.

Output is a pure function of the constants below, so rerunning it leaves the
checked-in files unchanged.
"""

import json
import math
import random
import struct
import sys
from pathlib import Path

DIM = 24

# Themes: cue words that should land near each other in both models.
THEMES = {
    "conflict": ["conflicting", "contradictory", "inconsistent", "discrepant", "contradicting",
                 "incompatible", "irreconcilable", "contrary", "contradicted", "conflicted",
                 "disagreeing", "mismatched"],
    "unknown": ["unknown", "undetermined", "unexplained", "undiscovered", "uncharted",
                "unrecognized", "unidentified", "unexplored", "unresolved", "unanswered"],
    "doubt": ["doubtful", "uncertain", "uncertainty", "dubious", "questionable", "unconvincing",
              "improbable", "implausible", "unproven", "unsubstantiated", "debatable",
              "inconclusive", "equivocal", "unsettled", "tentative"],
    "surprise": ["unexpected", "surprising", "surprised", "surprise", "unanticipated",
                 "unpredictable", "unusual", "astonishing", "startling", "remarkable",
                 "bizarre", "baffling", "puzzling", "perplexity", "perplexing"],
    "dispute": ["controversial", "dispute", "contentious", "disputed", "contested", "debated",
                "polemical", "divisive", "consensus", "skeptic", "skeptical", "suspicion",
                "suspect"],
    "error": ["misleading", "deceptive", "fallacy", "misconception", "misbelief", "flaw",
              "flawed", "erroneous", "mistaken", "misguided", "absurdity", "unreliable",
              "spurious"],
    "vague": ["unclear", "ambiguous", "ambiguity", "confusing", "vague", "obscure",
              "mysterious", "mystery", "incomprehensive", "incongruity", "paradox",
              "paradoxical", "inconceivable", "impossible", "incomplete"],
}

FILLER = ("protein cell patient tissue gene receptor dose trial cohort mouse liver kidney "
          "serum plasma blood brain neuron cortex signal pathway enzyme activity level "
          "expression response treatment therapy drug placebo outcome survival risk factor "
          "sample assay method analysis model data result study group control week month "
          "year increase decrease change effect association marker sequence variant allele "
          "mutation tumor cancer infection virus bacteria antibody vaccine lesion imaging "
          "scan score scale index rate ratio measure report finding evidence hypothesis "
          "theory knowledge observation experiment population subject participant author "
          "review journal article table figure section value range mean median").split()

# Cue words the toy judges lean towards accepting.
ACCEPT_BIAS = {"conflict": 0.85, "unknown": 0.8, "doubt": 0.9, "surprise": 0.55,
               "dispute": 0.75, "error": 0.6, "vague": 0.7}

CASE_TWINS = ["Inconsistent", "Conflicting", "Contradictory", "Unclear"]

GROUPS = {"psychology": 0.34, "medicine": 0.2, "chemistry": 0.05}


def unit(rng, dim):
    v = [rng.gauss(0.0, 1.0) for _ in range(dim)]
    n = math.sqrt(sum(x * x for x in v))
    return [x / n for x in v]


def build_vectors(seed, noise):
    rng = random.Random(seed)
    centers = {t: unit(random.Random(1000 + i), DIM) for i, t in enumerate(sorted(THEMES))}
    vocab = []
    for theme in sorted(THEMES):
        c = centers[theme]
        for w in THEMES[theme]:
            vocab.append((w, [x + noise * rng.gauss(0.0, 1.0) for x in c]))
    for w in FILLER:
        vocab.append((w, unit(rng, DIM)))
    by_word = dict(vocab)
    for twin in CASE_TWINS:
        base = by_word[twin.lower()]
        vocab.append((twin, [x + 0.1 * rng.gauss(0.0, 1.0) for x in base]))
    return vocab


def write_binary(path, vocab):
    with open(path, "wb") as f:
        f.write(f"{len(vocab)} {DIM}\n".encode())
        for w, v in vocab:
            f.write(w.encode() + b" " + struct.pack(f"<{DIM}f", *v) + b"\n")


def write_text(path, vocab):
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write(f"{len(vocab)} {DIM}\n")
        for w, v in vocab:
            f.write(w + " " + " ".join(f"{x:.6f}" for x in v) + "\n")


def sentence(rng, cues):
    words = [rng.choice(FILLER) for _ in range(rng.randint(6, 12))]
    for c in cues:
        words.insert(rng.randrange(len(words) + 1), c)
    s = " ".join(words)
    return s[0].upper() + s[1:] + "."


def all_cues():
    return [w for t in sorted(THEMES) for w in THEMES[t]]


def write_corpus(path, rng, docs):
    cues = all_cues()
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for d in range(docs):
            sents = []
            for _ in range(rng.randint(3, 7)):
                k = 0 if rng.random() < 0.55 else rng.randint(1, 2)
                sents.append(sentence(rng, rng.sample(cues, k)))
            f.write(json.dumps({"id": f"doc{d:04d}", "text": " ".join(sents)}) + "\n")


def write_collection(path, rng, group, rate):
    consensus = ["conflicting", "inconsistent", "contradictory", "inconclusive", "uncertain"]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        for d in range(200):
            cues = [rng.choice(consensus)] if rng.random() < rate else []
            if rng.random() < 0.6:
                cues.append("knowledge")
            if rng.random() < 0.3:
                cues.append(rng.choice(all_cues()))
            text = " ".join(sentence(rng, cues if i == 0 else []) for i in range(3))
            f.write(json.dumps({"id": f"{group}{d:04d}", "text": text}) + "\n")


def write_annotations(path, rng):
    rows = []
    for theme in sorted(THEMES):
        p = ACCEPT_BIAS[theme]
        for w in THEMES[theme]:
            truth = rng.random() < p
            j1 = truth if rng.random() < 0.85 else not truth
            j2 = truth if rng.random() < 0.8 else not truth
            rows.append((w, j1, j2))
    for w in FILLER[:40]:
        rows.append((w, rng.random() < 0.1, rng.random() < 0.1))
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("word,judge1,judge2\n")
        for w, a, b in sorted(rows):
            f.write(f"{w},{'pos' if a else 'neg'},{'pos' if b else 'neg'}\n")


def write_agreement_counts(path):
    cells = [("pos", "pos", 151), ("pos", "neg", 49), ("neg", "pos", 63), ("neg", "neg", 130)]
    with open(path, "w", encoding="utf-8", newline="\n") as f:
        f.write("word,judge1,judge2\n")
        i = 0
        for a, b, n in cells:
            for _ in range(n):
                f.write(f"item{i:03d},{a},{b}\n")
                i += 1


def main(root):
    toy = root / "data" / "toy"
    toy.mkdir(parents=True, exist_ok=True)
    write_binary(toy / "news.bin", build_vectors(11, 0.35))
    write_text(toy / "pubmed.txt", build_vectors(29, 0.45))
    write_corpus(toy / "corpus.jsonl", random.Random(5), 160)
    rng = random.Random(17)
    with open(toy / "collections.tsv", "w", encoding="utf-8", newline="\n") as f:
        f.write("# group_id\tpath\n")
        for g, rate in GROUPS.items():
            write_collection(toy / f"group_{g}.jsonl", rng, g, rate)
            f.write(f"{g}\tgroup_{g}.jsonl\n")
    write_annotations(toy / "annotations.csv", random.Random(3))
    write_agreement_counts(toy / "agreement_counts.csv")


if __name__ == "__main__":
    main(Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parent.parent)
