#!/usr/bin/env python3
"""Freezes sacrebleu (2.x, default signatures) scores for the metric suites.

Outputs tests/data/metrics/<suite>.tsv (hyp<TAB>ref per line) and
<suite>.expected.json with corpus BLEU, corpus chrF, per-sentence chrF and
the sacrebleu signatures used.
"""
import json
import os
import random

from sacrebleu.metrics import BLEU, CHRF

HERE = os.path.dirname(os.path.abspath(__file__))
OUT = os.path.join(HERE, "..", "data", "metrics")

REFS = [
    "Let me surprise you.", "Give me a kiss.", "-Ok, let's eat.", "Hold on to her!", "Follow me!",
    "I don't know what you're saying.", "Come here now, please.", "We'll see each other later.",
    "The committee adopted the report on 3 May 2024.", "That costs 1,250.50 euros, doesn't it?",
    "\"Where are you going?\" she asked.", "It's 7:30 - we're late!", "Thank you, Mr. President.",
    "Mitä kuuluu? Hyvää, kiitos.", "Das ist (vielleicht) nicht richtig.", "He paid $20 & left.",
    "Yes... no... maybe?", "Señor García vive en São Paulo.", "Ich weiß es nicht.",
    "The vote will take place tomorrow at 12 noon.",
]
WORDS = ("the a to of and you me I we it is not what that this here now please later report "
         "vote euros president know saying go asked late maybe yes no kiss eat hold follow").split()


def corrupt(rng, s):
    toks = s.split()
    ops = rng.randint(0, 4)
    for _ in range(ops):
        r = rng.random()
        if r < 0.3 and toks:
            toks[rng.randrange(len(toks))] = rng.choice(WORDS)
        elif r < 0.5 and len(toks) > 1:
            del toks[rng.randrange(len(toks))]
        elif r < 0.7:
            toks.insert(rng.randrange(len(toks) + 1), rng.choice(WORDS))
        elif r < 0.85 and toks:
            i = rng.randrange(len(toks))
            w = toks[i]
            if len(w) > 2:
                j = rng.randrange(len(w))
                toks[i] = w[:j] + w[j + 1:]
        else:
            rng.shuffle(toks)
    return " ".join(toks)


def suite_main(rng):
    pairs = []
    for _ in range(200):
        ref = rng.choice(REFS)
        if rng.random() < 0.15:
            hyp = ref
        else:
            hyp = corrupt(rng, ref)
        pairs.append((hyp, ref))
    return pairs


def suite_noisy(rng):
    alphabet = "abcdeéfghijklmnoöpqrstuvwxyzäå .,!?-'\"&:;()0123456789€ß日本"
    pairs = []
    for _ in range(200):
        ref = "".join(rng.choice(alphabet) for _ in range(rng.randint(1, 60))).strip() or "x"
        hyp = "".join(c if rng.random() < 0.8 else rng.choice(alphabet) for c in ref)
        if rng.random() < 0.1:
            hyp = ""
        pairs.append((hyp, ref))
    return pairs


def suite_table4():
    return [
        ('"Let me surprise you."', '"Let me surprise you."'),
        ("'I am surprised at you.'", '"Let me surprise you."'),
        ("Give me a kiss.", "Give me a kiss."),
        ("I should like to make a point.", "Give me a kiss."),
        ("- Oh, let's eat.", "-Ok, let's eat."),
        ("-Oh, we eat.", "-Ok, let's eat."),
        ("Hold on to her!", "Hold on to her!"),
        ("Do not hold on to it!", "Hold on to her!"),
        ("Follow me!", "Follow me!"),
        ("My next point is this.", "Follow me!"),
        ("-Be careful, Eve.", "-Be careful, Eva."),
        ("- Precautionary, Eva.", "-Be careful, Eva."),
    ]


def freeze(name, pairs):
    hyps = [h for h, _ in pairs]
    refs = [r for _, r in pairs]
    bleu, chrf = BLEU(), CHRF()
    b = bleu.corpus_score(hyps, [refs])
    c = chrf.corpus_score(hyps, [refs])
    sent = [CHRF().sentence_score(h, [r]).score for h, r in pairs]
    with open(os.path.join(OUT, name + ".tsv"), "w", encoding="utf-8", newline="\n") as f:
        for h, r in pairs:
            assert "\t" not in h and "\t" not in r
            f.write(f"{h}\t{r}\n")
    with open(os.path.join(OUT, name + ".expected.json"), "w", encoding="utf-8") as f:
        json.dump({
            "bleu": b.score,
            "chrf": c.score,
            "sentence_chrf": sent,
            "bleu_signature": str(bleu.get_signature()),
            "chrf_signature": str(chrf.get_signature()),
        }, f, indent=1, ensure_ascii=False)
    print(name, b.score, c.score)


def main():
    os.makedirs(OUT, exist_ok=True)
    rng = random.Random(424242)
    freeze("main200", suite_main(rng))
    freeze("noisy200", suite_noisy(rng))
    freeze("table4", suite_table4())


if __name__ == "__main__":
    main()
